"""
Reading & writing of every artifact the pipeline stages exchange.

Tabular data (profiles, contours, borders, paths, snapshots) is written as CSV; reports are
pydantic records written as JSON with sorted keys. Complex numbers are stored as [re, im].
"""

from collections.abc import Sequence

__all__: Sequence[str] = (
    "ComplexPair",
    "ReportRecord",
    "WaveSidecar",
    "RegionRecord",
    "EssentialReport",
    "ContourReport",
    "LocatedPointRecord",
    "SpectralReportRecord",
    "FastRootRecord",
    "FastScanReport",
    "SlowEigenvaluesReport",
    "DecayReportRecord",
    "SummaryRow",
    "ReproductionSummary",
    "Manifest",
    "write_csv",
    "read_csv",
    "write_json",
    "read_json",
    "save_wave_profile",
    "load_wave_profile",
    "contour_frame",
    "borders_frame",
    "fast_path_frame",
    "slow_path_frame",
    "snapshot_frame",
    "decay_record",
    "spectral_report_record"
)

import datetime
import json
import logging
from pathlib import Path
from typing import Annotated, Any, Final

import numpy as np
import pandas as pd
import pathvalidate
from identify import identify
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer

from shockfront_stability.exceptions import ImproperlyConfiguredError, MissingInputError
from shockfront_stability.pde_sim import DecayReport
from shockfront_stability.reduced_spectra import ProjectivePathFast, ProjectivePathSlow
from shockfront_stability.spectrum_essential import FredholmBorder
from shockfront_stability.wave import WaveProfile
from shockfront_stability.winding import LocatedPoint, SpectralContour, SpectralReport, contour_dump  # noqa: E501

CSV_FLOAT_FORMAT: Final[str] = "%.17g"
WAVE_COLUMNS: Final[tuple[str, ...]] = ("zeta", "U", "W", "P", "V")


def _parse_complex(value: object) -> object:
    if isinstance(value, list | tuple) and len(value) == 2:  # noqa: PLR2004
        return complex(float(value[0]), float(value[1]))
    return value


ComplexPair = Annotated[
    complex,
    BeforeValidator(_parse_complex),
    PlainSerializer(lambda z: [z.real, z.imag], return_type=list[float])
]


def _now() -> datetime.datetime:
    return datetime.datetime.now(tz=datetime.UTC)


class ReportRecord(BaseModel):
    """Parent class of every JSON report; `created_at` is its only non-deterministic field."""

    model_config = ConfigDict(extra="forbid")

    created_at: datetime.datetime = Field(default_factory=_now)


class WaveSidecar(ReportRecord):
    eps: float
    c: float
    L: float
    N: int
    residuals: dict[str, float] = {}


class RegionRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lam: ComplexPair
    name: str | None
    sig_minus: tuple[str, ...] = ()
    sig_plus: tuple[str, ...] = ()


class EssentialReport(ReportRecord):
    eps: float
    c: float
    abscissa: float
    regions: list[RegionRecord]
    sector_splitting: list[tuple[float, int, int]]


class ContourReport(ReportRecord):
    kind: str
    winding: int
    total_phase: float
    n_samples: int


class LocatedPointRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    center: ComplexPair
    radius: float
    index: int


class SpectralReportRecord(ReportRecord):
    winding: int
    roots: list[LocatedPointRecord]
    poles: list[LocatedPointRecord]
    n_samples: int


class FastRootRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lam: float
    beta2_gap: ComplexPair
    classification: str


class FastScanReport(ReportRecord):
    interval: tuple[float, float]
    eps: float
    classification_at_zero: str
    roots: list[FastRootRecord]


class SlowEigenvaluesReport(ReportRecord):
    interval: tuple[float, float]
    c0: float
    section_U: float
    eigenvalues: list[float]


class DecayReportRecord(ReportRecord):
    times: list[float]
    shift_fit: list[float]
    residual: list[float]
    fitted_rate: float
    fitted_speed: float
    monotone_after_transient: bool
    wave_c: float


class SummaryRow(BaseModel):
    model_config = ConfigDict(extra="forbid")

    quantity: str
    reference: float
    computed: float | None
    tolerance: float
    passed: bool


class ReproductionSummary(ReportRecord):
    rows: list[SummaryRow]

    @property
    def all_passed(self) -> bool:
        return all(row.passed for row in self.rows)


class Manifest(ReportRecord):
    command: str
    status: str
    argv: list[str]
    config: dict[str, Any]
    settings: dict[str, Any]
    outputs: list[str]
    package_version: str


def _validated_output_path(path: Path) -> Path:
    e: pathvalidate.ValidationError
    try:
        pathvalidate.validate_filepath(path, platform="auto")
    except pathvalidate.ValidationError as e:
        INVALID_OUTPUT_PATH_MESSAGE: Final[str] = f"{path} is not a valid output path ({e})"
        raise ImproperlyConfiguredError(INVALID_OUTPUT_PATH_MESSAGE) from None

    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _checked_input_path(path: Path, required_tag: str) -> Path:
    if not path.is_file():
        raise MissingInputError(path=path)

    if required_tag not in identify.tags_from_path(str(path)):
        WRONG_FILE_TYPE_MESSAGE: Final[str] = (
            f"{path} is not recognised as a {required_tag.upper()} file"
        )
        raise ImproperlyConfiguredError(WRONG_FILE_TYPE_MESSAGE)

    return path


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    frame.to_csv(_validated_output_path(path), index=False, float_format=CSV_FLOAT_FORMAT)
    logging.debug(f"Wrote {len(frame)} rows to {path}")
    return path


def read_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(_checked_input_path(path, "csv"))


def write_json(record: ReportRecord, path: Path) -> Path:
    """Write `record` as indented JSON with sorted keys."""
    _validated_output_path(path).write_text(
        json.dumps(record.model_dump(mode="json"), indent=2, sort_keys=True) + "\n",
        encoding="utf-8"
    )
    logging.debug(f"Wrote {type(record).__name__} to {path}")
    return path


def read_json[RecordT: ReportRecord](path: Path, record_type: type[RecordT]) -> RecordT:
    return record_type.model_validate_json(
        _checked_input_path(path, "json").read_text(encoding="utf-8")
    )


def save_wave_profile(profile: WaveProfile, path: Path) -> tuple[Path, Path]:
    """Write the profile as CSV with a JSON sidecar (same stem) holding ε, c, L, N."""
    write_csv(
        pd.DataFrame(
            {
                column: getattr(profile, column)
                for column
                in WAVE_COLUMNS
            }
        ),
        path
    )
    sidecar_path: Path = write_json(
        WaveSidecar(
            eps=profile.eps,
            c=profile.c,
            L=profile.L,
            N=profile.N,
            residuals=profile.residuals
        ),
        path.with_suffix(".json")
    )
    return path, sidecar_path


def load_wave_profile(path: Path) -> WaveProfile:
    frame: pd.DataFrame = read_csv(path)
    missing_columns: set[str] = set(WAVE_COLUMNS) - set(frame.columns)
    if missing_columns:
        MISSING_COLUMNS_MESSAGE: Final[str] = (
            f"Wave file {path} lacks the columns {", ".join(sorted(missing_columns))}"
        )
        raise ImproperlyConfiguredError(MISSING_COLUMNS_MESSAGE)

    sidecar: WaveSidecar = read_json(path.with_suffix(".json"), WaveSidecar)
    return WaveProfile(
        zeta=frame["zeta"].to_numpy(dtype=float),
        U=frame["U"].to_numpy(dtype=float),
        W=frame["W"].to_numpy(dtype=float),
        P=frame["P"].to_numpy(dtype=float),
        V=frame["V"].to_numpy(dtype=float),
        c=sidecar.c,
        eps=sidecar.eps,
        residuals=sidecar.residuals
    )


def contour_frame(contour: SpectralContour) -> pd.DataFrame:
    return pd.DataFrame(
        contour_dump(contour),
        columns=["s", "re_lambda", "im_lambda", "re_f", "im_f"]
    )


def borders_frame(borders: Sequence[FredholmBorder]) -> pd.DataFrame:
    return pd.DataFrame(
        [row for border in borders for row in border.rows()],
        columns=["k", "re_lambda", "im_lambda", "endpoint"]
    )


def fast_path_frame(path: ProjectivePathFast, bundle: str) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "bundle": bundle,
            "xi": path.xi_grid,
            **{
                f"{prefix}_beta{index + 1}": getattr(path.beta[:, index], part)
                for index in range(3)
                for prefix, part in (("re", "real"), ("im", "imag"))
            }
        }
    )


def slow_path_frame(paths: Sequence[ProjectivePathSlow]) -> pd.DataFrame:
    return pd.concat(
        [
            pd.DataFrame(
                {
                    "segment": path.segment,
                    "U": path.U,
                    "re_S": path.S.real,
                    "im_S": path.S.imag,
                    "on_S_chart": path.on_S_chart
                }
            )
            for path in paths
        ],
        ignore_index=True
    )


def snapshot_frame(report: DecayReport) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "x": report.x_grid,
            **{
                f"U_t={time:.12g}": snapshot
                for time, snapshot
                in zip(report.snapshot_times, report.snapshots, strict=True)
            }
        }
    )


def decay_record(report: DecayReport, wave_c: float) -> DecayReportRecord:
    return DecayReportRecord(
        times=report.times.tolist(),
        shift_fit=report.shift_fit.tolist(),
        residual=report.residual.tolist(),
        fitted_rate=report.fitted_rate,
        fitted_speed=report.fitted_speed,
        monotone_after_transient=report.is_monotone_after_transient(),
        wave_c=wave_c
    )


def _point_record(point: LocatedPoint) -> LocatedPointRecord:
    return LocatedPointRecord(center=point.center, radius=point.radius, index=point.index)


def spectral_report_record(report: SpectralReport) -> SpectralReportRecord:
    return SpectralReportRecord(
        winding=report.winding,
        roots=[_point_record(point) for point in report.roots],
        poles=[_point_record(point) for point in report.poles],
        n_samples=int(np.size(report.contour.samples))
    )
