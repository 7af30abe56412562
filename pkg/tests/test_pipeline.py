"""Tests of the stage runner, the stage artifacts and the reference summary."""

from collections.abc import Sequence

__all__: Sequence[str] = ()

import math
from pathlib import Path

import pytest

from shockfront_stability import pipeline, reports
from shockfront_stability.config import EssentialConfig
from shockfront_stability.exceptions import ConvergenceError, StageFailedError
from shockfront_stability.model import ModelParams
from shockfront_stability.pipeline import StageOutcome


def _raise(error: BaseException) -> None:
    raise error


def test_wave_filename() -> None:
    assert pipeline.wave_filename(1e-4) == "wave_eps1e-04.csv"
    assert pipeline.wave_filename(pipeline.SIMULATION_EPS) == "wave_eps1e-02.csv"


def test_run_stage_returns_the_result() -> None:
    assert pipeline.run_stage("essential", lambda: 42) == 42


def test_run_stage_names_the_failed_stage() -> None:
    with pytest.raises(StageFailedError, match="'fast' failed: brentq did not converge") as exc_info:  # noqa: E501
        pipeline.run_stage("fast", lambda: _raise(ConvergenceError(solver="brentq")))

    assert isinstance(exc_info.value.reason, ConvergenceError)


def test_run_stage_does_not_wrap_twice() -> None:
    inner: StageFailedError = StageFailedError(stage="slow")

    with pytest.raises(StageFailedError) as exc_info:
        pipeline.run_stage("reproduce-all", lambda: _raise(inner))

    assert exc_info.value is inner


def test_run_stage_leaves_other_errors_alone() -> None:
    with pytest.raises(KeyError):
        pipeline.run_stage("wave", lambda: _raise(KeyError("wave")))


def test_essential_stage(default_params: ModelParams, output_dir: Path) -> None:
    outcome: StageOutcome = pipeline.essential_stage(
        EssentialConfig(n=11, probes=(1.0, -1.0, -2.5)),
        default_params,
        output_dir
    )
    report: reports.EssentialReport = reports.read_json(
        output_dir / "essential_spectrum.json",
        reports.EssentialReport
    )

    assert [path.name for path in outcome.outputs] == ["fredholm_borders.csv", "essential_spectrum.json"]  # noqa: E501
    assert outcome.values == {"essential_abscissa": -1.0}
    assert [region.name for region in report.regions] == ["Omega", None, "A2"]
    assert all(row[1:] == (2, 2) for row in report.sector_splitting)


def test_summary_rows_compare_against_the_references() -> None:
    rows: list[reports.SummaryRow] = pipeline._summary_rows(  # noqa: SLF001
        {
            "essential_abscissa": -1.0,
            "wavespeed": 0.2,
            "pole": math.nan,
            "fitted_speed": 0.195,
            "simulation_wavespeed": 0.197
        }
    )
    by_quantity: dict[str, reports.SummaryRow] = {row.quantity: row for row in rows}

    assert set(pipeline.REFERENCE_VALUES) < set(by_quantity)
    assert by_quantity["essential_abscissa"].passed
    assert not by_quantity["wavespeed"].passed
    assert by_quantity["pole"].computed is None
    assert not by_quantity["pole"].passed
    assert by_quantity["simulated_speed"].passed
    assert by_quantity["second_root"].computed is None
