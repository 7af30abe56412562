"""
Pipeline stages run by the command-line tool.

Every stage reads its inputs from files, writes its artifacts into the output directory and
returns the paths it wrote together with the headline numbers it computed.
"""

from collections.abc import Sequence

__all__: Sequence[str] = (
    "StageOutcome",
    "REFERENCE_VALUES",
    "wave_filename",
    "run_stage",
    "wave_stage",
    "essential_stage",
    "evans_stage",
    "winding_stage",
    "fast_stage",
    "slow_stage",
    "simulate_stage",
    "reproduce_all"
)

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Final

import numpy as np
import pandas as pd

from shockfront_stability import reports
from shockfront_stability.config import (
    ContourConfig,
    EssentialConfig,
    LocalizationConfig,
    OutputFormat,
    ScanConfig,
    SlowScanConfig,
    WaveConfig,
)
from shockfront_stability.exceptions import (
    BorderProximityError,
    NumericalError,
    StageFailedError,
    UnexpectedSignatureError,
)
from shockfront_stability.model import ModelParams
from shockfront_stability.pde_sim import DecayReport, SimConfig, run_perturbation_experiment
from shockfront_stability.reduced_spectra import (
    FastProbeResult,
    fast_connection_probe,
    fast_probe_root_scan,
    find_slow_eigenvalues,
    slow_path_projective,
)
from shockfront_stability.riccati_evans import (
    RiccatiEvansFunction,
    large_half_disc_contour,
    localize_spectrum,
)
from shockfront_stability.spectrum_essential import (
    RegionLabel,
    essential_spectrum_abscissa,
    essential_spectrum_plotdata,
    region_signature,
    sector_splitting,
)
from shockfront_stability.wave import WaveProfile, singular_wavespeed, solve_wave_bvp
from shockfront_stability.winding import (
    SearchBox,
    SpectralContour,
    SpectralReport,
    evaluate_contour,
)

SIMULATION_EPS: Final[float] = 1e-2
SECTOR_ARGUMENTS: Final[tuple[float, ...]] = tuple(np.linspace(-0.9 * math.pi, 0.9 * math.pi, 7))  # noqa: E501

# quantity: (reference value, absolute tolerance)
REFERENCE_VALUES: Final[dict[str, tuple[float, float]]] = {
    "singular_wavespeed": (0.1968109995, 1e-7),
    "wavespeed": (0.19686, 2e-4),
    "essential_abscissa": (-1.0, 1e-12),
    "large_contour_winding": (0.0, 0.0),
    "translational_root": (0.0, 1e-2),
    "second_root": (-0.80031, 5e-3),
    "pole": (-0.29, 1e-2),
    "fast_root": (3718.025, 37.18025),
    "fast_beta2_gap": (-5.08, 0.1),
    "slow_translational_eigenvalue": (0.0, 1e-4),
    "slow_second_eigenvalue": (-0.80031, 1e-3)
}


@dataclass
class StageOutcome:
    outputs: list[Path] = field(default_factory=list)
    values: dict[str, float] = field(default_factory=dict)


def wave_filename(eps: float) -> str:
    return f"wave_eps{eps:.0e}.csv"


def run_stage[T](stage: str, action: Callable[[], T]) -> T:
    """Run `action`, re-raising numerical failures wrapped with the stage name."""
    logging.info(f"Stage {stage!r} started")

    e: NumericalError
    try:
        result: T = action()
    except StageFailedError:
        raise
    except NumericalError as e:
        raise StageFailedError(stage=stage, reason=e) from e

    logging.info(f"Stage {stage!r} completed")
    return result


def _write_table(record: reports.ReportRecord, rows: pd.DataFrame, path: Path, output_format: OutputFormat) -> Path:  # noqa: E501
    if output_format is OutputFormat.CSV:
        return reports.write_csv(rows, path.with_suffix(".csv"))
    return reports.write_json(record, path.with_suffix(".json"))


def wave_stage(block: WaveConfig, params: ModelParams, output_dir: Path) -> StageOutcome:
    profile: WaveProfile = solve_wave_bvp(
        block.eps,
        L=block.L,
        N=block.N,
        c_guess=block.c_guess,
        params=params
    )
    c0: float = singular_wavespeed(params=params)
    logging.info(f"Wave at eps={block.eps:g}: c={profile.c:.8f} (singular c0={c0:.10f})")

    return StageOutcome(
        outputs=list(
            reports.save_wave_profile(profile, output_dir / wave_filename(block.eps))
        ),
        values={"wavespeed": profile.c, "singular_wavespeed": c0}
    )


def _region_record(lam: float, params: ModelParams) -> reports.RegionRecord:
    e: BorderProximityError | UnexpectedSignatureError
    try:
        label: RegionLabel = region_signature(lam, params)
    except (BorderProximityError, UnexpectedSignatureError) as e:
        logging.warning(f"No region label at λ={lam}: {e.message}")
        return reports.RegionRecord(lam=lam, name=None)

    return reports.RegionRecord(
        lam=lam,
        name=str(label.name),
        sig_minus=label.sig_minus,
        sig_plus=label.sig_plus
    )


def essential_stage(block: EssentialConfig, params: ModelParams, output_dir: Path) -> StageOutcome:  # noqa: E501
    abscissa: float = essential_spectrum_abscissa(params)
    report: reports.EssentialReport = reports.EssentialReport(
        eps=params.eps,
        c=params.c,
        abscissa=abscissa,
        regions=[_region_record(lam, params) for lam in block.probes],
        sector_splitting=[
            (float(arg), *sector_splitting(arg, max(params.eps, 1e-12)))
            for arg in SECTOR_ARGUMENTS
        ]
    )

    return StageOutcome(
        outputs=[
            reports.write_csv(
                reports.borders_frame(essential_spectrum_plotdata(block.k_range, block.n, params)),  # noqa: E501
                output_dir / "fredholm_borders.csv"
            ),
            reports.write_json(report, output_dir / "essential_spectrum.json")
        ],
        values={"essential_abscissa": abscissa}
    )


def evans_stage(block: ContourConfig, profile: WaveProfile, params: ModelParams, output_dir: Path, *, workers: int) -> StageOutcome:  # noqa: E501
    wave_params: ModelParams = params.with_wave(eps=profile.eps, c=profile.c)
    contour: SpectralContour = evaluate_contour(
        RiccatiEvansFunction(profile, wave_params),
        large_half_disc_contour(block.radius, block.detour_radius),
        n_initial=block.n_initial,
        max_samples=block.max_samples,
        workers=workers
    )
    logging.info(f"E_T winds {contour.winding} times along the large contour")

    return StageOutcome(
        outputs=[
            reports.write_csv(reports.contour_frame(contour), output_dir / "evans_contour.csv"),  # noqa: E501
            reports.write_json(
                reports.ContourReport(
                    kind=str(contour.kind),
                    winding=contour.winding,
                    total_phase=contour.total_phase,
                    n_samples=int(contour.samples.size)
                ),
                output_dir / "evans_winding.json"
            )
        ],
        values={"large_contour_winding": float(contour.winding)}
    )


def _nearest(points: Sequence[complex], target: float) -> float:
    if not points:
        return math.nan
    return float(min(points, key=lambda point: abs(point - target)).real)


def winding_stage(block: LocalizationConfig, profile: WaveProfile, params: ModelParams, output_dir: Path, *, workers: int) -> StageOutcome:  # noqa: E501
    report: SpectralReport = localize_spectrum(
        SearchBox(*block.box),
        profile,
        params=params,
        margin=block.margin,
        diameter_tolerance=block.diameter_tolerance,
        max_samples=block.max_samples,
        workers=workers
    )
    roots: list[complex] = [point.center for point in report.roots]
    poles: list[complex] = [point.center for point in report.poles]

    return StageOutcome(
        outputs=[
            reports.write_json(
                reports.spectral_report_record(report),
                output_dir / "point_spectrum.json"
            ),
            reports.write_csv(
                reports.contour_frame(report.contour),
                output_dir / "point_spectrum_contour.csv"
            )
        ],
        values={
            "translational_root": _nearest(roots, 0.0),
            "second_root": _nearest(roots, -0.8),
            "pole": _nearest(poles, -0.29),
            "n_roots": float(len(roots)),
            "n_poles": float(len(poles))
        }
    )


def fast_stage(block: ScanConfig, profile: WaveProfile | None, params: ModelParams, output_dir: Path, *, workers: int, output_format: OutputFormat) -> StageOutcome:  # noqa: E501
    eps: float = profile.eps if profile is not None else params.eps
    c: float = profile.c if profile is not None else params.c
    roots: list[tuple[float, complex]] = fast_probe_root_scan(
        block.interval,
        block.n,
        eps,
        profile,
        c=c,
        params=params,
        workers=workers
    )
    at_zero: FastProbeResult = fast_connection_probe(0.0, eps, profile, c=c, params=params)

    root_records: list[reports.FastRootRecord] = [
        reports.FastRootRecord(
            lam=root,
            beta2_gap=gap,
            classification=str(
                fast_connection_probe(root, eps, profile, c=c, params=params).classification
            )
        )
        for root, gap in roots
    ]
    record: reports.FastScanReport = reports.FastScanReport(
        interval=block.interval,
        eps=eps,
        classification_at_zero=str(at_zero.classification),
        roots=root_records
    )
    rows: pd.DataFrame = pd.DataFrame(
        [
            {
                "lambda": root.lam,
                "re_beta2_gap": root.beta2_gap.real,
                "im_beta2_gap": root.beta2_gap.imag,
                "classification": root.classification
            }
            for root in root_records
        ],
        columns=["lambda", "re_beta2_gap", "im_beta2_gap", "classification"]
    )

    values: dict[str, float] = {"n_fast_roots": float(len(roots))}
    if roots:
        values["fast_root"] = roots[0][0]
        values["fast_beta2_gap"] = roots[0][1].real

    return StageOutcome(
        outputs=[
            _write_table(record, rows, output_dir / "fast_roots", output_format),
            reports.write_csv(
                pd.concat(
                    [
                        reports.fast_path_frame(at_zero.unstable_path, "unstable"),
                        reports.fast_path_frame(at_zero.stable_path, "stable")
                    ],
                    ignore_index=True
                ),
                output_dir / "fast_paths_lambda0.csv"
            )
        ],
        values=values
    )


def slow_stage(block: SlowScanConfig, params: ModelParams, output_dir: Path, *, workers: int, output_format: OutputFormat, path_lambda: float = 100.0) -> StageOutcome:  # noqa: E501
    c0: float = singular_wavespeed(params=params)
    eigenvalues: list[float] = find_slow_eigenvalues(
        block.interval,
        block.n,
        c0,
        section_U=block.section_U,
        params=params,
        workers=workers
    )
    record: reports.SlowEigenvaluesReport = reports.SlowEigenvaluesReport(
        interval=block.interval,
        c0=c0,
        section_U=block.section_U,
        eigenvalues=eigenvalues
    )

    return StageOutcome(
        outputs=[
            _write_table(
                record,
                pd.DataFrame({"lambda": eigenvalues}),
                output_dir / "slow_eigenvalues",
                output_format
            ),
            reports.write_csv(
                reports.slow_path_frame(
                    slow_path_projective(path_lambda, c0, block.section_U, params)
                ),
                output_dir / f"slow_paths_lambda{path_lambda:g}.csv"
            )
        ],
        values={
            "slow_translational_eigenvalue": _nearest(eigenvalues, 0.0),
            "slow_second_eigenvalue": _nearest(eigenvalues, -0.8),
            "n_slow_eigenvalues": float(len(eigenvalues))
        }
    )


def simulate_stage(sim_config: SimConfig, profile: WaveProfile, params: ModelParams, output_dir: Path) -> StageOutcome:  # noqa: E501
    report: DecayReport = run_perturbation_experiment(profile, sim_config, params)
    outputs: list[Path] = [
        reports.write_json(
            reports.decay_record(report, profile.c),
            output_dir / "decay_report.json"
        )
    ]
    if report.snapshots.size:
        outputs.append(
            reports.write_csv(reports.snapshot_frame(report), output_dir / "snapshots.csv")
        )

    return StageOutcome(
        outputs=outputs,
        values={
            "fitted_speed": report.fitted_speed,
            "fitted_rate": report.fitted_rate,
            "simulation_wavespeed": profile.c
        }
    )


def _summary_rows(values: dict[str, float]) -> list[reports.SummaryRow]:
    rows: list[reports.SummaryRow] = []

    quantity: str
    reference: float
    tolerance: float
    for quantity, (reference, tolerance) in REFERENCE_VALUES.items():
        computed: float | None = values.get(quantity)
        if computed is not None and not math.isfinite(computed):
            computed = None
        rows.append(
            reports.SummaryRow(
                quantity=quantity,
                reference=reference,
                computed=computed,
                tolerance=tolerance,
                passed=computed is not None and abs(computed - reference) <= tolerance
            )
        )

    if "fitted_speed" in values:
        rows.append(
            reports.SummaryRow(
                quantity="simulated_speed",
                reference=values["simulation_wavespeed"],
                computed=values["fitted_speed"],
                tolerance=0.05 * abs(values["simulation_wavespeed"]),
                passed=bool(
                    abs(values["fitted_speed"] - values["simulation_wavespeed"])
                    <= 0.05 * abs(values["simulation_wavespeed"])
                )
            )
        )

    return rows


def reproduce_all(params: ModelParams, output_dir: Path, *, workers: int, output_format: OutputFormat, simulate: bool = True) -> StageOutcome:  # noqa: E501
    """Run every stage in order and write a summary against the reference numbers."""
    outcome: StageOutcome = StageOutcome()

    def absorb(stage_outcome: StageOutcome) -> None:
        outcome.outputs.extend(stage_outcome.outputs)
        outcome.values.update(stage_outcome.values)

    wave_block: WaveConfig = WaveConfig(eps=params.eps if params.eps > 0 else 1e-4)
    absorb(run_stage("wave", lambda: wave_stage(wave_block, params, output_dir)))
    profile: WaveProfile = reports.load_wave_profile(
        output_dir / wave_filename(wave_block.eps)
    )
    wave_params: ModelParams = params.with_wave(eps=profile.eps, c=profile.c)

    absorb(run_stage("essential", lambda: essential_stage(EssentialConfig(), wave_params, output_dir)))  # noqa: E501
    absorb(
        run_stage(
            "evans",
            lambda: evans_stage(ContourConfig(), profile, params, output_dir, workers=workers)
        )
    )
    absorb(
        run_stage(
            "winding",
            lambda: winding_stage(LocalizationConfig(), profile, params, output_dir, workers=workers)  # noqa: E501
        )
    )
    absorb(
        run_stage(
            "fast",
            lambda: fast_stage(
                ScanConfig(interval=(0.0, 5000.0), n=200),
                profile,
                params,
                output_dir,
                workers=workers,
                output_format=output_format
            )
        )
    )
    absorb(
        run_stage(
            "slow",
            lambda: slow_stage(
                SlowScanConfig(interval=(-2.0, 0.5), n=200),
                params,
                output_dir,
                workers=workers,
                output_format=output_format
            )
        )
    )

    if simulate:
        simulation_block: WaveConfig = WaveConfig(eps=SIMULATION_EPS)
        absorb(run_stage("wave", lambda: wave_stage(simulation_block, params, output_dir)))
        simulation_profile: WaveProfile = reports.load_wave_profile(
            output_dir / wave_filename(SIMULATION_EPS)
        )
        absorb(
            run_stage(
                "simulate",
                lambda: simulate_stage(SimConfig(), simulation_profile, params, output_dir)
            )
        )

    summary: reports.ReproductionSummary = reports.ReproductionSummary(
        rows=_summary_rows(outcome.values)
    )
    outcome.outputs.append(reports.write_json(summary, output_dir / "summary.json"))
    outcome.outputs.append(
        reports.write_csv(
            pd.DataFrame([row.model_dump() for row in summary.rows]),
            output_dir / "summary.csv"
        )
    )

    failed: list[str] = [row.quantity for row in summary.rows if not row.passed]
    if failed:
        logging.warning(f"Reference numbers not reproduced: {", ".join(failed)}")
    else:
        logging.info("Every reference number was reproduced")

    return outcome
