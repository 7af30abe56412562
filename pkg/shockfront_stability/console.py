"""
Console script wrapper for Shockfront Stability.

This script performs argument parsing, runs the requested pipeline stage & sends a return code
back to the console.
"""

from collections.abc import Sequence

__all__: Sequence[str] = ("run", "set_up_arg_parser")

import importlib.metadata
import logging
import os
import sys
from argparse import ArgumentParser, Namespace
from pathlib import Path
from typing import TYPE_CHECKING, Final, assert_never

from pydantic import ValidationError

from shockfront_stability import config, pipeline, reports
from shockfront_stability.config import (
    Command,
    CommandBlock,
    ContourConfig,
    EssentialConfig,
    LocalizationConfig,
    ModelConfig,
    OutputFormat,
    RunConfig,
    ScanConfig,
    SlowScanConfig,
    WaveConfig,
    settings,
)
from shockfront_stability.exceptions import (
    ImproperlyConfiguredError,
    MissingInputError,
    NumericalError,
)
from shockfront_stability.model import ModelParams
from shockfront_stability.pde_sim import SimConfig
from shockfront_stability.pipeline import StageOutcome, run_stage, wave_filename
from shockfront_stability.reduced_spectra import DEFAULT_SLOW_SECTION
from shockfront_stability.utils import SuppressTraceback
from shockfront_stability.wave import WaveProfile

if TYPE_CHECKING:
    # noinspection PyProtectedMember
    from argparse import _MutuallyExclusiveGroup as MutuallyExclusiveGroup
    # noinspection PyProtectedMember
    from argparse import _SubParsersAction as SubParsersAction

NUMERICAL_FAILURE_EXIT_CODE: Final[int] = 3
MANIFEST_FILENAME: Final[str] = "manifest.json"
PACKAGE_NAME: Final[str] = "Shockfront-Stability"


def _add_common_arguments(arg_parser: ArgumentParser) -> None:
    arg_parser.add_argument(
        "--config",
        type=Path,
        dest="model_config_file_path",
        help=(
            "A key-value file of model parameters "
            "(eps, c, F_coeffs, R_coeffs, use_paper_eq2_D). "
            "If this option is not provided, the default cubic model is used."
        )
    )
    arg_parser.add_argument(
        "--output-dir",
        dest="output_directory_path",
        help=(
            "Path to the directory that every artifact is written to. "
            "If this option is not provided, SHOCKFRONT_OUTPUT_DIR is used."
        )
    )
    arg_parser.add_argument(
        "--threads",
        type=int,
        help=(
            "The number of worker processes used to evaluate independent λ samples. "
            "If this option is not provided, SHOCKFRONT_THREADS is used."
        )
    )
    arg_parser.add_argument(
        "--format",
        type=OutputFormat,
        default=OutputFormat.JSON,
        choices=tuple(OutputFormat),
        help="Format of the tabular reports (default: %(default)s)"
    )
    arg_parser.add_argument(
        "-E",
        "--force-env-variables",
        action="store_true",
        help=(
            "Force the use of the values stored as environment variables, "
            "overriding any supplied command-line arguments"
        )
    )

    verbosity_args_group: MutuallyExclusiveGroup = arg_parser.add_mutually_exclusive_group()
    verbosity_args_group.add_argument(
        "-q",
        "--quiet",
        action="store_true",
        help="Do not output any messages. Mutually exclusive with `--verbose`"
    )
    verbosity_args_group.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        dest="verbosity",
        help="Increase the verbosity of messages. Mutually exclusive with `--quiet`"
    )


def _add_wave_file_argument(arg_parser: ArgumentParser, *, default_description: str) -> None:
    arg_parser.add_argument(
        "--wave",
        type=Path,
        dest="wave_file_path",
        help=(
            "A wave profile CSV written by the `wave` command "
            f"(default: {default_description})"
        )
    )


def _add_scan_arguments(arg_parser: ArgumentParser, *, default_interval: tuple[float, float]) -> None:  # noqa: E501
    arg_parser.add_argument(
        "--interval",
        type=float,
        nargs=2,
        metavar=("LOWER", "UPPER"),
        default=default_interval,
        help="The real λ-interval to scan for sign changes (default: %(default)s)"
    )
    arg_parser.add_argument(
        "--n",
        type=int,
        default=200,
        help="The number of scan points (default: %(default)s)"
    )


def set_up_arg_parser() -> ArgumentParser:
    common_parser: ArgumentParser = ArgumentParser(add_help=False)
    _add_common_arguments(common_parser)

    arg_parser: ArgumentParser = ArgumentParser(
        prog="shockfront-stability",
        description=(
            "Compute shock-fronted travelling waves of a regularized forward-backward "
            "diffusion equation & decide their spectral stability"
        )
    )
    subparsers: SubParsersAction[ArgumentParser] = arg_parser.add_subparsers(
        dest="command",
        required=True,
        metavar="COMMAND"
    )

    wave_parser: ArgumentParser = subparsers.add_parser(
        Command.WAVE,
        parents=[common_parser],
        help="Solve the travelling-wave boundary value problem"
    )
    wave_parser.add_argument("--eps", type=float, default=1e-4)
    wave_parser.add_argument("--length", type=float, default=50.0, help="Half-domain length")
    wave_parser.add_argument("--nodes", type=int, default=2000, help="Initial mesh nodes")
    wave_parser.add_argument("--c-guess", type=float)

    essential_parser: ArgumentParser = subparsers.add_parser(
        Command.ESSENTIAL,
        parents=[common_parser],
        help="Write the Fredholm borders & region labels of the essential spectrum"
    )
    essential_parser.add_argument(
        "--k-range",
        type=float,
        nargs=2,
        metavar=("K_MIN", "K_MAX"),
        default=(-20.0, 20.0)
    )
    essential_parser.add_argument("--n", type=int, default=2001)
    essential_parser.add_argument(
        "--probe",
        type=float,
        action="append",
        dest="probes",
        help="A real λ to label with its region (repeatable; default: 1, -0.5, -2.5)"
    )
    _add_wave_file_argument(essential_parser, default_description="the model's eps & c")

    evans_parser: ArgumentParser = subparsers.add_parser(
        Command.EVANS,
        parents=[common_parser],
        help="Evaluate the Riccati-Evans function around the large half-disc contour"
    )
    _add_wave_file_argument(evans_parser, default_description="the wave for the model's eps")
    evans_parser.add_argument("--radius", type=float, default=1e5)
    evans_parser.add_argument("--detour-radius", type=float, default=1.0)

    winding_parser: ArgumentParser = subparsers.add_parser(
        Command.WINDING,
        parents=[common_parser],
        help="Locate the roots & poles of the Riccati-Evans function inside a box"
    )
    _add_wave_file_argument(winding_parser, default_description="the wave for the model's eps")
    winding_parser.add_argument(
        "--box",
        type=float,
        nargs=4,
        metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"),
        default=(-2.0, 0.1, -0.5, 0.5)
    )

    fast_parser: ArgumentParser = subparsers.add_parser(
        Command.FAST,
        parents=[common_parser],
        help="Scan the reduced fast problem for real eigenvalues"
    )
    _add_wave_file_argument(fast_parser, default_description="the singular layer shock")
    _add_scan_arguments(fast_parser, default_interval=(0.0, 5000.0))

    slow_parser: ArgumentParser = subparsers.add_parser(
        Command.SLOW,
        parents=[common_parser],
        help="Scan the reduced slow problem for real eigenvalues"
    )
    _add_scan_arguments(slow_parser, default_interval=(-2.0, 0.5))
    slow_parser.add_argument(
        "--section",
        type=float,
        default=DEFAULT_SLOW_SECTION,
        help="The value of U at which the slow shooting paths are compared"
    )
    slow_parser.add_argument(
        "--path-lambda",
        type=float,
        default=100.0,
        help="The λ at which the slow projective paths are exported"
    )

    simulate_parser: ArgumentParser = subparsers.add_parser(
        Command.SIMULATE,
        parents=[common_parser],
        help="Perturb a wave & follow its decay back onto the family of translates"
    )
    _add_wave_file_argument(simulate_parser, default_description="the wave for eps=1e-2")
    simulate_parser.add_argument(
        "--sim-config",
        type=Path,
        dest="sim_config_file_path",
        help="A JSON file of simulation settings. Mutually exclusive with the overrides below"
    )
    simulate_parser.add_argument("--t-end", type=float)
    simulate_parser.add_argument("--nx", type=int)
    simulate_parser.add_argument("--dt", type=float)
    simulate_parser.add_argument("--amplitude", type=float)

    reproduce_parser: ArgumentParser = subparsers.add_parser(
        Command.REPRODUCE_ALL,
        parents=[common_parser],
        help="Run every stage & compare against the reference numbers"
    )
    reproduce_parser.add_argument(
        "--skip-simulation",
        action="store_true",
        help="Do not run the direct simulation stage"
    )

    return arg_parser


def _load_sim_config(parsed_args: Namespace, wave_eps: float) -> SimConfig:
    overrides: dict[str, object] = {
        key: value
        for key, value
        in (
            ("t_end", parsed_args.t_end),
            ("nx", parsed_args.nx),
            ("dt", parsed_args.dt)
        )
        if value is not None
    }

    if parsed_args.sim_config_file_path is not None:
        if overrides or parsed_args.amplitude is not None:
            BOTH_SIM_SOURCES_MESSAGE: Final[str] = (
                "--sim-config cannot be combined with --t-end, --nx, --dt or --amplitude"
            )
            raise ImproperlyConfiguredError(BOTH_SIM_SOURCES_MESSAGE)

        sim_config_file_path: Path = parsed_args.sim_config_file_path
        if not sim_config_file_path.is_file():
            raise MissingInputError(path=sim_config_file_path)
        if "json" not in config.identify_tags_from_path(sim_config_file_path):
            NOT_JSON_MESSAGE: Final[str] = f"{sim_config_file_path} is not a JSON file"
            raise ImproperlyConfiguredError(NOT_JSON_MESSAGE)

        return SimConfig.model_validate_json(sim_config_file_path.read_text(encoding="utf-8"))

    if parsed_args.amplitude is not None:
        overrides["perturbation"] = {"amplitude": parsed_args.amplitude}

    return SimConfig.model_validate({"eps": wave_eps, **overrides})


def _resolve_blocks(parsed_args: Namespace, command: Command) -> dict[str, CommandBlock]:
    match command:
        case Command.WAVE:
            return {
                "wave": WaveConfig(
                    eps=parsed_args.eps,
                    L=parsed_args.length,
                    N=parsed_args.nodes,
                    c_guess=parsed_args.c_guess
                )
            }
        case Command.ESSENTIAL:
            return {
                "essential": EssentialConfig(
                    k_range=parsed_args.k_range,
                    n=parsed_args.n,
                    **({"probes": parsed_args.probes} if parsed_args.probes else {})
                )
            }
        case Command.EVANS:
            return {
                "contour": ContourConfig(
                    radius=parsed_args.radius,
                    detour_radius=parsed_args.detour_radius
                )
            }
        case Command.WINDING:
            return {"localization": LocalizationConfig(box=parsed_args.box)}
        case Command.FAST:
            return {"scan": ScanConfig(interval=parsed_args.interval, n=parsed_args.n)}
        case Command.SLOW:
            return {
                "scan": SlowScanConfig(
                    interval=parsed_args.interval,
                    n=parsed_args.n,
                    section_U=parsed_args.section
                )
            }

    return {}


def _load_profile(wave_file_path: Path | None, default_eps: float, output_directory_path: Path) -> WaveProfile:  # noqa: E501
    return reports.load_wave_profile(
        wave_file_path
        if wave_file_path is not None
        else output_directory_path / wave_filename(default_eps)
    )


def _run_command(parsed_args: Namespace, run_config: RunConfig, params: ModelParams) -> StageOutcome:  # noqa: E501, PLR0911
    output_directory_path: Path = run_config.output_dir
    workers: int = settings["THREADS"]
    command: Command = run_config.command

    match command:
        case Command.WAVE:
            wave_block: WaveConfig = run_config.blocks["wave"]  # type: ignore[assignment]
            return run_stage(
                command,
                lambda: pipeline.wave_stage(wave_block, params, output_directory_path)
            )

        case Command.ESSENTIAL:
            essential_params: ModelParams = params
            if parsed_args.wave_file_path is not None:
                profile: WaveProfile = reports.load_wave_profile(parsed_args.wave_file_path)
                essential_params = params.with_wave(eps=profile.eps, c=profile.c)
            essential_block: EssentialConfig = run_config.blocks["essential"]  # type: ignore[assignment]  # noqa: E501
            return run_stage(
                command,
                lambda: pipeline.essential_stage(
                    essential_block,
                    essential_params,
                    output_directory_path
                )
            )

        case Command.EVANS:
            evans_profile: WaveProfile = _load_profile(
                parsed_args.wave_file_path,
                params.eps,
                output_directory_path
            )
            contour_block: ContourConfig = run_config.blocks["contour"]  # type: ignore[assignment]  # noqa: E501
            return run_stage(
                command,
                lambda: pipeline.evans_stage(
                    contour_block,
                    evans_profile,
                    params,
                    output_directory_path,
                    workers=workers
                )
            )

        case Command.WINDING:
            winding_profile: WaveProfile = _load_profile(
                parsed_args.wave_file_path,
                params.eps,
                output_directory_path
            )
            localization_block: LocalizationConfig = run_config.blocks["localization"]  # type: ignore[assignment]  # noqa: E501
            return run_stage(
                command,
                lambda: pipeline.winding_stage(
                    localization_block,
                    winding_profile,
                    params,
                    output_directory_path,
                    workers=workers
                )
            )

        case Command.FAST:
            fast_profile: WaveProfile | None = (
                reports.load_wave_profile(parsed_args.wave_file_path)
                if parsed_args.wave_file_path is not None
                else None
            )
            scan_block: ScanConfig = run_config.blocks["scan"]  # type: ignore[assignment]
            return run_stage(
                command,
                lambda: pipeline.fast_stage(
                    scan_block,
                    fast_profile,
                    params,
                    output_directory_path,
                    workers=workers,
                    output_format=run_config.format
                )
            )

        case Command.SLOW:
            slow_block: SlowScanConfig = run_config.blocks["scan"]  # type: ignore[assignment]
            return run_stage(
                command,
                lambda: pipeline.slow_stage(
                    slow_block,
                    params,
                    output_directory_path,
                    workers=workers,
                    output_format=run_config.format,
                    path_lambda=parsed_args.path_lambda
                )
            )

        case Command.SIMULATE:
            simulation_profile: WaveProfile = _load_profile(
                parsed_args.wave_file_path,
                pipeline.SIMULATION_EPS,
                output_directory_path
            )
            sim_block: SimConfig = run_config.blocks["simulation"]  # type: ignore[assignment]
            return run_stage(
                command,
                lambda: pipeline.simulate_stage(
                    sim_block,
                    simulation_profile,
                    params,
                    output_directory_path
                )
            )

        case Command.REPRODUCE_ALL:
            return pipeline.reproduce_all(
                params,
                output_directory_path,
                workers=workers,
                output_format=run_config.format,
                simulate=not parsed_args.skip_simulation
            )

        case _:
            assert_never(command)


def _package_version() -> str:
    try:
        return importlib.metadata.version(PACKAGE_NAME)
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


def _write_manifest(run_config: RunConfig, argv: Sequence[str], status: str, outputs: Sequence[Path]) -> None:  # noqa: E501
    manifest_path: Path = run_config.output_dir / MANIFEST_FILENAME
    reports.write_json(
        reports.Manifest(
            command=run_config.command,
            status=status,
            argv=list(argv),
            config=run_config.model_dump(mode="json"),
            settings=settings.as_dict(),
            outputs=[str(path) for path in outputs],
            package_version=_package_version()
        ),
        manifest_path
    )
    logging.info(f"Wrote the run manifest to {manifest_path}")


def _resolve_run_config(parsed_args: Namespace) -> tuple[RunConfig, ModelParams]:
    model_config: ModelConfig = (
        config.load_model_config(parsed_args.model_config_file_path)
        if parsed_args.model_config_file_path is not None
        else ModelConfig()
    )
    command: Command = Command(parsed_args.command)
    blocks: dict[str, CommandBlock] = _resolve_blocks(parsed_args, command)

    if command is Command.SIMULATE:
        wave_eps: float = (
            reports.read_json(
                parsed_args.wave_file_path.with_suffix(".json"),
                reports.WaveSidecar
            ).eps
            if parsed_args.wave_file_path is not None
            else pipeline.SIMULATION_EPS
        )
        blocks["simulation"] = _load_sim_config(parsed_args, wave_eps)

    return (
        RunConfig(
            command=command,
            model=model_config,
            blocks=blocks,
            output_dir=settings["OUTPUT_DIRECTORY_PATH"],
            format=parsed_args.format
        ),
        model_config.to_params()
    )


def run(argv: Sequence[str] | None = None) -> int:
    """Run the Shockfront Stability tool as a CLI tool with argument parsing."""
    arg_parser: ArgumentParser = set_up_arg_parser()

    parsed_args: Namespace = arg_parser.parse_args(argv)

    verbosity: int = -1 if parsed_args.quiet else parsed_args.verbosity + 1
    force_env_variables: bool = bool(
        parsed_args.force_env_variables
        or os.getenv("SHOCKFRONT_FORCE_ENV_VARIABLES", "").lower() in config.TRUE_VALUES
    )

    run_config: RunConfig | None = None
    outputs: list[Path] = []

    e: ImproperlyConfiguredError | ValidationError | NumericalError
    try:
        config.run_setup(
            threads=parsed_args.threads,
            output_directory_path=(
                Path(parsed_args.output_directory_path)
                if parsed_args.output_directory_path is not None
                else None
            ),
            force_env_variables=force_env_variables,
            verbosity=verbosity
        )

        run_config, params = _resolve_run_config(parsed_args)

        with SuppressTraceback(settings["VERBOSITY"]):
            outcome: StageOutcome = _run_command(parsed_args, run_config, params)
        outputs = outcome.outputs

        logging.info(
            f"Command {run_config.command!r} wrote {len(outputs)} artifact(s) "
            f"to {run_config.output_dir}"
        )
        _write_manifest(run_config, argv or sys.argv[1:], "success", outputs)

    except (ImproperlyConfiguredError, ValidationError) as e:
        if run_config is not None:
            _write_manifest(run_config, argv or sys.argv[1:], "config_error", outputs)
        arg_parser.error(str(e))
        return 2

    except NumericalError as e:
        logging.error(str(e))  # noqa: TRY400
        if run_config is not None:
            _write_manifest(run_config, argv or sys.argv[1:], "numerical_failure", outputs)
        return NUMERICAL_FAILURE_EXIT_CODE

    return 0
