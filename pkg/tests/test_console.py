"""Tests of the command-line surface: exit codes, error reporting and run manifests."""

from collections.abc import Sequence

__all__: Sequence[str] = ()

import json
from pathlib import Path

import pytest

from shockfront_stability import console, pipeline
from shockfront_stability.config import WaveConfig
from shockfront_stability.exceptions import ConvergenceError
from shockfront_stability.model import ModelParams
from shockfront_stability.pipeline import StageOutcome


def _manifest(output_dir: Path) -> dict[str, object]:
    manifest: dict[str, object] = json.loads(
        (output_dir / "manifest.json").read_text(encoding="utf-8")
    )
    return manifest


def test_parser_defaults() -> None:
    parsed_args = console.set_up_arg_parser().parse_args(["slow"])

    assert tuple(parsed_args.interval) == (-2.0, 0.5)
    assert parsed_args.section == pytest.approx(0.4)
    assert parsed_args.format == "json"


def test_quiet_and_verbose_are_exclusive() -> None:
    with pytest.raises(SystemExit) as exc_info:
        console.run(["essential", "-q", "-v"])

    assert exc_info.value.code == 2


def test_invalid_eps_is_a_config_error(capsys: pytest.CaptureFixture[str]) -> None:
    with pytest.raises(SystemExit) as exc_info:
        console.run(["wave", "--eps", "0.5"])

    assert exc_info.value.code == 2
    assert "eps" in capsys.readouterr().err


def test_unknown_model_key_is_named(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:  # noqa: E501
    model_file: Path = tmp_path / "model.txt"
    model_file.write_text("epsilon=1e-4\n", encoding="utf-8")

    with pytest.raises(SystemExit) as exc_info:
        console.run(["essential", "--config", str(model_file)])

    assert exc_info.value.code == 2
    assert "epsilon" in capsys.readouterr().err


def test_essential_command_writes_its_artifacts(output_dir: Path) -> None:
    exit_code: int = console.run(
        ["essential", "--n", "21", "--probe", "1", "--probe", "-5", "--output-dir", str(output_dir)]  # noqa: E501
    )

    assert exit_code == 0
    assert (output_dir / "fredholm_borders.csv").is_file()

    essential: dict[str, object] = json.loads(
        (output_dir / "essential_spectrum.json").read_text(encoding="utf-8")
    )
    assert essential["abscissa"] == pytest.approx(-1.0)
    assert [region["name"] for region in essential["regions"]] == ["Omega", "A4"]  # type: ignore[attr-defined]

    manifest: dict[str, object] = _manifest(output_dir)
    assert manifest["status"] == "success"
    assert manifest["command"] == "essential"
    assert len(manifest["outputs"]) == 2  # type: ignore[arg-type]


def test_missing_wave_is_a_config_error(output_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:  # noqa: E501
    with pytest.raises(SystemExit) as exc_info:
        console.run(["evans", "--output-dir", str(output_dir)])

    assert exc_info.value.code == 2
    assert "wave_eps1e-04.csv" in capsys.readouterr().err
    assert _manifest(output_dir)["status"] == "config_error"


def test_numerical_failure_exit_code(monkeypatch: pytest.MonkeyPatch, output_dir: Path) -> None:  # noqa: E501
    def failing_wave_stage(_block: WaveConfig, _params: ModelParams, _output_dir: Path) -> StageOutcome:  # noqa: E501
        raise ConvergenceError(solver="wave BVP", reason="singular Jacobian")

    monkeypatch.setattr(pipeline, "wave_stage", failing_wave_stage)

    exit_code: int = console.run(["wave", "--output-dir", str(output_dir)])

    assert exit_code == 3
    assert _manifest(output_dir)["status"] == "numerical_failure"


def test_sim_config_file_excludes_overrides(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:  # noqa: E501
    sim_config_file: Path = tmp_path / "sim.json"
    sim_config_file.write_text('{"t_end": 1.0}', encoding="utf-8")

    with pytest.raises(SystemExit) as exc_info:
        console.run(["simulate", "--sim-config", str(sim_config_file), "--nx", "101"])

    assert exc_info.value.code == 2
    assert "--sim-config" in capsys.readouterr().err


@pytest.mark.slow
def test_slow_command(output_dir: Path) -> None:
    exit_code: int = console.run(["slow", "--output-dir", str(output_dir)])
    eigenvalues: list[float] = json.loads(
        (output_dir / "slow_eigenvalues.json").read_text(encoding="utf-8")
    )["eigenvalues"]

    assert exit_code == 0
    assert min(abs(value) for value in eigenvalues) < 1e-4
    assert min(abs(value + 0.80031) for value in eigenvalues) < 1e-3
    assert (output_dir / "slow_paths_lambda100.csv").is_file()
