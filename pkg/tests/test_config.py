"""Tests of model-file parsing and of the settings resolved from the environment."""

from collections.abc import Sequence

__all__: Sequence[str] = ()

from pathlib import Path

import pytest

from shockfront_stability import config
from shockfront_stability.config import ModelConfig, load_model_config, parse_model_config
from shockfront_stability.exceptions import (
    ImproperlyConfiguredError,
    MissingInputError,
    UnknownConfigKeyError,
)
from shockfront_stability.model import ALTERNATE_F_COEFFS


def test_parse_model_config() -> None:
    model_config: ModelConfig = parse_model_config(
        {"eps": "1e-3", "c": " 0.2 ", "R_coeffs": "0,-1,6,-5"}
    )

    assert model_config.eps == 1e-3
    assert model_config.c == 0.2
    assert model_config.R_coeffs == (0.0, -1.0, 6.0, -5.0)


def test_unknown_key_is_named() -> None:
    with pytest.raises(UnknownConfigKeyError, match="'epsilon'"):
        parse_model_config({"epsilon": "1e-3"})


@pytest.mark.parametrize(("raw_value", "expected"), (("yes", True), ("OFF", False), ("1", True)))  # noqa: E501
def test_boolean_values(raw_value: str, expected: bool) -> None:  # noqa: FBT001
    assert parse_model_config({"use_paper_eq2_D": raw_value}).use_paper_eq2_D is expected


def test_alternate_diffusion_from_the_model_file() -> None:
    params = parse_model_config({"use_paper_eq2_D": "true"}).to_params()

    assert params.F_coeffs == ALTERNATE_F_COEFFS


@pytest.mark.parametrize(
    "raw_values",
    (
        {"use_paper_eq2_D": "maybe"},
        {"eps": "1e-3,2e-3"},
        {"eps": "small"},
        {"eps": ""},
        {"eps": None},
        {"eps": "-1"},
        {"F_coeffs": "0,1,2"}
    )
)
def test_invalid_model_values(raw_values: dict[str, str | None]) -> None:
    with pytest.raises(ImproperlyConfiguredError):
        parse_model_config(raw_values)


def test_load_model_config(tmp_path: Path) -> None:
    path: Path = tmp_path / "model.txt"
    path.write_text("# regularized model\neps=1e-3\nc=0.195\n", encoding="utf-8")

    model_config: ModelConfig = load_model_config(path)

    assert (model_config.eps, model_config.c) == (1e-3, 0.195)


def test_load_missing_model_config(tmp_path: Path) -> None:
    with pytest.raises(MissingInputError):
        load_model_config(tmp_path / "absent.txt")


def test_settings_defaults() -> None:
    config.run_setup(
        threads=None,
        output_directory_path=None,
        force_env_variables=False,
        verbosity=1
    )

    assert config.IS_ENV_VARIABLES_SETUP
    assert config.settings["THREADS"] == 1
    assert config.settings.OUTPUT_DIRECTORY_PATH == Path("shockfront-output")
    assert config.settings["LOG_LEVEL"] == "WARNING"


def test_forced_environment_variables(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    monkeypatch.setenv("SHOCKFRONT_THREADS", "3")
    monkeypatch.setenv("SHOCKFRONT_OUTPUT_DIR", str(tmp_path / "results"))
    monkeypatch.setenv("LOG_LEVEL", "info")

    config.run_setup(
        threads=8,
        output_directory_path=Path("ignored"),
        force_env_variables=True,
        verbosity=1
    )

    assert config.settings.THREADS == 3
    assert config.settings.OUTPUT_DIRECTORY_PATH == tmp_path / "results"
    assert config.settings.LOG_LEVEL == "INFO"


def test_invalid_thread_count() -> None:
    with pytest.raises(ImproperlyConfiguredError, match="SHOCKFRONT_THREADS"):
        config.run_setup(
            threads=0,
            output_directory_path=None,
            force_env_variables=False,
            verbosity=1
        )


def test_invalid_log_level(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("LOG_LEVEL", "LOUD")

    with pytest.raises(ImproperlyConfiguredError, match="LOG_LEVEL"):
        config.run_setup(
            threads=None,
            output_directory_path=None,
            force_env_variables=True,
            verbosity=1
        )


def test_unknown_settings_key() -> None:
    with pytest.raises(KeyError, match="not a valid settings key"):
        config.settings["NOT_A_SETTING"]
