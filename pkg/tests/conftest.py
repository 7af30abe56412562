"""Shared fixtures of the test suite."""

from collections.abc import Sequence

__all__: Sequence[str] = ()

from collections.abc import Iterator
from pathlib import Path

import numpy as np
import pytest

from shockfront_stability import config
from shockfront_stability.model import DEFAULT_MODEL_PARAMS, ModelParams
from shockfront_stability.wave import WaveProfile, solve_wave_bvp


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> Iterator[None]:
    """Resolve settings afresh in every test, away from any .env file of the checkout."""
    monkeypatch.chdir(tmp_path)
    variable_name: str
    for variable_name in (
        "LOG_LEVEL",
        "SHOCKFRONT_THREADS",
        "SHOCKFRONT_OUTPUT_DIR",
        "SHOCKFRONT_FORCE_ENV_VARIABLES"
    ):
        monkeypatch.delenv(variable_name, raising=False)

    config.reset_settings()
    yield
    config.reset_settings()


@pytest.fixture
def default_params() -> ModelParams:
    return DEFAULT_MODEL_PARAMS


@pytest.fixture
def output_dir(tmp_path: Path) -> Path:
    return tmp_path / "output"


@pytest.fixture
def front_profile() -> WaveProfile:
    """A smooth tanh front from U = 1 to U = 0, standing in for a computed wave."""
    zeta: np.ndarray = 0.05 * np.arange(-200, 201)
    U: np.ndarray = 0.5 * (1 - np.tanh(zeta))  # noqa: N806
    return WaveProfile(
        zeta=zeta,
        U=U,
        W=-0.5 / np.cosh(zeta) ** 2,
        P=0.2 * U,
        V=U ** 2,
        c=0.2,
        eps=1e-2
    )


@pytest.fixture(scope="session")
def wave_eps_1e2() -> WaveProfile:
    return solve_wave_bvp(1e-2)


@pytest.fixture(scope="session")
def wave_eps_1e4() -> WaveProfile:
    return solve_wave_bvp(1e-4)
