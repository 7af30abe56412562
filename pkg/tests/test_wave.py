"""Tests of the singular orbit, the end-state linearization and the wave BVP."""

from collections.abc import Sequence

__all__: Sequence[str] = ()

import numpy as np
import pytest
from numpy.testing import assert_allclose

from shockfront_stability.exceptions import ImproperlyConfiguredError, SingularFlowError
from shockfront_stability.model import singular_geometry
from shockfront_stability.wave import (
    EquilibriumData,
    SingularOrbit,
    WaveProfile,
    equilibria_and_linearization,
    layer_shock_profile,
    layer_shock_trajectory,
    linear_matrix,
    reduced_flow_rhs,
    singular_orbit,
    singular_wavespeed,
    solve_wave_bvp,
)

SINGULAR_WAVESPEED: float = 0.1968109995


def test_reduced_flow_is_singular_on_the_folds() -> None:
    with pytest.raises(SingularFlowError):
        reduced_flow_rhs(7 / 12, 0.1, 0.2)


def test_reduced_flow_rhs_away_from_the_folds() -> None:
    dU: float  # noqa: N806
    dP: float  # noqa: N806
    dU, dP = reduced_flow_rhs(0.0, 0.5, 0.2)  # noqa: N806

    assert dU == pytest.approx(0.5 / (21 / 8))
    assert dP == 0.0


def test_singular_wavespeed() -> None:
    assert singular_wavespeed() == pytest.approx(SINGULAR_WAVESPEED, abs=1e-7)


def test_singular_orbit_meets_across_the_shock() -> None:
    orbit: SingularOrbit = singular_orbit()
    geometry = singular_geometry()

    assert abs(orbit.matching_residual) < 1e-6
    assert orbit.right_slow[0, 0] == pytest.approx(1.0, abs=1e-6)
    assert orbit.right_slow[-1, 0] == pytest.approx(geometry.u_plus)
    assert orbit.left_slow[0, 0] == pytest.approx(geometry.u_minus)
    assert orbit.left_slow[-1, 0] == pytest.approx(0.0, abs=1e-6)
    assert orbit.right_zeta[-1] == 0.0
    assert orbit.left_zeta[0] == 0.0


def test_layer_shock_profile_joins_the_jump_values() -> None:
    geometry = singular_geometry()
    shock: np.ndarray = layer_shock_profile(geometry.v_star, 101)

    assert shock.shape == (101, 2)
    assert_allclose(shock[0], (geometry.u_plus, 0.0), atol=1e-12)
    assert_allclose(shock[-1], (geometry.u_minus, 0.0), atol=1e-6)
    assert np.all(shock[:, 1] <= 0.0)


def test_layer_shock_trajectory_is_centred_on_the_inflection() -> None:
    geometry = singular_geometry()
    xi: np.ndarray
    uw: np.ndarray
    xi, uw = layer_shock_trajectory(n_points=401)

    assert uw[np.argmin(np.abs(xi)), 0] == pytest.approx(geometry.u_inflection)
    assert uw[0, 0] == pytest.approx(geometry.u_plus, abs=1e-3)
    assert uw[-1, 0] == pytest.approx(geometry.u_minus, abs=1e-3)
    assert np.all(np.diff(uw[np.abs(xi) < 10, 0]) < 0)


@pytest.mark.parametrize("end", ("minus", "plus"))
def test_end_states_are_stationary(end: str) -> None:
    equilibria: EquilibriumData = equilibria_and_linearization(1e-4, 0.19686, 1.0)
    state: np.ndarray = equilibria.q_minus if end == "minus" else equilibria.q_plus

    assert equilibria.signature(end) == ("-", "-", "+", "+")  # type: ignore[arg-type]
    assert state[0] == (0.0 if end == "minus" else 1.0)


def test_eigenvectors_diagonalize_the_end_matrix() -> None:
    lam: complex = 0.3 + 0.2j
    equilibria: EquilibriumData = equilibria_and_linearization(1e-2, 0.2, lam)
    matrix: np.ndarray = linear_matrix(1.0, lam, 1e-2, 0.2)

    assert_allclose(
        matrix @ equilibria.eigvecs_plus,
        equilibria.eigvecs_plus * equilibria.eigvals_plus,
        atol=1e-8
    )
    assert np.all(np.diff(equilibria.eigvals_plus.real) <= 0)
    assert_allclose(np.linalg.norm(equilibria.eigvecs_plus, axis=0), 1.0)


def test_linearization_needs_positive_eps() -> None:
    with pytest.raises(ImproperlyConfiguredError):
        equilibria_and_linearization(0.0, 0.2, 1.0)


def test_wave_profile_requires_zero_on_the_grid() -> None:
    zeta: np.ndarray = np.linspace(-1.0, 1.0, 10)

    with pytest.raises(ValueError, match="contain 0"):
        WaveProfile(zeta=zeta, U=zeta, W=zeta, P=zeta, V=zeta, c=0.2, eps=1e-2)


def test_wave_profile_clamps_outside_its_domain(front_profile: WaveProfile) -> None:
    assert front_profile.u_bar(-100.0) == 1.0
    assert front_profile.u_bar(100.0) == 0.0
    assert front_profile.u_bar(0.0) == pytest.approx(0.5)
    assert front_profile.L == pytest.approx(10.0)
    assert front_profile.N == 401


def test_wave_bvp_rejects_eps_outside_continuation_range() -> None:
    with pytest.raises(ImproperlyConfiguredError):
        solve_wave_bvp(0.1)


@pytest.mark.slow
def test_wave_at_eps_1e2(wave_eps_1e2: WaveProfile) -> None:
    assert wave_eps_1e2.residuals["left_vector_field"] < 1e-6
    assert wave_eps_1e2.residuals["right_vector_field"] < 1e-6
    assert wave_eps_1e2.c == pytest.approx(SINGULAR_WAVESPEED, abs=2e-2)
    assert wave_eps_1e2.u_bar(0.0) == pytest.approx(singular_geometry().u_inflection)


@pytest.mark.slow
def test_wave_at_eps_1e4(wave_eps_1e4: WaveProfile) -> None:
    assert wave_eps_1e4.c == pytest.approx(0.19686, abs=2e-4)
    assert wave_eps_1e4.residuals["left_vector_field"] < 1e-6
    assert wave_eps_1e4.residuals["right_vector_field"] < 1e-6
    assert abs(wave_eps_1e4.c - SINGULAR_WAVESPEED) < 1e-3
