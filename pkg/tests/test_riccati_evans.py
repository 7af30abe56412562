"""Tests of the chart Riccati equation and the Riccati-Evans function."""

from collections.abc import Sequence

__all__: Sequence[str] = ()

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from shockfront_stability.exceptions import ChartFailureError, ImproperlyConfiguredError
from shockfront_stability.model import DEFAULT_MODEL_PARAMS
from shockfront_stability.riccati_evans import (
    BlockSystem,
    ChartTransform,
    Direction,
    RiccatiEvansFunction,
    RiccatiTrajectory,
    clip_to_omega,
    init_eigenplane,
    integrate_riccati,
    large_half_disc_contour,
    localize_spectrum,
)
from shockfront_stability.wave import WaveProfile
from shockfront_stability.winding import SearchBox, SpectralReport, winding_number

RNG_SEED: int = 20_240_617


def _random_chart_matrix() -> np.ndarray:
    rng: np.random.Generator = np.random.default_rng(RNG_SEED)
    return rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))


def test_riccati_rhs_follows_the_linear_flow(front_profile: WaveProfile) -> None:
    system: BlockSystem = BlockSystem(front_profile, 0.4 + 0.3j)
    W: np.ndarray = _random_chart_matrix()  # noqa: N806
    zeta: float = 0.37

    Z: np.ndarray = np.vstack((np.eye(2), W))  # noqa: N806
    Z_dot: np.ndarray = system.matrix(zeta) @ Z  # noqa: N806

    assert_allclose(system.riccati_rhs(zeta, W), Z_dot[2:] - W @ Z_dot[:2], rtol=1e-12)


def test_riccati_jacobian_matches_finite_differences(front_profile: WaveProfile) -> None:
    system: BlockSystem = BlockSystem(front_profile, 1.5 - 0.2j)
    W: np.ndarray = _random_chart_matrix()  # noqa: N806
    zeta: float = -0.8
    step: float = 1e-6

    finite_difference: np.ndarray = np.empty((4, 4), dtype=complex)
    column: int
    for column in range(4):
        perturbation: np.ndarray = np.zeros(4, dtype=complex)
        perturbation[column] = step
        forward: np.ndarray = system.riccati_rhs(zeta, W + perturbation.reshape(2, 2))
        backward: np.ndarray = system.riccati_rhs(zeta, W - perturbation.reshape(2, 2))
        finite_difference[:, column] = ((forward - backward) / (2 * step)).ravel()

    assert_allclose(system.riccati_jacobian(zeta, W), finite_difference, rtol=1e-6, atol=1e-6)  # noqa: E501


@pytest.mark.parametrize(
    ("direction", "zeta"),
    ((Direction.UNSTABLE_FORWARD, -100.0), (Direction.STABLE_BACKWARD, 100.0))
)
def test_end_eigenplanes_are_riccati_equilibria(front_profile: WaveProfile, direction: Direction, zeta: float) -> None:  # noqa: E501
    lam: complex = 0.5 + 1j
    W0: np.ndarray = init_eigenplane(direction, lam, front_profile.eps, front_profile.c)  # noqa: N806
    system: BlockSystem = BlockSystem(front_profile, lam)

    assert np.linalg.norm(system.riccati_rhs(zeta, W0)) < 1e-8 * (1 + np.linalg.norm(W0)) ** 2 * 100  # noqa: E501


def test_chart_round_trip() -> None:
    chart: ChartTransform = ChartTransform()
    W: np.ndarray = _random_chart_matrix()  # noqa: N806

    assert_allclose(chart.to_chart(chart.from_chart(W)), W, rtol=1e-12)


def test_chart_must_be_unimodular() -> None:
    with pytest.raises(ImproperlyConfiguredError):
        ChartTransform(2 * np.eye(4, dtype=complex))


def test_plane_off_the_chart() -> None:
    chart: ChartTransform = ChartTransform()
    frame: np.ndarray = chart.T_inv @ np.vstack((np.zeros((2, 2)), np.eye(2)))

    with pytest.raises(ChartFailureError):
        chart.to_chart(frame)


def test_clip_to_omega_moves_the_left_edge() -> None:
    clipped: SearchBox = clip_to_omega(SearchBox(-2.0, 0.1, -0.5, 0.5), DEFAULT_MODEL_PARAMS)

    assert clipped.re_min == pytest.approx(-0.95)
    assert (clipped.re_max, clipped.im_min, clipped.im_max) == (0.1, -0.5, 0.5)


def test_clip_to_omega_keeps_boxes_inside_omega() -> None:
    search: SearchBox = SearchBox(-0.5, 0.1, -0.5, 0.5)

    assert clip_to_omega(search, DEFAULT_MODEL_PARAMS) is search


def test_clip_to_omega_rejects_boxes_inside_the_essential_spectrum() -> None:
    with pytest.raises(ImproperlyConfiguredError):
        clip_to_omega(SearchBox(-3.0, -2.0, -0.5, 0.5), DEFAULT_MODEL_PARAMS)


@pytest.mark.slow
def test_no_unstable_eigenvalues(wave_eps_1e4: WaveProfile) -> None:
    assert winding_number(RiccatiEvansFunction(wave_eps_1e4), large_half_disc_contour()) == 0


@pytest.mark.slow
def test_point_spectrum_near_the_origin(wave_eps_1e4: WaveProfile) -> None:
    report: SpectralReport = localize_spectrum(SearchBox(-2.0, 0.1, -0.5, 0.5), wave_eps_1e4)
    roots: list[complex] = [point.center for point in report.roots]
    poles: list[complex] = [point.center for point in report.poles]

    assert len(roots) == 2
    assert len(poles) == 1
    assert min(abs(root) for root in roots) < 1e-2
    assert min(report.roots, key=lambda point: abs(point.center)).index >= 1
    assert min(abs(root + 0.80031) for root in roots) < 5e-3
    assert min(abs(pole + 0.29) for pole in poles) < 1e-2


def _linear_flow_quotient(system: BlockSystem, W0: np.ndarray, span: tuple[float, float]) -> np.ndarray:  # noqa: E501, N803
    """Carry the frame [I; W0] along the linear flow and return Y·X⁻¹ at the span's end."""
    solution = integrate.solve_ivp(
        lambda zeta, y: (system.matrix(zeta) @ y.reshape(4, 2)).ravel(),
        span,
        np.vstack((np.eye(2), W0)).ravel().astype(complex),
        method="DOP853",
        rtol=1e-12,
        atol=1e-14
    )
    Z: np.ndarray = solution.y[:, -1].reshape(4, 2)  # noqa: N806
    return Z[2:] @ np.linalg.inv(Z[:2])


@pytest.mark.slow
def test_riccati_trajectories_are_quotients_of_the_linear_flow(front_profile: WaveProfile) -> None:  # noqa: E501
    rng: np.random.Generator = np.random.default_rng(RNG_SEED)
    directions: tuple[Direction, Direction] = (
        Direction.UNSTABLE_FORWARD,
        Direction.STABLE_BACKWARD
    )

    for _ in range(20):
        lam: complex = complex(rng.uniform(0.0, 1.0), rng.uniform(-1.0, 1.0))
        trajectory: RiccatiTrajectory = integrate_riccati(
            front_profile, lam, directions[int(rng.integers(2))]
        )
        zeta: np.ndarray = trajectory.zeta_grid
        norms: np.ndarray = np.linalg.norm(trajectory.W, axis=(1, 2))
        starts: np.ndarray = np.flatnonzero(
            (np.abs(np.diff(zeta)) <= 0.1) & (norms[:-1] < 1e3) & (norms[1:] < 1e3)
        )
        start: int = int(rng.choice(starts))
        end: int = int(np.flatnonzero(np.abs(zeta - zeta[start]) <= 0.1)[-1])

        assert_allclose(
            _linear_flow_quotient(
                BlockSystem(front_profile, lam),
                trajectory.W[start],
                (float(zeta[start]), float(zeta[end]))
            ),
            trajectory.W[end],
            rtol=1e-6,
            atol=1e-9
        )
