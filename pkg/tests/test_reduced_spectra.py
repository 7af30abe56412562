"""Tests of the fast and slow reduced eigenvalue problems and the jump map."""

from collections.abc import Sequence

__all__: Sequence[str] = ()

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate, linalg

from shockfront_stability import reduced_spectra
from shockfront_stability.exceptions import (
    DegenerateJumpError,
    ImproperlyConfiguredError,
    SingularFlowError,
)
from shockfront_stability.model import (
    DEFAULT_MODEL_PARAMS,
    SingularGeometry,
    singular_geometry,
)
from shockfront_stability.reduced_spectra import (
    FastClassification,
    FastProbeResult,
    JumpMapData,
    ProjectivePathSlow,
    SlowEvansFunction,
    fast_connection_probe,
    fast_probe_root_scan,
    fast_reduced_rhs,
    find_slow_eigenvalues,
    jump_map,
    projectivized_full_rhs,
    slow_end_eigendirection,
    slow_evans_eval,
    slow_linear_rhs,
    slow_path_projective,
)
from shockfront_stability.wave import WaveProfile, linear_matrix, singular_wavespeed

C0: float = 0.1968109995
RNG_SEED: int = 20_240_617


def _jump_base(geometry: SingularGeometry) -> tuple[float, float, float, float]:
    return geometry.u_plus, 0.31, geometry.u_minus, 0.24


def test_fast_reduced_problem_ignores_lambda() -> None:
    assert fast_reduced_rhs(1.0, 2.0, 0.0) == (2.0, pytest.approx(21 / 8))


def test_projectivized_flow_is_the_quotient_of_the_linear_flow() -> None:
    eps: float = 1e-2
    c: float = 0.2
    lam: complex = 3.0 - 0.5j
    ubar: float = 0.6
    x: np.ndarray = np.array([0.7 + 0.1j, -0.3, 0.2 + 0.4j, 1.1])

    # On the fast scale the linear matrix is ε times its slow-scale counterpart.
    x_dot: np.ndarray = eps * linear_matrix(ubar, lam, eps, c) @ x
    expected: np.ndarray = x_dot[1:] / x[0] - (x[1:] / x[0]) * x_dot[0] / x[0]

    assert_allclose(projectivized_full_rhs(x[1:] / x[0], ubar, lam, eps, c), expected, rtol=1e-12)  # noqa: E501


def _projectivized_flow(_xi: float, beta: np.ndarray, ubar: float, lam: complex, eps: float, c: float) -> np.ndarray:  # noqa: E501
    return projectivized_full_rhs(beta, ubar, lam, eps, c)


def test_projectivized_flow_tracks_the_linear_flow_over_intervals() -> None:
    rng: np.random.Generator = np.random.default_rng(RNG_SEED)
    eps: float = 1e-2
    c: float = 0.2

    for _ in range(20):
        lam: complex = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        ubar: float = rng.uniform(0.0, 1.0)
        length: float = rng.uniform(0.01, 0.1)
        x0: np.ndarray = np.concatenate(
            ([1.0], rng.uniform(-1.0, 1.0, 3) + 1j * rng.uniform(-1.0, 1.0, 3))
        )

        x_end: np.ndarray = linalg.expm(length * eps * linear_matrix(ubar, lam, eps, c)) @ x0
        solution = integrate.solve_ivp(
            _projectivized_flow,
            (0.0, length),
            x0[1:],
            method="DOP853",
            args=(ubar, lam, eps, c),
            rtol=1e-12,
            atol=1e-14
        )

        assert_allclose(solution.y[:, -1], x_end[1:] / x_end[0], rtol=1e-8, atol=1e-10)


def _slow_linear_flow(U: float, y: np.ndarray, lam: complex) -> np.ndarray:  # noqa: N803
    """Carry (P̄, P, V) along U: the reduced wave with the slow linear problem on top."""
    base_velocity: complex = y[0] - C0 * U
    diffusivity: float = float(DEFAULT_MODEL_PARAMS.D(U))
    dP: complex  # noqa: N806
    dV: complex  # noqa: N806
    dP, dV = slow_linear_rhs(y[1], y[2], U, lam, C0)  # noqa: N806
    return np.array(
        [-float(DEFAULT_MODEL_PARAMS.R(U)), dP, dV],
        dtype=complex
    ) * diffusivity / base_velocity


def test_slow_projective_flow_tracks_the_linear_flow_over_intervals() -> None:
    rng: np.random.Generator = np.random.default_rng(RNG_SEED)

    for _ in range(20):
        lam: complex = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        u_start: float = rng.uniform(0.92, 0.98)
        span: tuple[float, float] = (u_start, u_start - rng.uniform(0.01, 0.1))
        p_bar: complex = complex(C0 * u_start - 1.0)
        S0: complex = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7))  # noqa: N806

        linear = integrate.solve_ivp(
            _slow_linear_flow,
            span,
            np.array([p_bar, S0, 1.0], dtype=complex),
            method="DOP853",
            args=(lam,),
            rtol=1e-12,
            atol=1e-14
        )
        projective = integrate.solve_ivp(
            reduced_spectra._slow_rhs,  # noqa: SLF001
            span,
            np.array([p_bar, S0], dtype=complex),
            method="DOP853",
            args=(True, lam, C0, DEFAULT_MODEL_PARAMS),
            rtol=1e-12,
            atol=1e-14
        )

        assert projective.y[0, -1] == pytest.approx(linear.y[0, -1], rel=1e-9)
        assert projective.y[1, -1] == pytest.approx(linear.y[1, -1] / linear.y[2, -1], rel=1e-8)  # noqa: E501


@pytest.mark.parametrize("unstable", (True, False))
def test_slow_end_eigendirection_is_an_eigenvector(unstable: bool) -> None:  # noqa: FBT001
    lam: complex = 0.5 + 0.2j
    S: complex = slow_end_eigendirection(1.0, lam, C0, unstable=unstable)  # noqa: N806

    dP: complex  # noqa: N806
    dV: complex  # noqa: N806
    dP, dV = slow_linear_rhs(S, 1.0, 1.0, lam, C0)  # noqa: N806

    # (S, 1) is an eigenvector, so both components grow at the same rate μ.
    assert dP / S == pytest.approx(dV)
    assert (dV.real > 0) is unstable


def test_slow_linear_problem_is_singular_on_the_folds() -> None:
    with pytest.raises(SingularFlowError):
        slow_linear_rhs(1.0, 1.0, 3 / 4, 0.0, C0)


def test_jump_map_entries() -> None:
    geometry: SingularGeometry = singular_geometry()
    base: tuple[float, float, float, float] = _jump_base(geometry)
    lam: complex = -0.3 + 0.1j
    jump: JumpMapData = jump_map(lam, geometry, base, C0)

    velocity_plus: float = 0.31 - C0 * geometry.u_plus
    velocity_minus: float = 0.24 - C0 * geometry.u_minus
    R = DEFAULT_MODEL_PARAMS.R  # noqa: N806

    assert jump.entries[0, 0] == 1.0
    assert jump.entries[1, 0] == 0.0
    assert jump.entries[1, 1] == pytest.approx(velocity_minus / velocity_plus)
    assert jump.entries[0, 1] == pytest.approx(
        (R(geometry.u_plus) - R(geometry.u_minus) - lam * (geometry.u_plus - geometry.u_minus))
        / velocity_plus
    )


def test_projective_jump_agrees_with_the_linear_one() -> None:
    geometry: SingularGeometry = singular_geometry()
    jump: JumpMapData = jump_map(0.4, geometry, _jump_base(geometry), C0)
    S: complex = 1.3 - 0.7j  # noqa: N806

    P: complex  # noqa: N806
    V: complex  # noqa: N806
    P, V = jump.apply(S, 1.0)  # noqa: N806

    assert jump.apply_projective(S) == pytest.approx(P / V)
    assert jump.apply_projective_inverse(jump.apply_projective(S)) == pytest.approx(S)


def test_jump_map_with_vanishing_velocity() -> None:
    geometry: SingularGeometry = singular_geometry()
    base: tuple[float, float, float, float] = (
        geometry.u_plus,
        C0 * geometry.u_plus,
        geometry.u_minus,
        0.24
    )

    with pytest.raises(DegenerateJumpError):
        jump_map(0.0, geometry, base, C0)


def test_jump_map_rejects_other_base_states() -> None:
    geometry: SingularGeometry = singular_geometry()

    with pytest.raises(ValueError, match="jump values"):
        jump_map(0.0, geometry, (0.9, 0.31, geometry.u_minus, 0.24), C0)


def test_slow_section_must_lie_on_a_slow_segment() -> None:
    with pytest.raises(ImproperlyConfiguredError):
        SlowEvansFunction(C0, section_U=0.7)


def test_slow_scan_left_of_the_essential_spectrum_is_empty() -> None:
    assert find_slow_eigenvalues((-3.0, -2.0), 10, C0) == []


def test_fast_probe_needs_positive_eps() -> None:
    with pytest.raises(ImproperlyConfiguredError):
        fast_connection_probe(0.0, 0.0)


def test_fast_probe_on_the_layer_shock() -> None:
    result: FastProbeResult = fast_connection_probe(0.0, 1e-4, n_points=201)

    assert result.classification in FastClassification
    assert math.isfinite(result.E_f.real)
    assert result.unstable_path.xi_grid.size == 201
    assert result.stable_path.xi_grid[0] == pytest.approx(0.0)
    assert result.stable_path.xi_grid[-1] == pytest.approx(40.0)


@pytest.mark.slow
def test_slow_eigenvalues() -> None:
    eigenvalues: list[float] = find_slow_eigenvalues((-2.0, 0.5), 200, singular_wavespeed())

    assert len(eigenvalues) == 2
    assert abs(slow_evans_eval(0.0, singular_wavespeed())) < 1e-6
    assert min(abs(value) for value in eigenvalues) < 1e-4
    assert min(abs(value + 0.80031) for value in eigenvalues) < 1e-3


@pytest.mark.slow
def test_slow_eigenvalues_do_not_depend_on_the_section() -> None:
    c0: float = singular_wavespeed()
    on_left: list[float] = find_slow_eigenvalues((-0.9, 0.2), 60, c0, section_U=0.3)
    on_right: list[float] = find_slow_eigenvalues((-0.9, 0.2), 60, c0, section_U=0.9)

    assert_allclose(on_left, on_right, atol=1e-6)


@pytest.mark.slow
def test_slow_paths_cover_both_segments() -> None:
    paths: list[ProjectivePathSlow] = slow_path_projective(100.0, singular_wavespeed(), n_points=50)  # noqa: E501

    assert {path.segment for path in paths} == {"right_forward", "left_forward", "left_backward"}  # noqa: E501
    assert all(path.U.size == 50 for path in paths)


@pytest.mark.slow
def test_fast_root_of_the_full_probe(wave_eps_1e4: WaveProfile) -> None:
    roots: list[tuple[float, complex]] = fast_probe_root_scan((0.0, 5000.0), 200, profile=wave_eps_1e4)  # noqa: E501
    root: float
    gap: complex
    root, gap = min(roots, key=lambda pair: abs(pair[0] - 3718.025))

    assert len(roots) == 1
    assert root == pytest.approx(3718.025, rel=1e-2)
    assert gap.real == pytest.approx(-5.08, abs=0.1)
    assert fast_connection_probe(root, profile=wave_eps_1e4).classification is (
        FastClassification.UNSTABLE_TO_UNSTABLE
    )
