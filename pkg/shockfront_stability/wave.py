"""
Construction of the shock-fronted travelling wave.

The singular orbit is assembled from the two slow segments of the reduced flow and the
equal-area shock of the layer problem; its wavespeed c0 is found by shooting. The wave for
ε > 0 is the solution of the four-dimensional boundary-value problem on [-L, L], posed with
projection boundary conditions and the phase condition U(0) = u_inflection, and reached by
continuation in ε from 1e-2.
"""

from collections.abc import Sequence

__all__: Sequence[str] = (
    "DEFAULT_HALF_DOMAIN",
    "WaveProfile",
    "SingularOrbit",
    "EquilibriumData",
    "reduced_flow_rhs",
    "singular_matching_residual",
    "singular_wavespeed",
    "singular_orbit",
    "layer_shock_profile",
    "layer_shock_trajectory",
    "linear_matrix",
    "equilibria_and_linearization",
    "solve_wave_bvp",
    "continue_wave",
    "wavespeed_table"
)

import functools
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Final, Literal

import numpy as np
from scipy import integrate, interpolate, linalg, optimize

from shockfront_stability.exceptions import (
    ConvergenceError,
    ImproperlyConfiguredError,
    NoSignChangeError,
    SingularFlowError,
)
from shockfront_stability.model import (
    DEFAULT_MODEL_PARAMS,
    FOLD_TOLERANCE,
    ModelParams,
    singular_geometry,
)

DEFAULT_HALF_DOMAIN: Final[float] = 50.0
DEFAULT_C_BRACKET: Final[tuple[float, float]] = (0.17, 0.22)
CONTINUATION_START_EPS: Final[float] = 1e-2
MANIFOLD_OFFSET: Final[float] = 1e-7
LAYER_HALF_WIDTH: Final[float] = 40.0
END_RESIDUAL_TOLERANCE: Final[float] = 1e-6
MAX_DOMAIN_DOUBLINGS: Final[int] = 2
EIGENVALUE_COLLISION_TOLERANCE: Final[float] = 1e-12

ODE_RTOL: Final[float] = 1e-12
ODE_ATOL: Final[float] = 1e-14


@dataclass(frozen=True)
class WaveProfile:
    """
    Discretized heteroclinic orbit (U, W, P, V) on a slow ζ-grid.

    The grid is strictly increasing and contains ζ = 0, where the wave crosses the section
    U = u_inflection. U decreases from 1 (ζ = -L) to 0 (ζ = L).
    """

    zeta: np.ndarray
    U: np.ndarray
    W: np.ndarray
    P: np.ndarray
    V: np.ndarray
    c: float
    eps: float
    residuals: dict[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        """Check that the grid is increasing, contains 0 and matches every component."""
        component_name: str
        for component_name in ("U", "W", "P", "V"):
            if getattr(self, component_name).shape != self.zeta.shape:
                SHAPE_MISMATCH_MESSAGE: Final[str] = (
                    f"Wave component {component_name} does not match the ζ-grid shape "
                    f"{self.zeta.shape}"
                )
                raise ValueError(SHAPE_MISMATCH_MESSAGE)

        GRID_IS_VALID: Final[bool] = bool(
            self.zeta.ndim == 1
            and self.zeta.size >= 4  # noqa: PLR2004
            and np.all(np.diff(self.zeta) > 0)
            and np.any(self.zeta == 0.0)
        )
        if not GRID_IS_VALID:
            INVALID_GRID_MESSAGE: Final[str] = (
                "The ζ-grid of a wave profile must be strictly increasing and contain 0"
            )
            raise ValueError(INVALID_GRID_MESSAGE)

    @property
    def L(self) -> float:  # noqa: N802
        return float(max(-self.zeta[0], self.zeta[-1]))

    @property
    def N(self) -> int:  # noqa: N802
        return int(self.zeta.size)

    @functools.cached_property
    def U_spline(self) -> interpolate.CubicSpline:  # noqa: N802
        return interpolate.CubicSpline(self.zeta, self.U, extrapolate=False)

    def u_bar(self, zeta: float | np.ndarray) -> float | np.ndarray:
        """Return the spline-interpolated U at `zeta`, clamped to the end states outside."""
        clipped: np.ndarray = np.clip(zeta, self.zeta[0], self.zeta[-1])
        values: np.ndarray = self.U_spline(clipped)
        values = np.where(np.asarray(zeta) < self.zeta[0], 1.0, values)
        values = np.where(np.asarray(zeta) > self.zeta[-1], 0.0, values)
        return float(values) if np.ndim(values) == 0 else values

    def state_at(self, zeta: float) -> np.ndarray:
        """Return the linearly interpolated state (U, W, P, V) at `zeta`."""
        return np.array(
            [
                np.interp(zeta, self.zeta, component)
                for component
                in (self.U, self.W, self.P, self.V)
            ]
        )


@dataclass(frozen=True)
class SingularOrbit:
    """
    Singular heteroclinic orbit: two slow segments joined by the equal-area shock.

    `right_slow` runs from U = 1 down to u_plus (ζ ≤ 0), `left_slow` from u_minus down to 0
    (ζ ≥ 0); both hold (U, P) rows and their slow times are `right_zeta` / `left_zeta`.
    """

    right_zeta: np.ndarray
    right_slow: np.ndarray
    left_zeta: np.ndarray
    left_slow: np.ndarray
    shock: np.ndarray
    c0: float

    @property
    def jump_P(self) -> tuple[float, float]:
        """Return P at the end of the right segment and at the start of the left segment."""
        return float(self.right_slow[-1, 1]), float(self.left_slow[0, 1])

    @property
    def matching_residual(self) -> float:
        p_right: float
        p_left: float
        p_right, p_left = self.jump_P
        return p_right - p_left


@dataclass(frozen=True)
class EquilibriumData:
    """
    End states of the wave and the spectra of the linear system there.

    `q_minus` is the state U = 0 and `q_plus` the state U = 1. Eigenvalues are sorted by
    decreasing real part (μ1, ..., μ4) and the eigenvector columns follow the same order.
    """

    lam: complex
    eps: float
    c: float
    q_minus: np.ndarray
    q_plus: np.ndarray
    eigvals_minus: np.ndarray
    eigvals_plus: np.ndarray
    eigvecs_minus: np.ndarray
    eigvecs_plus: np.ndarray

    def eigen(self, end: Literal["minus", "plus"]) -> tuple[np.ndarray, np.ndarray]:
        if end == "minus":
            return self.eigvals_minus, self.eigvecs_minus
        return self.eigvals_plus, self.eigvecs_plus

    def signature(self, end: Literal["minus", "plus"]) -> tuple[str, ...]:
        """Return the signs of the real parts, in ascending order (e.g. ('-','-','+','+'))."""
        eigvals: np.ndarray
        eigvals, _ = self.eigen(end)
        return tuple("-" if mu.real < 0 else "+" for mu in eigvals[::-1])


def reduced_flow_rhs(U: float, P: float, c: float, params: ModelParams = DEFAULT_MODEL_PARAMS) -> tuple[float, float]:  # noqa: E501
    """Return (dU/dζ, dP/dζ) = ((P - cU)/D(U), -R(U)) of the reduced slow flow."""
    diffusivity: float = float(params.D(U))
    if abs(diffusivity) < FOLD_TOLERANCE:
        raise SingularFlowError(u=float(U), diffusivity=diffusivity)

    return (P - c * U) / diffusivity, -float(params.R(U))


def _reduced_flow_jacobian(U: float, c: float, params: ModelParams) -> np.ndarray:
    diffusivity: float = float(params.D(U))
    return np.array(
        [
            [-c / diffusivity, 1 / diffusivity],
            [-float(params.Rprime(U)), 0.0]
        ]
    )


def _saddle_direction(jacobian: np.ndarray, *, unstable: bool, u_sign: int) -> np.ndarray:
    eigvals: np.ndarray
    eigvecs: np.ndarray
    eigvals, eigvecs = np.linalg.eig(jacobian)
    index: int = int(np.argmax(eigvals.real) if unstable else np.argmin(eigvals.real))
    direction: np.ndarray = eigvecs[:, index].real
    direction /= np.linalg.norm(direction)
    if np.sign(direction[0]) != u_sign:
        direction = -direction
    return direction


def _level_event(level: float) -> Callable[[float, np.ndarray], float]:
    def event(_zeta: float, y: np.ndarray) -> float:
        return float(y[0] - level)

    event.terminal = True  # type: ignore[attr-defined]
    event.direction = 0  # type: ignore[attr-defined]
    return event


def _integrate_slow_segment(c: float, params: ModelParams, *, side: Literal["right", "left"], dense: bool = False) -> integrate.OdeSolution | np.ndarray:  # noqa: E501
    u_minus: float
    u_plus: float
    geometry = singular_geometry(params)
    u_minus, u_plus = geometry.u_minus, geometry.u_plus

    start: np.ndarray
    target: float
    t_bound: float
    if side == "right":
        start = np.array([1.0, c]) + MANIFOLD_OFFSET * _saddle_direction(
            _reduced_flow_jacobian(1.0, c, params),
            unstable=True,
            u_sign=-1
        )
        target = u_plus
        t_bound = 500.0
    else:
        start = MANIFOLD_OFFSET * _saddle_direction(
            _reduced_flow_jacobian(0.0, c, params),
            unstable=False,
            u_sign=1
        )
        target = u_minus
        t_bound = -500.0

    solution = integrate.solve_ivp(
        lambda _zeta, y: reduced_flow_rhs(y[0], y[1], c, params),
        (0.0, t_bound),
        start,
        method="DOP853",
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        events=_level_event(target),
        dense_output=dense
    )
    if solution.status != 1:
        MISSED_JUMP_MESSAGE: Final[str] = (
            f"The {side} slow segment never reached its jump value U={target:.12g} "
            f"(c={c:.12g})"
        )
        raise ConvergenceError(solver="reduced-flow shooting", reason=MISSED_JUMP_MESSAGE)

    if dense:
        return solution
    return solution.y_events[0][0]


def singular_matching_residual(c: float, params: ModelParams = DEFAULT_MODEL_PARAMS) -> float:
    """Return P_right(u_plus) - P_left(u_minus) for the reduced flow at wavespeed `c`."""
    right_end: np.ndarray = _integrate_slow_segment(c, params, side="right")  # type: ignore[assignment]  # noqa: E501
    left_end: np.ndarray = _integrate_slow_segment(c, params, side="left")  # type: ignore[assignment]  # noqa: E501
    return float(right_end[1] - left_end[1])


def singular_wavespeed(c_bracket: tuple[float, float] = DEFAULT_C_BRACKET, params: ModelParams = DEFAULT_MODEL_PARAMS, *, xtol: float = 1e-12) -> float:  # noqa: E501
    """
    Return the singular wavespeed c0 at which the two slow segments meet across the shock.

    The right segment leaves Q+ = (1, c) along its unstable direction until U = u_plus; the
    left segment arrives at Q- = (0, 0) along its stable direction from U = u_minus.
    """
    residuals: tuple[float, float] = (
        singular_matching_residual(c_bracket[0], params),
        singular_matching_residual(c_bracket[1], params)
    )
    if residuals[0] * residuals[1] >= 0:
        raise NoSignChangeError(bracket=c_bracket, values=residuals)

    c0: float
    result: optimize.RootResults
    c0, result = optimize.brentq(
        singular_matching_residual,
        *c_bracket,
        args=(params,),
        xtol=xtol,
        full_output=True
    )
    if not result.converged:
        raise ConvergenceError(solver="singular wavespeed shooting", reason=result.flag)

    logging.debug(
        f"Singular wavespeed c0={c0:.12f} after {result.function_calls} residual evaluations"
    )
    return float(c0)


def layer_shock_profile(v_star: float, n_points: int, params: ModelParams = DEFAULT_MODEL_PARAMS) -> np.ndarray:  # noqa: E501
    """
    Return the equal-area shock as rows (u, w) running from (u_plus, 0) to (u_minus, 0).

    The heteroclinic lies on the level set H(u, w) = w²/2 - G(u) + v_star·u = H(u_plus, 0)
    of the layer problem, so w = -√(2(G(u) - v_star·u - K)) with K = G(u_plus) - v_star·u_plus.
    """
    if n_points < 2:  # noqa: PLR2004
        TOO_FEW_POINTS_MESSAGE: Final[str] = "A shock profile needs at least 2 points"
        raise ValueError(TOO_FEW_POINTS_MESSAGE)

    roots: np.ndarray = np.sort((params.F - v_star).roots().real)
    u_minus: float = float(roots[0])
    u_plus: float = float(roots[-1])
    K: float = float(params.G(u_plus) - v_star * u_plus)  # noqa: N806

    endpoint_mismatch: float = float(params.G(u_minus) - v_star * u_minus - K)
    if abs(endpoint_mismatch) > 1e-10:  # noqa: PLR2004
        NOT_EQUAL_AREA_MESSAGE: Final[str] = (
            f"v_star={v_star!r} is not an equal-area level: "
            f"H(u_minus, 0) - H(u_plus, 0) = {-endpoint_mismatch:.3e}"
        )
        raise ValueError(NOT_EQUAL_AREA_MESSAGE)

    u: np.ndarray = np.linspace(u_plus, u_minus, n_points)
    w: np.ndarray = -np.sqrt(np.maximum(2 * (params.G(u) - v_star * u - K), 0.0))
    return np.column_stack((u, w))


def layer_shock_trajectory(params: ModelParams = DEFAULT_MODEL_PARAMS, *, xi_half_width: float = LAYER_HALF_WIDTH, n_points: int = 801) -> tuple[np.ndarray, np.ndarray]:  # noqa: E501
    """
    Return the shock as a function of the fast variable ξ, with ū(0) = u_inflection.

    The layer problem u' = w, w' = F(u) - v_star is integrated both ways from the section.
    Returns `(xi, uw)` where `uw` has rows (u, w).
    """
    geometry = singular_geometry(params)
    v_star: float = geometry.v_star
    u_section: float = geometry.u_inflection
    K: float = float(params.G(geometry.u_plus) - v_star * geometry.u_plus)  # noqa: N806
    w_section: float = -math.sqrt(
        max(2 * float(params.G(u_section) - v_star * u_section - K), 0.0)
    )

    def layer_rhs(_xi: float, y: np.ndarray) -> np.ndarray:
        return np.array([y[1], float(params.F(y[0])) - v_star])

    xi_forward: np.ndarray = np.linspace(0.0, xi_half_width, n_points // 2 + 1)
    forward = integrate.solve_ivp(
        layer_rhs,
        (0.0, xi_half_width),
        [u_section, w_section],
        method="DOP853",
        t_eval=xi_forward,
        rtol=ODE_RTOL,
        atol=ODE_ATOL
    )
    backward = integrate.solve_ivp(
        layer_rhs,
        (0.0, -xi_half_width),
        [u_section, w_section],
        method="DOP853",
        t_eval=-xi_forward,
        rtol=ODE_RTOL,
        atol=ODE_ATOL
    )

    xi: np.ndarray = np.concatenate((backward.t[::-1], forward.t[1:]))
    uw: np.ndarray = np.concatenate((backward.y[:, ::-1], forward.y[:, 1:]), axis=1).T
    return xi, uw


def singular_orbit(params: ModelParams = DEFAULT_MODEL_PARAMS, c0: float | None = None, *, n_shock_points: int = 201) -> SingularOrbit:  # noqa: E501
    """Assemble the singular orbit, with the jump placed at ζ = 0."""
    if c0 is None:
        c0 = singular_wavespeed(params=params)

    right = integrate.solve_ivp(
        lambda _zeta, y: reduced_flow_rhs(y[0], y[1], c0, params),
        (0.0, 500.0),
        np.array([1.0, c0]) + MANIFOLD_OFFSET * _saddle_direction(
            _reduced_flow_jacobian(1.0, c0, params),
            unstable=True,
            u_sign=-1
        ),
        method="DOP853",
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        events=_level_event(singular_geometry(params).u_plus)
    )
    left = integrate.solve_ivp(
        lambda _zeta, y: reduced_flow_rhs(y[0], y[1], c0, params),
        (0.0, -500.0),
        MANIFOLD_OFFSET * _saddle_direction(
            _reduced_flow_jacobian(0.0, c0, params),
            unstable=False,
            u_sign=1
        ),
        method="DOP853",
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        events=_level_event(singular_geometry(params).u_minus)
    )
    if right.status != 1 or left.status != 1:
        raise ConvergenceError(
            solver="reduced-flow shooting",
            reason="a slow segment did not reach its jump value"
        )

    right_zeta: np.ndarray = np.append(right.t, right.t_events[0][0]) - right.t_events[0][0]
    right_slow: np.ndarray = np.vstack((right.y.T, right.y_events[0][0]))

    # Backward-time samples, reordered so that ζ increases from the jump (ζ = 0) onwards.
    left_zeta: np.ndarray = (np.append(left.t, left.t_events[0][0]) - left.t_events[0][0])[::-1]  # noqa: E501
    left_slow: np.ndarray = np.vstack((left.y.T, left.y_events[0][0]))[::-1]

    return SingularOrbit(
        right_zeta=right_zeta,
        right_slow=right_slow,
        left_zeta=left_zeta,
        left_slow=left_slow,
        shock=layer_shock_profile(singular_geometry(params).v_star, n_shock_points, params),
        c0=c0
    )


def linear_matrix(u_bar: float, lam: complex, eps: float, c: float, params: ModelParams = DEFAULT_MODEL_PARAMS) -> np.ndarray:  # noqa: E501
    """Return the 4×4 matrix of the linear eigenvalue problem at `u_bar` (slow ζ-scale)."""
    return np.array(
        [
            [0, 1 / eps, 0, 0],
            [float(params.D(u_bar)) / eps, 0, 0, -1 / eps],
            [lam - float(params.Rprime(u_bar)), 0, 0, 0],
            [-c, 0, 1, 0]
        ],
        dtype=complex
    )


def _normalized_eigen(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    eigvals: np.ndarray
    eigvecs: np.ndarray
    eigvals, eigvecs = linalg.eig(matrix)
    order: np.ndarray = np.argsort(-eigvals.real, kind="stable")
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    column: int
    for column in range(eigvecs.shape[1]):
        vector: np.ndarray = eigvecs[:, column] / np.linalg.norm(eigvecs[:, column])
        pivot: int = int(np.argmax(np.abs(vector) > 1e-12 * np.abs(vector).max()))
        eigvecs[:, column] = vector * (abs(vector[pivot]) / vector[pivot])

    gaps: np.ndarray = np.abs(eigvals[:, None] - eigvals[None, :])[np.triu_indices(4, k=1)]
    if gaps.min() < EIGENVALUE_COLLISION_TOLERANCE:
        logging.warning(
            "Degenerate splitting: two spatial eigenvalues collide "
            f"(minimum gap {gaps.min():.3e})"
        )

    return eigvals, eigvecs


def equilibria_and_linearization(eps: float, c: float, lam: complex, params: ModelParams = DEFAULT_MODEL_PARAMS) -> EquilibriumData:  # noqa: E501
    """Return both end states with the sorted, normalized spectra of the linearization."""
    if eps <= 0:
        NON_POSITIVE_EPS_MESSAGE: Final[str] = (
            f"The end-state linearization needs eps > 0 (got {eps})"
        )
        raise ImproperlyConfiguredError(NON_POSITIVE_EPS_MESSAGE)

    eigvals_minus: np.ndarray
    eigvecs_minus: np.ndarray
    eigvals_minus, eigvecs_minus = _normalized_eigen(linear_matrix(0.0, lam, eps, c, params))
    eigvals_plus: np.ndarray
    eigvecs_plus: np.ndarray
    eigvals_plus, eigvecs_plus = _normalized_eigen(linear_matrix(1.0, lam, eps, c, params))

    return EquilibriumData(
        lam=complex(lam),
        eps=eps,
        c=c,
        q_minus=np.zeros(4),
        q_plus=np.array([1.0, 0.0, c, float(params.F(1.0))]),
        eigvals_minus=eigvals_minus,
        eigvals_plus=eigvals_plus,
        eigvecs_minus=eigvecs_minus,
        eigvecs_plus=eigvecs_plus
    )


def _wave_rhs(y: np.ndarray, c: float, eps: float, params: ModelParams) -> np.ndarray:
    U: np.ndarray  # noqa: N806
    W: np.ndarray  # noqa: N806
    P: np.ndarray  # noqa: N806
    V: np.ndarray  # noqa: N806
    U, W, P, V = y  # noqa: N806
    return np.array([W / eps, (params.F(U) - V) / eps, -params.R(U), P - c * U])


def _wave_jacobian(y: np.ndarray, c: float, eps: float, params: ModelParams) -> np.ndarray:
    m: int = y.shape[1]
    jacobian: np.ndarray = np.zeros((4, 4, m))
    jacobian[0, 1] = 1 / eps
    jacobian[1, 0] = params.D(y[0]) / eps
    jacobian[1, 3] = -1 / eps
    jacobian[2, 0] = -params.Rprime(y[0])
    jacobian[3, 0] = -c
    jacobian[3, 2] = 1.0
    return jacobian


def _projection_rows(jacobian: np.ndarray, *, keep: Literal["stable", "unstable"]) -> np.ndarray:  # noqa: E501
    """
    Return 2 real rows annihilating the complementary eigenspace of `jacobian`.

    A deviation lies in the unstable subspace iff it is orthogonal to the left eigenvectors
    of the stable eigenvalues (and symmetrically).
    """
    eigvals: np.ndarray
    left_eigvecs: np.ndarray
    eigvals, left_eigvecs = linalg.eig(jacobian, left=True, right=False)
    order: np.ndarray = np.argsort(eigvals.real)
    annihilated: np.ndarray = order[2:] if keep == "stable" else order[:2]
    rows: np.ndarray = left_eigvecs[:, annihilated].conj().T

    if np.allclose(rows.imag, 0.0, atol=1e-12):
        return rows.real
    return np.vstack((rows[0].real, rows[0].imag))


def _shock_graded_mesh(eps: float, L: float, n_nodes: int) -> np.ndarray:  # noqa: N803
    """Return a τ-mesh on [0, 1], densified at both ends (the shock at ζ = 0)."""
    shock_offsets: np.ndarray = np.concatenate(
        (
            np.linspace(0.0, 10 * eps, max(int(2 / eps ** 0.25), 50)),
            np.geomspace(10 * eps, L / 2, max(n_nodes // 4, 50))
        )
    ) / L
    tau: np.ndarray = np.unique(
        np.concatenate((np.linspace(0.0, 1.0, n_nodes), shock_offsets, 1.0 - shock_offsets))
    )
    return tau[(tau >= 0.0) & (tau <= 1.0)]


def _singular_initial_guess(zeta: np.ndarray, eps: float, params: ModelParams, orbit: SingularOrbit) -> np.ndarray:  # noqa: E501
    geometry = singular_geometry(params)
    xi: np.ndarray
    uw: np.ndarray
    xi, uw = layer_shock_trajectory(params)

    u_layer: np.ndarray = np.interp(zeta / eps, xi, uw[:, 0], left=geometry.u_plus, right=geometry.u_minus)  # noqa: E501
    w_layer: np.ndarray = np.interp(zeta / eps, xi, uw[:, 1], left=0.0, right=0.0)

    right_side: np.ndarray = zeta <= 0
    u_slow: np.ndarray = np.where(
        right_side,
        np.interp(zeta, orbit.right_zeta, orbit.right_slow[:, 0], left=1.0),
        np.interp(zeta, orbit.left_zeta, orbit.left_slow[:, 0], right=0.0)
    )
    p_slow: np.ndarray = np.where(
        right_side,
        np.interp(zeta, orbit.right_zeta, orbit.right_slow[:, 1], left=orbit.c0),
        np.interp(zeta, orbit.left_zeta, orbit.left_slow[:, 1], right=0.0)
    )
    U: np.ndarray = u_slow + u_layer - np.where(right_side, geometry.u_plus, geometry.u_minus)  # noqa: E501, N806

    return np.vstack((U, w_layer, p_slow, params.F(u_slow)))


def _profile_initial_guess(zeta: np.ndarray, profile: WaveProfile) -> np.ndarray:
    return np.vstack(
        [
            np.interp(zeta, profile.zeta, component)
            for component
            in (profile.U, profile.W, profile.P, profile.V)
        ]
    )


def _solve_wave_bvp_once(eps: float, L: float, n_nodes: int, c_guess: float, params: ModelParams, guess: Callable[[np.ndarray], np.ndarray], *, tol: float, max_nodes: int) -> WaveProfile:  # noqa: E501, N803
    tau: np.ndarray = _shock_graded_mesh(eps, L, n_nodes)
    zeta_left: np.ndarray = -L + L * tau
    zeta_right: np.ndarray = L * tau
    Y0: np.ndarray = np.vstack((guess(zeta_left), guess(zeta_right)))  # noqa: N806
    u_section: float = params.u_inflection
    F1: float = float(params.F(1.0))  # noqa: N806

    def fun(_tau: np.ndarray, Y: np.ndarray, p: np.ndarray) -> np.ndarray:  # noqa: N803
        return L * np.vstack(
            (_wave_rhs(Y[:4], p[0], eps, params), _wave_rhs(Y[4:], p[0], eps, params))
        )

    def fun_jac(_tau: np.ndarray, Y: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:  # noqa: E501, N803
        m: int = Y.shape[1]
        df_dy: np.ndarray = np.zeros((8, 8, m))
        df_dy[:4, :4] = L * _wave_jacobian(Y[:4], p[0], eps, params)
        df_dy[4:, 4:] = L * _wave_jacobian(Y[4:], p[0], eps, params)
        df_dp: np.ndarray = np.zeros((8, 1, m))
        df_dp[3, 0] = -L * Y[0]
        df_dp[7, 0] = -L * Y[4]
        return df_dy, df_dp

    def bc(ya: np.ndarray, yb: np.ndarray, p: np.ndarray) -> np.ndarray:
        c: float = p[0]
        q_plus: np.ndarray = np.array([1.0, 0.0, c, F1])
        unstable_rows: np.ndarray = _projection_rows(
            np.real(linear_matrix(1.0, 0.0, eps, c, params)),
            keep="unstable"
        )
        stable_rows: np.ndarray = _projection_rows(
            np.real(linear_matrix(0.0, 0.0, eps, c, params)),
            keep="stable"
        )
        return np.concatenate(
            (
                unstable_rows @ (ya[:4] - q_plus),
                stable_rows @ yb[4:],
                yb[:4] - ya[4:],
                [yb[0] - u_section]
            )
        )

    logging.debug(f"Solving the wave BVP at eps={eps:.3e} on [-{L}, {L}] with {tau.size} nodes")  # noqa: E501
    result = integrate.solve_bvp(
        fun,
        bc,
        tau,
        Y0,
        p=[c_guess],
        fun_jac=fun_jac,
        tol=tol,
        max_nodes=max_nodes
    )
    if not result.success:
        raise ConvergenceError(solver=f"wave BVP (eps={eps:.3e})", reason=result.message)

    tau_solution: np.ndarray = result.x
    Y: np.ndarray = result.y  # noqa: N806
    zeta: np.ndarray = np.concatenate((-L + L * tau_solution, L * tau_solution[1:]))
    states: np.ndarray = np.concatenate((Y[:4], Y[4:, 1:]), axis=1)
    c: float = float(result.p[0])

    left_end_residual: float = float(
        np.linalg.norm(_wave_rhs(states[:, :1], c, eps, params)[:, 0])
    )
    right_end_residual: float = float(
        np.linalg.norm(_wave_rhs(states[:, -1:], c, eps, params)[:, 0])
    )

    return WaveProfile(
        zeta=zeta,
        U=states[0],
        W=states[1],
        P=states[2],
        V=states[3],
        c=c,
        eps=eps,
        residuals={
            "left_vector_field": left_end_residual,
            "right_vector_field": right_end_residual,
            "left_state_distance": float(abs(states[0, 0] - 1.0)),
            "right_state_distance": float(abs(states[0, -1])),
            "max_rms_collocation": float(np.max(result.rms_residuals)),
            "phase_condition": float(abs(states[0, np.searchsorted(zeta, 0.0)] - u_section))
        }
    )


def solve_wave_bvp(eps: float, L: float = DEFAULT_HALF_DOMAIN, N: int = 2000, c_guess: float | None = None, params: ModelParams = DEFAULT_MODEL_PARAMS, *, initial: WaveProfile | None = None, tol: float = 1e-8, max_nodes: int = 400_000) -> WaveProfile:  # noqa: E501, N803
    """
    Solve the travelling-wave BVP for the wave and its wavespeed at regularization `eps`.

    Without an `initial` profile, the solve is reached by geometric continuation in ε from
    1e-2, starting from the singular orbit. The half-domain is doubled (at most twice) when
    the vector-field residual at either end exceeds 1e-6.
    """
    if not 0 < eps <= CONTINUATION_START_EPS:
        EPS_OUT_OF_RANGE_MESSAGE: Final[str] = (
            f"The wave BVP is posed for eps in (0, {CONTINUATION_START_EPS}] (got {eps})"
        )
        raise ImproperlyConfiguredError(EPS_OUT_OF_RANGE_MESSAGE)

    if initial is None:
        return continue_wave(eps, L=L, N=N, c_guess=c_guess, params=params, tol=tol, max_nodes=max_nodes)[-1]  # noqa: E501

    profile: WaveProfile = initial
    half_domain: float = L
    doubling: int
    for doubling in range(MAX_DOMAIN_DOUBLINGS + 1):
        previous: WaveProfile = profile
        profile = _solve_wave_bvp_once(
            eps,
            half_domain,
            N,
            previous.c if c_guess is None else c_guess,
            params,
            functools.partial(_profile_initial_guess, profile=previous),
            tol=tol,
            max_nodes=max_nodes
        )
        END_RESIDUALS_ARE_SMALL: bool = bool(
            profile.residuals["left_vector_field"] < END_RESIDUAL_TOLERANCE
            and profile.residuals["right_vector_field"] < END_RESIDUAL_TOLERANCE
        )
        if END_RESIDUALS_ARE_SMALL:
            break

        if doubling < MAX_DOMAIN_DOUBLINGS:
            logging.warning(
                f"Wave end residuals {profile.residuals["left_vector_field"]:.2e}, "
                f"{profile.residuals["right_vector_field"]:.2e} exceed "
                f"{END_RESIDUAL_TOLERANCE:.0e}; doubling L to {2 * half_domain}"
            )
            half_domain *= 2

    logging.info(f"Solved the wave at eps={eps:.3e}: c={profile.c:.8f}")
    return profile


def continue_wave(eps_target: float, *, L: float = DEFAULT_HALF_DOMAIN, N: int = 2000, c_guess: float | None = None, params: ModelParams = DEFAULT_MODEL_PARAMS, steps_per_decade: int = 2, tol: float = 1e-8, max_nodes: int = 400_000) -> list[WaveProfile]:  # noqa: E501, N803
    """
    Continue the wave from ε = 1e-2 down to `eps_target`, reusing each previous solution.

    The first solve starts from the singular orbit; returns every intermediate profile.
    """
    orbit: SingularOrbit = singular_orbit(params)
    n_steps: int = max(
        1,
        math.ceil(steps_per_decade * math.log10(CONTINUATION_START_EPS / eps_target)) + 1
    )
    eps_chain: np.ndarray = np.geomspace(CONTINUATION_START_EPS, eps_target, n_steps)

    profiles: list[WaveProfile] = [
        _solve_wave_bvp_once(
            float(eps_chain[0]),
            L,
            N,
            orbit.c0 if c_guess is None else c_guess,
            params,
            functools.partial(
                _singular_initial_guess,
                eps=float(eps_chain[0]),
                params=params,
                orbit=orbit
            ),
            tol=tol,
            max_nodes=max_nodes
        )
    ]

    eps: float
    for eps in eps_chain[1:]:
        profiles.append(
            solve_wave_bvp(
                float(eps),
                L=L,
                N=N,
                params=params,
                initial=profiles[-1],
                tol=tol,
                max_nodes=max_nodes
            )
        )

    return profiles


def wavespeed_table(eps_values: Sequence[float], params: ModelParams = DEFAULT_MODEL_PARAMS, **bvp_kwargs: object) -> list[tuple[float, float]]:  # noqa: E501
    """Return (ε, c(ε)) pairs for decreasing ε, each solve seeding the next."""
    ordered: list[float] = sorted(eps_values, reverse=True)
    table: list[tuple[float, float]] = []
    profile: WaveProfile | None = None

    eps: float
    for eps in ordered:
        profile = solve_wave_bvp(eps, params=params, initial=profile, **bvp_kwargs)  # type: ignore[arg-type]  # noqa: E501
        table.append((eps, profile.c))

    return table
