"""
Singular-limit eigenvalue problems: the fast reduced problem along the shock and the slow
reduced problem along the two slow segments, coupled by the jump map.

Both are followed projectively. The fast line bundle lives on the chart β = (w, p, v)/u of
CP³, with the complementary chart (u, p, v)/w when u passes through 0; the slow line bundle
lives on S = P/V, with T = V/P when V passes through 0.
"""

from collections.abc import Sequence

__all__: Sequence[str] = (
    "FastClassification",
    "ProjectivePathFast",
    "FastProbeResult",
    "JumpMapData",
    "SlowShootingState",
    "ProjectivePathSlow",
    "SlowEvansFunction",
    "FastProbeFunction",
    "DEFAULT_SLOW_SECTION",
    "fast_reduced_rhs",
    "projectivized_full_rhs",
    "fast_connection_probe",
    "fast_probe_root_scan",
    "slow_linear_rhs",
    "slow_end_eigendirection",
    "jump_map",
    "slow_evans_eval",
    "slow_path_projective",
    "find_slow_eigenvalues"
)

import enum
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Final

import numpy as np
from scipy import integrate, optimize

from shockfront_stability.exceptions import (
    ChartFailureError,
    ConvergenceError,
    DegenerateJumpError,
    ImproperlyConfiguredError,
    NumericalError,
    SingularFlowError,
)
from shockfront_stability.model import (
    DEFAULT_MODEL_PARAMS,
    FOLD_TOLERANCE,
    ModelParams,
    SingularGeometry,
    singular_geometry,
)
from shockfront_stability.spectrum_essential import essential_spectrum_abscissa
from shockfront_stability.utils import ordered_map
from shockfront_stability.wave import (
    MANIFOLD_OFFSET,
    SingularOrbit,
    WaveProfile,
    _reduced_flow_jacobian,
    _saddle_direction,
    layer_shock_trajectory,
    singular_orbit,
)

DEFAULT_SLOW_SECTION: Final[float] = 0.4
DEFAULT_FAST_HALF_WIDTH: Final[float] = 40.0
CHART_FLIP_THRESHOLD: Final[float] = 1e4
MAX_CHART_FLIPS: Final[int] = 100
TAIL_FRACTION: Final[float] = 0.1
SCAN_MARGIN: Final[float] = 0.05
DEGENERATE_JUMP_TOLERANCE: Final[float] = 1e-12

ODE_RTOL: Final[float] = 1e-10
ODE_ATOL: Final[float] = 1e-12


class FastClassification(enum.StrEnum):
    UNSTABLE_TO_UNSTABLE = "unstable_to_unstable"
    STABLE_TO_STABLE = "stable_to_stable"
    UNSTABLE_TO_STABLE = "unstable_to_stable"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class ProjectivePathFast:
    """Fast line-bundle path on the β-chart; β rows are NaN where u = 0 exactly."""

    xi_grid: np.ndarray
    beta: np.ndarray
    classification: FastClassification


@dataclass(frozen=True)
class FastProbeResult:
    lam: complex
    classification: FastClassification
    E_f: complex
    beta2_gap: complex
    unstable_path: ProjectivePathFast
    stable_path: ProjectivePathFast


@dataclass(frozen=True)
class JumpMapData:
    """
    Linear transport of slow data (P, V) across the shock.

    `base_states` holds (U_plus, P_plus, U_minus, P_minus) at the two jump endpoints.
    """

    lam: complex
    entries: np.ndarray
    base_states: tuple[float, float, float, float]

    def apply(self, P: complex, V: complex) -> tuple[complex, complex]:  # noqa: N803
        transported: np.ndarray = self.entries @ np.array([P, V], dtype=complex)
        return complex(transported[0]), complex(transported[1])

    def apply_projective(self, S: complex) -> complex:  # noqa: N803
        """Return the action S ↦ (S + j12)/j22 on the chart S = P/V."""
        return complex((S + self.entries[0, 1]) / self.entries[1, 1])

    def apply_projective_inverse(self, S: complex) -> complex:  # noqa: N803
        return complex(self.entries[1, 1] * S - self.entries[0, 1])


@dataclass(frozen=True)
class SlowShootingState:
    """Base reduced-wave state with the projective coordinate of the slow line bundle."""

    U: float
    P: float
    S: complex
    on_S_chart: bool = True


@dataclass(frozen=True)
class ProjectivePathSlow:
    """
    Slow line-bundle path sampled along U.

    `value` holds S = P/V where `on_S_chart` is set and T = V/P elsewhere.
    """

    segment: str
    U: np.ndarray
    value: np.ndarray
    on_S_chart: np.ndarray

    @property
    def S(self) -> np.ndarray:  # noqa: N802
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.on_S_chart, self.value, 1 / self.value)


@dataclass(frozen=True)
class _ChartPath:
    t: np.ndarray
    y: np.ndarray
    on_primary: np.ndarray
    final_y: np.ndarray
    final_on_primary: bool


def _swap_lead(y: np.ndarray, lead: slice) -> np.ndarray:
    """Move between the charts x and (1/x₁, x₂/x₁, ...) for the coordinates in `lead`."""
    swapped: np.ndarray = y.copy()
    block: np.ndarray = y[lead]
    swapped[lead] = np.concatenate(([1 / block[0]], block[1:] / block[0]))
    return swapped


def _integrate_on_charts(rhs: Callable[[float, np.ndarray, bool], np.ndarray], y0: np.ndarray, span: tuple[float, float], grid: np.ndarray, *, lead: slice, method: str = "DOP853", start_on_primary: bool = True) -> _ChartPath:  # noqa: E501
    """Integrate a projective flow, flipping chart whenever the lead coordinate exceeds 1e4."""

    def flip_event(_t: float, y: np.ndarray, *_args: object) -> float:
        return float(abs(y[lead][0]) - CHART_FLIP_THRESHOLD)

    flip_event.terminal = True  # type: ignore[attr-defined]
    flip_event.direction = 1  # type: ignore[attr-defined]

    direction: float = math.copysign(1.0, span[1] - span[0])
    t_start: float = span[0]
    y: np.ndarray = np.asarray(y0, dtype=complex)
    on_primary: bool = start_on_primary
    t_pieces: list[np.ndarray] = []
    y_pieces: list[np.ndarray] = []
    chart_pieces: list[np.ndarray] = []

    flip: int
    for flip in range(MAX_CHART_FLIPS + 1):
        solution = integrate.solve_ivp(
            rhs,
            (t_start, span[1]),
            y,
            method=method,
            args=(on_primary,),
            events=flip_event,
            dense_output=True,
            rtol=ODE_RTOL,
            atol=ODE_ATOL
        )
        if solution.status == -1:
            raise ConvergenceError(solver="projective shooting", reason=solution.message)

        t_stop: float = float(solution.t[-1])
        finished: bool = solution.status == 0
        in_piece: np.ndarray = (direction * (grid - t_start) >= 0) & (
            direction * (grid - t_stop) <= 0 if finished else direction * (grid - t_stop) < 0
        )
        if np.any(in_piece):
            t_pieces.append(grid[in_piece])
            y_pieces.append(solution.sol(grid[in_piece]).T)
            chart_pieces.append(np.full(int(in_piece.sum()), on_primary))

        y = solution.y[:, -1]
        if finished:
            break

        logging.debug(f"Chart flip {flip + 1} at t={t_stop:.8g}")
        y = _swap_lead(y, lead)
        on_primary = not on_primary
        t_start = t_stop
    else:
        TOO_MANY_FLIPS_MESSAGE: Final[str] = (
            f"The projective path needed more than {MAX_CHART_FLIPS} chart flips"
        )
        raise ChartFailureError(TOO_MANY_FLIPS_MESSAGE)

    return _ChartPath(
        t=np.concatenate(t_pieces) if t_pieces else np.empty(0),
        y=np.concatenate(y_pieces) if y_pieces else np.empty((0, y.size), dtype=complex),
        on_primary=np.concatenate(chart_pieces) if chart_pieces else np.empty(0, dtype=bool),
        final_y=y,
        final_on_primary=on_primary
    )


def fast_reduced_rhs(u: complex, w: complex, ubar: float, params: ModelParams = DEFAULT_MODEL_PARAMS) -> tuple[complex, complex]:  # noqa: E501
    """Return (w, D(ū)u): the fast reduced eigenvalue problem, in which λ does not appear."""
    return w, float(params.D(ubar)) * u


def projectivized_full_rhs(beta: np.ndarray, ubar: float, lam: complex, eps: float, c: float, params: ModelParams = DEFAULT_MODEL_PARAMS) -> np.ndarray:  # noqa: E501
    """Return the fast-scale linear flow quotiented to β = (w/u, p/u, v/u)."""
    beta1: complex
    beta2: complex
    beta3: complex
    beta1, beta2, beta3 = beta
    return np.array(
        [
            float(params.D(ubar)) - beta3 - beta1 ** 2,
            eps * (lam - float(params.Rprime(ubar))) - beta2 * beta1,
            eps * (beta2 - c) - beta3 * beta1
        ],
        dtype=complex
    )


def _projectivized_full_rhs_complementary(gamma: np.ndarray, ubar: float, lam: complex, eps: float, c: float, params: ModelParams) -> np.ndarray:  # noqa: E501
    """Return the same flow on the chart γ = (u/w, p/w, v/w)."""
    gamma1: complex
    gamma2: complex
    gamma3: complex
    gamma1, gamma2, gamma3 = gamma
    growth: complex = float(params.D(ubar)) * gamma1 - gamma3
    return np.array(
        [
            1 - gamma1 * growth,
            eps * (lam - float(params.Rprime(ubar))) * gamma1 - gamma2 * growth,
            eps * (gamma2 - c * gamma1) - gamma3 * growth
        ],
        dtype=complex
    )


def _fast_frozen_matrix(ubar: float, lam: complex, eps: float, c: float, params: ModelParams) -> np.ndarray:  # noqa: E501
    return np.array(
        [
            [0, 1, 0, 0],
            [float(params.D(ubar)), 0, 0, -1],
            [eps * (lam - float(params.Rprime(ubar))), 0, 0, 0],
            [-eps * c, 0, eps, 0]
        ],
        dtype=complex
    )


def _fast_eigendirection(ubar: float, lam: complex, eps: float, c: float, params: ModelParams, *, unstable: bool) -> np.ndarray:  # noqa: E501
    eigvals: np.ndarray
    eigvecs: np.ndarray
    eigvals, eigvecs = np.linalg.eig(_fast_frozen_matrix(ubar, lam, eps, c, params))
    index: int = int(np.argmax(eigvals.real) if unstable else np.argmin(eigvals.real))
    vector: np.ndarray = eigvecs[:, index]
    if abs(vector[0]) < 1e-14 * np.abs(vector).max():
        raise ChartFailureError(condition_number=math.inf)
    return vector[1:] / vector[0]


def _fast_base(profile: WaveProfile | None, eps: float, params: ModelParams) -> Callable[[float], float]:  # noqa: E501
    if profile is not None:
        return lambda xi: float(profile.u_bar(eps * xi))

    xi_grid: np.ndarray
    uw: np.ndarray
    xi_grid, uw = layer_shock_trajectory(params)
    return lambda xi: float(np.interp(xi, xi_grid, uw[:, 0]))


def _tail_sign(path: _ChartPath, *, left: bool) -> float:
    """Return the mean sign of Re β₁ over the outer tenth of the ξ-range on one side."""
    span: float = float(path.t.max() - path.t.min())
    window: np.ndarray = (
        path.t <= path.t.min() + TAIL_FRACTION * span
        if left
        else path.t >= path.t.max() - TAIL_FRACTION * span
    )
    lead: np.ndarray = path.y[window, 0]
    # On the complementary chart β₁ = 1/γ₁, whose real part has the sign of Re γ₁.
    return float(np.mean(np.sign(lead.real)))


def _classify(forward: _ChartPath) -> FastClassification:
    left_sign: float = _tail_sign(forward, left=True)
    right_sign: float = _tail_sign(forward, left=False)

    def side(sign: float) -> str | None:
        if sign > 0.5:  # noqa: PLR2004
            return "unstable"
        if sign < -0.5:  # noqa: PLR2004
            return "stable"
        return None

    left_side: str | None = side(left_sign)
    right_side: str | None = side(right_sign)
    if left_side is None or right_side is None:
        return FastClassification.UNDETERMINED

    if (left_side, right_side) == ("stable", "unstable"):
        return FastClassification.UNDETERMINED

    return FastClassification(f"{left_side}_to_{right_side}")


def _to_beta(path: _ChartPath) -> np.ndarray:
    beta: np.ndarray = path.y.copy()
    complementary: np.ndarray = ~path.on_primary
    with np.errstate(divide="ignore", invalid="ignore"):
        beta[complementary, 0] = 1 / path.y[complementary, 0]
        beta[complementary, 1:] = path.y[complementary, 1:] / path.y[complementary, :1]
    return beta


def _final_beta(path: _ChartPath) -> np.ndarray:
    if path.final_on_primary:
        return path.final_y

    if abs(path.final_y[0]) < 1 / CHART_FLIP_THRESHOLD ** 2:
        SECTION_OFF_CHART_MESSAGE: Final[str] = (
            "The fast line bundle has u = 0 at the section; β is undefined there"
        )
        raise ChartFailureError(SECTION_OFF_CHART_MESSAGE)

    return _swap_lead(path.final_y, slice(0, 3))


def fast_connection_probe(lam: complex, eps: float | None = None, profile: WaveProfile | None = None, *, c: float | None = None, params: ModelParams = DEFAULT_MODEL_PARAMS, xi_half_width: float = DEFAULT_FAST_HALF_WIDTH, n_points: int = 801) -> FastProbeResult:  # noqa: E501
    """
    Follow the fast unstable and fast stable line bundles to the section ξ = 0.

    The unstable bundle starts at ξ = -Ξ from the frozen fast unstable eigendirection and
    runs through the whole window (its tails classify the connection); the stable bundle
    starts at ξ = +Ξ from the frozen fast stable eigendirection and runs backwards.
    Without a profile, the base state is the singular shock of the layer problem.
    """
    eps = (profile.eps if profile is not None else params.eps) if eps is None else eps
    c = (profile.c if profile is not None else params.c) if c is None else c
    if eps <= 0:
        NON_POSITIVE_EPS_MESSAGE: Final[str] = f"The fast probe needs eps > 0 (got {eps})"
        raise ImproperlyConfiguredError(NON_POSITIVE_EPS_MESSAGE)

    ubar: Callable[[float], float] = _fast_base(profile, eps, params)

    def rhs(xi: float, y: np.ndarray, on_primary: bool) -> np.ndarray:  # noqa: FBT001
        if on_primary:
            return projectivized_full_rhs(y, ubar(xi), lam, eps, c, params)
        return _projectivized_full_rhs_complementary(y, ubar(xi), lam, eps, c, params)

    grid: np.ndarray = np.linspace(-xi_half_width, xi_half_width, n_points)
    chart_lead: slice = slice(0, 3)

    forward_to_section: _ChartPath = _integrate_on_charts(
        rhs,
        _fast_eigendirection(ubar(-xi_half_width), lam, eps, c, params, unstable=True),
        (-xi_half_width, 0.0),
        grid[grid <= 0],
        lead=chart_lead
    )
    forward_beyond: _ChartPath = _integrate_on_charts(
        rhs,
        forward_to_section.final_y,
        (0.0, xi_half_width),
        grid[grid > 0],
        lead=chart_lead,
        start_on_primary=forward_to_section.final_on_primary
    )
    backward_to_section: _ChartPath = _integrate_on_charts(
        rhs,
        _fast_eigendirection(ubar(xi_half_width), lam, eps, c, params, unstable=False),
        (xi_half_width, 0.0),
        grid[grid >= 0][::-1],
        lead=chart_lead
    )

    forward: _ChartPath = _ChartPath(
        t=np.concatenate((forward_to_section.t, forward_beyond.t)),
        y=np.concatenate((forward_to_section.y, forward_beyond.y)),
        on_primary=np.concatenate((forward_to_section.on_primary, forward_beyond.on_primary)),
        final_y=forward_beyond.final_y,
        final_on_primary=forward_beyond.final_on_primary
    )
    classification: FastClassification = _classify(forward)

    beta_unstable: np.ndarray = _final_beta(forward_to_section)
    beta_stable: np.ndarray = _final_beta(backward_to_section)

    return FastProbeResult(
        lam=complex(lam),
        classification=classification,
        E_f=complex(beta_unstable[0] - beta_stable[0]),
        beta2_gap=complex(beta_unstable[1] - beta_stable[1]),
        unstable_path=ProjectivePathFast(forward.t, _to_beta(forward), classification),
        stable_path=ProjectivePathFast(
            backward_to_section.t[::-1],
            _to_beta(backward_to_section)[::-1],
            classification
        )
    )


@dataclass(frozen=True)
class FastProbeFunction:
    """Picklable λ ↦ E_f(λ) on the real axis, NaN where the probe fails."""

    profile: WaveProfile | None
    eps: float
    c: float
    params: ModelParams = DEFAULT_MODEL_PARAMS

    def result(self, lam: complex) -> FastProbeResult:
        return fast_connection_probe(
            lam,
            self.eps,
            self.profile,
            c=self.c,
            params=self.params
        )

    def __call__(self, lam: float) -> float:
        e: NumericalError
        try:
            return self.result(lam).E_f.real
        except NumericalError as e:
            logging.debug(f"Fast probe failed at λ={lam!r}: {e.message}")
            return math.nan


def _clip_scan_interval(interval: tuple[float, float], params: ModelParams, margin: float) -> tuple[float, float] | None:  # noqa: E501
    leftmost: float = essential_spectrum_abscissa(params) + margin
    if interval[1] <= leftmost:
        logging.warning(
            f"Scan interval {interval!r} lies left of Re λ = {leftmost:.6g}; nothing to scan"
        )
        return None

    if interval[0] < leftmost:
        logging.warning(
            f"Clipping the scan interval to λ > {leftmost:.6g} "
            "(right of the essential spectrum)"
        )
        return leftmost, interval[1]

    return interval


def _sign_change_roots(func: Callable[[float], float], lams: np.ndarray, values: np.ndarray, *, root_tolerance: float) -> list[float]:  # noqa: E501
    """Polish each sign change of `values` with brentq, discarding poles."""
    roots: list[float] = []

    index: int
    for index in range(lams.size - 1):
        left: float = float(values[index])
        right: float = float(values[index + 1])
        if not (np.isfinite(left) and np.isfinite(right)):
            continue

        if left == 0:
            roots.append(float(lams[index]))
            continue

        if left * right > 0 or right == 0:
            continue

        root: float
        result: optimize.RootResults
        root, result = optimize.brentq(
            func,
            float(lams[index]),
            float(lams[index + 1]),
            xtol=1e-12,
            full_output=True
        )
        residual: float = abs(func(root))
        if not result.converged or not residual < root_tolerance * max(1.0, abs(left), abs(right)):  # noqa: E501
            logging.debug(f"Discarding sign change near λ={root:.8g} (|f|={residual:.3e}, a pole)")  # noqa: E501
            continue

        roots.append(float(root))

    if lams.size and values[-1] == 0:
        roots.append(float(lams[-1]))

    return roots


def fast_probe_root_scan(interval: tuple[float, float], n: int, eps: float | None = None, profile: WaveProfile | None = None, *, c: float | None = None, params: ModelParams = DEFAULT_MODEL_PARAMS, workers: int = 1, margin: float = SCAN_MARGIN) -> list[tuple[float, complex]]:  # noqa: E501
    """Return each real root of E_f in `interval` with its β₂ gap β₂ᵘ - β₂ˢ."""
    eps = (profile.eps if profile is not None else params.eps) if eps is None else eps
    c = (profile.c if profile is not None else params.c) if c is None else c
    clipped: tuple[float, float] | None = _clip_scan_interval(
        interval,
        params.with_wave(eps=eps, c=c),
        margin
    )
    if clipped is None:
        return []

    probe: FastProbeFunction = FastProbeFunction(profile, eps, c, params)
    lams: np.ndarray = np.linspace(*clipped, n)
    values: np.ndarray = np.array(ordered_map(probe, lams, workers))

    roots: list[float] = _sign_change_roots(probe, lams, values, root_tolerance=1e-6)
    logging.info(f"Fast probe roots in {clipped!r}: {roots!r}")
    return [(root, probe.result(root).beta2_gap) for root in roots]


def slow_linear_rhs(P: complex, V: complex, Ubar: float, lam: complex, c0: float, params: ModelParams = DEFAULT_MODEL_PARAMS) -> tuple[complex, complex]:  # noqa: E501, N803
    """Return (dP, dV) = ((λ - R'(Ū))V/D(Ū), P - c₀V/D(Ū))."""
    diffusivity: float = float(params.D(Ubar))
    if abs(diffusivity) < FOLD_TOLERANCE:
        raise SingularFlowError(u=Ubar, diffusivity=diffusivity)

    return (
        (lam - float(params.Rprime(Ubar))) * V / diffusivity,
        P - c0 * V / diffusivity
    )


def slow_end_eigendirection(u_end: float, lam: complex, c0: float, params: ModelParams = DEFAULT_MODEL_PARAMS, *, unstable: bool) -> complex:  # noqa: E501
    """
    Return S = P/V of the unstable (or stable) eigendirection of the end state `u_end`.

    The end-state eigenvalues solve μ² + (c₀/D)μ - (λ - R')/D = 0 and the eigenvector
    has S = μ + c₀/D.
    """
    diffusivity: float = float(params.D(u_end))
    roots: np.ndarray = np.roots(
        [1.0, c0 / diffusivity, -(lam - float(params.Rprime(u_end))) / diffusivity]
    ).astype(complex)
    mu: complex = complex(roots[np.argmax(roots.real) if unstable else np.argmin(roots.real)])
    return mu + c0 / diffusivity


def jump_map(lam: complex, geometry: SingularGeometry, base: tuple[float, float, float, float], c0: float, params: ModelParams = DEFAULT_MODEL_PARAMS) -> JumpMapData:  # noqa: E501
    """
    Return the upper-triangular transport of (P, V) from U_plus to U_minus.

    With the base slow velocities V̇± = P± - c₀U± at the jump endpoints,
    j12 = (R(U_plus) - R(U_minus) - λ(U_plus - U_minus))/V̇+ and j22 = V̇-/V̇+.
    """
    u_plus: float
    p_plus: float
    u_minus: float
    p_minus: float
    u_plus, p_plus, u_minus, p_minus = base
    if abs(u_plus - geometry.u_plus) > 1e-8 or abs(u_minus - geometry.u_minus) > 1e-8:  # noqa: E501, PLR2004
        MISMATCHED_BASE_MESSAGE: Final[str] = (
            f"Jump base states U=({u_plus}, {u_minus}) are not the jump values "
            f"({geometry.u_plus}, {geometry.u_minus})"
        )
        raise ValueError(MISMATCHED_BASE_MESSAGE)

    velocity_plus: float = p_plus - c0 * u_plus
    velocity_minus: float = p_minus - c0 * u_minus
    if min(abs(velocity_plus), abs(velocity_minus)) < DEGENERATE_JUMP_TOLERANCE:
        raise DegenerateJumpError

    return JumpMapData(
        lam=complex(lam),
        entries=np.array(
            [
                [
                    1.0,
                    (
                        float(params.R(u_plus))
                        - float(params.R(u_minus))
                        - lam * (u_plus - u_minus)
                    ) / velocity_plus
                ],
                [0.0, velocity_minus / velocity_plus]
            ],
            dtype=complex
        ),
        base_states=base
    )


def _slow_rhs(U: float, y: np.ndarray, on_S_chart: bool, lam: complex, c0: float, params: ModelParams) -> np.ndarray:  # noqa: E501, FBT001, N803
    """Return d(P̄, S)/dŪ (or d(P̄, T)/dŪ) along the reduced wave."""
    base_velocity: complex = y[0] - c0 * U
    diffusivity: float = float(params.D(U))
    growth: complex = lam - float(params.Rprime(U))
    x: complex = y[1]
    chart_rate: complex = (
        growth - diffusivity * x ** 2 + c0 * x
        if on_S_chart
        else diffusivity - c0 * x - growth * x ** 2
    )
    return np.array(
        [-float(params.R(U)) * diffusivity / base_velocity, chart_rate / base_velocity],
        dtype=complex
    )


def _base_start(u_end: float, c0: float, params: ModelParams) -> tuple[float, float]:
    """Return a point of the reduced wave offset from the end state along its saddle."""
    leaving_one: bool = u_end == 1.0
    direction: np.ndarray = _saddle_direction(
        _reduced_flow_jacobian(u_end, c0, params),
        unstable=leaving_one,
        u_sign=-1 if leaving_one else 1
    )
    return (
        u_end + MANIFOLD_OFFSET * float(direction[0]),
        c0 * u_end + MANIFOLD_OFFSET * float(direction[1])
    )


@dataclass(frozen=True)
class SlowEvansFunction:
    """
    Picklable λ ↦ E_s(λ) = S⁺ - S⁻ at the section U = `section_U`.

    S⁺ is shot from the unstable direction at U = 1, S⁻ from the stable direction at U = 0;
    whichever of them meets the shock on the way is transported by the jump map.
    """

    c0: float
    params: ModelParams = DEFAULT_MODEL_PARAMS
    section_U: float = DEFAULT_SLOW_SECTION
    base: tuple[float, float, float, float] = field(default=(math.nan,) * 4)

    def __post_init__(self) -> None:
        """Validate the section and fill in the jump base states from the singular orbit."""
        geometry: SingularGeometry = singular_geometry(self.params)
        on_slow_segment: bool = (
            0 < self.section_U < geometry.u_minus or geometry.u_plus < self.section_U < 1
        )
        if not on_slow_segment:
            SECTION_OFF_WAVE_MESSAGE: Final[str] = (
                f"The slow section U={self.section_U} is crossed by neither slow segment "
                f"(they span [0, {geometry.u_minus:.6f}] and [{geometry.u_plus:.6f}, 1])"
            )
            raise ImproperlyConfiguredError(SECTION_OFF_WAVE_MESSAGE)

        if any(math.isnan(value) for value in self.base):
            orbit: SingularOrbit = singular_orbit(self.params, self.c0)
            p_plus: float
            p_minus: float
            p_plus, p_minus = orbit.jump_P
            object.__setattr__(
                self,
                "base",
                (geometry.u_plus, p_plus, geometry.u_minus, p_minus)
            )

    @property
    def section_on_left_segment(self) -> bool:
        return self.section_U < self.base[2]

    def _shoot(self, lam: complex, start: SlowShootingState, u_target: float, grid: np.ndarray) -> _ChartPath:  # noqa: E501
        return _integrate_on_charts(
            lambda U, y, on_S_chart: _slow_rhs(U, y, on_S_chart, lam, self.c0, self.params),
            np.array([start.P, start.S], dtype=complex),
            (start.U, u_target),
            grid,
            lead=slice(1, 2),
            method="Radau",
            start_on_primary=start.on_S_chart
        )

    def paths(self, lam: complex, n_points: int = 400) -> dict[str, _ChartPath]:
        """Return the shooting paths, keyed by segment, sampled on uniform U-grids."""
        u_plus: float
        p_plus: float
        u_minus: float
        p_minus: float
        u_plus, p_plus, u_minus, p_minus = self.base
        jump: JumpMapData = jump_map(lam, singular_geometry(self.params), self.base, self.c0, self.params)  # noqa: E501

        u_right: float
        p_right: float
        u_right, p_right = _base_start(1.0, self.c0, self.params)
        u_left: float
        p_left: float
        u_left, p_left = _base_start(0.0, self.c0, self.params)
        unstable_start: SlowShootingState = SlowShootingState(
            u_right,
            p_right,
            slow_end_eigendirection(1.0, lam, self.c0, self.params, unstable=True)
        )
        stable_start: SlowShootingState = SlowShootingState(
            u_left,
            p_left,
            slow_end_eigendirection(0.0, lam, self.c0, self.params, unstable=False)
        )

        paths: dict[str, _ChartPath] = {}
        if self.section_on_left_segment:
            right: _ChartPath = self._shoot(lam, unstable_start, u_plus, np.linspace(u_right, u_plus, n_points))  # noqa: E501
            jumped: SlowShootingState = self._transport(right, p_minus, u_minus, jump, inverse=False)  # noqa: E501
            paths["right_forward"] = right
            paths["left_forward"] = self._shoot(lam, jumped, self.section_U, np.linspace(u_minus, self.section_U, n_points))  # noqa: E501
            paths["left_backward"] = self._shoot(lam, stable_start, self.section_U, np.linspace(u_left, self.section_U, n_points))  # noqa: E501
        else:
            left: _ChartPath = self._shoot(lam, stable_start, u_minus, np.linspace(u_left, u_minus, n_points))  # noqa: E501
            jumped = self._transport(left, p_plus, u_plus, jump, inverse=True)
            paths["right_forward"] = self._shoot(lam, unstable_start, self.section_U, np.linspace(u_right, self.section_U, n_points))  # noqa: E501
            paths["left_backward"] = left
            paths["right_backward"] = self._shoot(lam, jumped, self.section_U, np.linspace(u_plus, self.section_U, n_points))  # noqa: E501

        return paths

    @staticmethod
    def _transport(path: _ChartPath, p_after: float, u_after: float, jump: JumpMapData, *, inverse: bool) -> SlowShootingState:  # noqa: E501
        x: complex = complex(path.final_y[1])
        if path.final_on_primary:
            S: complex = jump.apply_projective_inverse(x) if inverse else jump.apply_projective(x)  # noqa: E501, N806
        else:
            P: complex  # noqa: N806
            V: complex  # noqa: N806
            transport: np.ndarray = _jump_inverse(jump.entries) if inverse else jump.entries  # noqa: E501
            P, V = transport @ np.array([1.0, x], dtype=complex)  # noqa: N806
            if abs(V) < abs(P) / CHART_FLIP_THRESHOLD:
                return SlowShootingState(u_after, p_after, complex(V / P), on_S_chart=False)
            S = complex(P / V)  # noqa: N806

        if abs(S) > CHART_FLIP_THRESHOLD:
            return SlowShootingState(u_after, p_after, 1 / S, on_S_chart=False)
        return SlowShootingState(u_after, p_after, S)

    def __call__(self, lam: complex) -> complex:
        paths: dict[str, _ChartPath] = self.paths(lam, n_points=2)
        forward: _ChartPath
        backward: _ChartPath
        if self.section_on_left_segment:
            forward, backward = paths["left_forward"], paths["left_backward"]
        else:
            forward, backward = paths["right_forward"], paths["right_backward"]

        return _section_value(forward) - _section_value(backward)


def _jump_inverse(matrix: np.ndarray) -> np.ndarray:
    """Return the inverse of an upper-triangular 2×2 jump matrix."""
    return np.array(
        [[1.0, -matrix[0, 1] / matrix[1, 1]], [0.0, 1 / matrix[1, 1]]],
        dtype=complex
    )


def _section_value(path: _ChartPath) -> complex:
    x: complex = complex(path.final_y[1])
    if path.final_on_primary:
        return x
    if x == 0:
        raise ChartFailureError("The slow line bundle has V = 0 at the section")
    return 1 / x


def slow_evans_eval(lam: complex, c0: float, section_U: float = DEFAULT_SLOW_SECTION, params: ModelParams = DEFAULT_MODEL_PARAMS) -> complex:  # noqa: E501, N803
    """Return E_s(λ) = S⁺ - S⁻ at the section U = `section_U`."""
    return SlowEvansFunction(c0, params, section_U)(lam)


def slow_path_projective(lam: complex, c0: float, section_U: float = DEFAULT_SLOW_SECTION, params: ModelParams = DEFAULT_MODEL_PARAMS, *, n_points: int = 400) -> list[ProjectivePathSlow]:  # noqa: E501, N803
    """Return the slow shooting paths along U, for plotting against the full problem."""
    return [
        ProjectivePathSlow(segment, path.t.real, path.y[:, 1], path.on_primary)
        for segment, path
        in SlowEvansFunction(c0, params, section_U).paths(lam, n_points).items()
    ]


@dataclass(frozen=True)
class _RealSlowEvans:
    evans: SlowEvansFunction

    def __call__(self, lam: float) -> float:
        e: NumericalError
        try:
            return self.evans(lam).real
        except NumericalError as e:
            logging.debug(f"Slow Evans evaluation failed at λ={lam!r}: {e.message}")
            return math.nan


def find_slow_eigenvalues(interval: tuple[float, float], n: int, c0: float, *, section_U: float = DEFAULT_SLOW_SECTION, params: ModelParams = DEFAULT_MODEL_PARAMS, workers: int = 1, margin: float = SCAN_MARGIN) -> list[float]:  # noqa: E501, N803
    """Return the sorted real roots of E_s in `interval`, clipped right of σ_ess."""
    clipped: tuple[float, float] | None = _clip_scan_interval(
        interval,
        params.with_wave(eps=0.0, c=c0),
        margin
    )
    if clipped is None:
        return []

    evans: _RealSlowEvans = _RealSlowEvans(SlowEvansFunction(c0, params, section_U))
    lams: np.ndarray = np.linspace(*clipped, n)
    values: np.ndarray = np.array(ordered_map(evans, lams, workers))

    roots: list[float] = sorted(_sign_change_roots(evans, lams, values, root_tolerance=1e-6))
    logging.info(f"Slow eigenvalues in {clipped!r}: {roots!r}")
    return roots

