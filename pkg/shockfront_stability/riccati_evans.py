"""
Riccati-Evans function of the wave.

The unstable 2-plane bundle leaving U = 1 and the stable 2-plane bundle arriving at U = 0 are
followed on one chart of the Grassmannian of complex 2-planes in C⁴: after the fixed linear
change of frame T, a plane spanned by the columns of [X; Y] is represented by W = Y X⁻¹,
which obeys the matrix Riccati equation W' = C + DW - WA - WBW. The Riccati-Evans function
det(W_s - W_u) at ζ = 0 vanishes at eigenvalues and has poles where a plane leaves the chart.
"""

from collections.abc import Sequence

__all__: Sequence[str] = (
    "DEFAULT_CHART_MATRIX",
    "Direction",
    "ChartTransform",
    "BlockSystem",
    "RiccatiTrajectory",
    "RiccatiEvansFunction",
    "init_eigenplane",
    "integrate_riccati",
    "riccati_evans_eval",
    "large_half_disc_contour",
    "clip_to_omega",
    "localize_spectrum"
)

import enum
import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Final

import numpy as np
from scipy import integrate, linalg

from shockfront_stability.exceptions import (
    BlowupError,
    ChartFailureError,
    ConvergenceError,
    ImproperlyConfiguredError,
)
from shockfront_stability.model import DEFAULT_MODEL_PARAMS, ModelParams
from shockfront_stability.spectrum_essential import essential_spectrum_abscissa
from shockfront_stability.wave import WaveProfile, equilibria_and_linearization, linear_matrix
from shockfront_stability.winding import (
    SearchBox,
    SpectralContour,
    SpectralReport,
    localize_zeros_and_poles,
    semicircle_with_detour,
)

DEFAULT_CHART_MATRIX: Final[np.ndarray] = np.array(
    [
        [-1j, 0, 1, 0],
        [0, 1j, 0, 1],
        [0, 0, 1, 0],
        [0, 0, 0, 1]
    ],
    dtype=complex
)
BLOWUP_NORM: Final[float] = 1e8
CHART_CONDITION_LIMIT: Final[float] = 1e12
DEFAULT_OMEGA_MARGIN: Final[float] = 0.05


class Direction(enum.StrEnum):
    UNSTABLE_FORWARD = "unstable_forward"
    STABLE_BACKWARD = "stable_backward"


@dataclass(frozen=True)
class ChartTransform:
    """Unimodular change of frame fixing the chart {det X ≠ 0} of Gr(2, 4)."""

    T: np.ndarray = field(default_factory=lambda: DEFAULT_CHART_MATRIX.copy())
    T_inv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Check det T = 1 and store the inverse."""
        if self.T.shape != (4, 4) or abs(np.linalg.det(self.T) - 1) > 1e-12:  # noqa: PLR2004
            NOT_UNIMODULAR_MESSAGE: Final[str] = (
                "The chart transform must be a 4×4 matrix with determinant 1"
            )
            raise ImproperlyConfiguredError(NOT_UNIMODULAR_MESSAGE)

        object.__setattr__(self, "T_inv", linalg.inv(self.T))

    def to_chart(self, frame: np.ndarray) -> np.ndarray:
        """Return W = Y X⁻¹ for the 4×2 frame after applying T."""
        transformed: np.ndarray = self.T @ frame
        top: np.ndarray = transformed[:2]
        condition_number: float = float(np.linalg.cond(top))
        if not np.isfinite(condition_number) or condition_number > CHART_CONDITION_LIMIT:
            raise ChartFailureError(condition_number=condition_number)

        return linalg.solve(top.T, transformed[2:].T).T

    def from_chart(self, W: np.ndarray) -> np.ndarray:  # noqa: N803
        """Return a 4×2 frame of the plane represented by W."""
        return self.T_inv @ np.vstack((np.eye(2), W))


@dataclass(frozen=True)
class BlockSystem:
    """The linear system along the wave after the change of frame, split into 2×2 blocks."""

    profile: WaveProfile
    lam: complex
    params: ModelParams = DEFAULT_MODEL_PARAMS
    chart: ChartTransform = field(default_factory=ChartTransform)

    def matrix(self, zeta: float) -> np.ndarray:
        """Return T·A(ζ)·T⁻¹ on the interpolated wave."""
        return self.chart.T @ linear_matrix(
            float(self.profile.u_bar(zeta)),
            self.lam,
            self.profile.eps,
            self.profile.c,
            self.params
        ) @ self.chart.T_inv

    def blocks(self, zeta: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        transformed: np.ndarray = self.matrix(zeta)
        return (
            transformed[:2, :2],
            transformed[:2, 2:],
            transformed[2:, :2],
            transformed[2:, 2:]
        )

    def riccati_rhs(self, zeta: float, W: np.ndarray) -> np.ndarray:  # noqa: N803
        """Return W' = C + DW - WA - WBW."""
        A: np.ndarray  # noqa: N806
        B: np.ndarray  # noqa: N806
        C: np.ndarray  # noqa: N806
        D: np.ndarray  # noqa: N806
        A, B, C, D = self.blocks(zeta)  # noqa: N806
        return C + D @ W - W @ A - W @ B @ W

    def riccati_jacobian(self, zeta: float, W: np.ndarray) -> np.ndarray:  # noqa: N803
        """Return the Jacobian of `riccati_rhs` with respect to the row-major vec of W."""
        A: np.ndarray  # noqa: N806
        B: np.ndarray  # noqa: N806
        D: np.ndarray  # noqa: N806
        A, B, _, D = self.blocks(zeta)  # noqa: N806
        identity: np.ndarray = np.eye(2)
        return (
            np.kron(D, identity)
            - np.kron(identity, A.T)
            - np.kron(identity, (B @ W).T)
            - np.kron(W @ B, identity)
        )


@dataclass(frozen=True)
class RiccatiTrajectory:
    """Chart matrices W(ζ) along an accepted integration grid."""

    zeta_grid: np.ndarray
    W: np.ndarray
    direction: Direction
    blowup: float | None = None

    @property
    def final(self) -> np.ndarray:
        return self.W[-1]


def init_eigenplane(direction: Direction, lam: complex, eps: float, c: float, chart: ChartTransform | None = None, params: ModelParams = DEFAULT_MODEL_PARAMS) -> np.ndarray:  # noqa: E501
    """
    Return the chart matrix of the end-state eigenplane a trajectory starts from.

    UNSTABLE_FORWARD uses the two unstable eigenvectors at U = 1 (the limit ζ → -∞);
    STABLE_BACKWARD uses the two stable eigenvectors at U = 0 (the limit ζ → +∞).
    """
    equilibria = equilibria_and_linearization(eps, c, lam, params)
    frame: np.ndarray = (
        equilibria.eigvecs_plus[:, :2]
        if direction is Direction.UNSTABLE_FORWARD
        else equilibria.eigvecs_minus[:, 2:]
    )
    return (chart or ChartTransform()).to_chart(frame)


def _blowup_event(_zeta: float, y: np.ndarray) -> float:
    return float(BLOWUP_NORM - np.linalg.norm(y))


_blowup_event.terminal = True  # type: ignore[attr-defined]


def integrate_riccati(profile: WaveProfile, lam: complex, direction: Direction, *, chart: ChartTransform | None = None, params: ModelParams = DEFAULT_MODEL_PARAMS, rtol: float = 1e-10, atol: float = 1e-12) -> RiccatiTrajectory:  # noqa: E501
    """
    Integrate the chart Riccati equation from one end of the wave to ζ = 0.

    UNSTABLE_FORWARD runs from ζ = -L up to 0 and STABLE_BACKWARD from ζ = L down to 0,
    both with the implicit Radau scheme. The trajectory stops at the first ζ where
    ‖W‖ > 1e8, which is recorded as its `blowup`.
    """
    chart = chart or ChartTransform()
    system: BlockSystem = BlockSystem(profile, lam, params, chart)
    W0: np.ndarray = init_eigenplane(direction, lam, profile.eps, profile.c, chart, params)  # noqa: E501, N806
    zeta_start: float = (
        float(profile.zeta[0])
        if direction is Direction.UNSTABLE_FORWARD
        else float(profile.zeta[-1])
    )

    solution = integrate.solve_ivp(
        lambda zeta, y: system.riccati_rhs(zeta, y.reshape(2, 2)).ravel(),
        (zeta_start, 0.0),
        W0.ravel().astype(complex),
        method="Radau",
        jac=lambda zeta, y: system.riccati_jacobian(zeta, y.reshape(2, 2)),
        rtol=rtol,
        atol=atol,
        events=_blowup_event
    )
    if solution.status == -1:
        raise ConvergenceError(
            solver=f"Riccati integration ({direction}, λ={lam!r})",
            reason=solution.message
        )

    blowup: float | None = (
        float(solution.t_events[0][0]) if solution.status == 1 else None
    )
    if blowup is not None:
        logging.debug(f"Riccati {direction} trajectory blew up at ζ={blowup:.6g} (λ={lam!r})")  # noqa: E501

    return RiccatiTrajectory(
        zeta_grid=solution.t,
        W=solution.y.T.reshape(-1, 2, 2),
        direction=direction,
        blowup=blowup
    )


def riccati_evans_eval(lam: complex, profile: WaveProfile, *, chart: ChartTransform | None = None, params: ModelParams = DEFAULT_MODEL_PARAMS, rtol: float = 1e-10) -> complex:  # noqa: E501
    """Return E_T(λ) = det(W_s(0) - W_u(0))."""
    chart = chart or ChartTransform()

    finals: list[np.ndarray] = []
    direction: Direction
    for direction in Direction:
        trajectory: RiccatiTrajectory = integrate_riccati(
            profile,
            lam,
            direction,
            chart=chart,
            params=params,
            rtol=rtol
        )
        if trajectory.blowup is not None:
            raise BlowupError(location=trajectory.blowup, quantity=f"W ({direction}, λ={lam!r})")  # noqa: E501
        finals.append(trajectory.final)

    difference: np.ndarray = finals[1] - finals[0]
    if not np.any(difference):
        logging.info(f"Unstable and stable planes coincide exactly at λ={lam!r}")
        return 0j

    return complex(np.linalg.det(difference))


@dataclass(frozen=True)
class RiccatiEvansFunction:
    """Picklable λ ↦ E_T(λ) for one wave, for use with parallel contour evaluation."""

    profile: WaveProfile
    params: ModelParams = DEFAULT_MODEL_PARAMS
    chart: ChartTransform = field(default_factory=ChartTransform)
    rtol: float = 1e-10

    def __call__(self, lam: complex) -> complex:
        return riccati_evans_eval(
            lam,
            self.profile,
            chart=self.chart,
            params=self.params,
            rtol=self.rtol
        )


def large_half_disc_contour(radius: float = 1e5, detour_radius: float = 1.0) -> SpectralContour:  # noqa: E501
    """Return the large right half-disc with a detour around λ = 0."""
    return semicircle_with_detour(radius, detour_radius)


def clip_to_omega(search: SearchBox, params: ModelParams, *, margin: float = DEFAULT_OMEGA_MARGIN) -> SearchBox:  # noqa: E501
    """Move the left edge of `search` right of the essential spectrum by at least `margin`."""
    leftmost_allowed: float = essential_spectrum_abscissa(params) + margin
    if search.re_max <= leftmost_allowed:
        INSIDE_ESSENTIAL_SPECTRUM_MESSAGE: Final[str] = (
            f"Search box {search!r} lies entirely left of Re λ = {leftmost_allowed:.6g}, "
            "inside or too close to the essential spectrum"
        )
        raise ImproperlyConfiguredError(INSIDE_ESSENTIAL_SPECTRUM_MESSAGE)

    if search.re_min >= leftmost_allowed:
        return search

    logging.warning(
        f"Clipping the search region to Re λ > {leftmost_allowed:.6g} "
        "(right of the essential spectrum)"
    )
    return SearchBox(leftmost_allowed, search.re_max, search.im_min, search.im_max)


def localize_spectrum(search: SearchBox, profile: WaveProfile, *, params: ModelParams = DEFAULT_MODEL_PARAMS, chart: ChartTransform | None = None, margin: float = DEFAULT_OMEGA_MARGIN, evaluator: Callable[[complex], complex] | None = None, **localize_kwargs: float) -> SpectralReport:  # noqa: E501
    """Locate the roots and poles of E_T inside `search`, clipped to the right of σ_ess."""
    wave_params: ModelParams = params.with_wave(eps=profile.eps, c=profile.c)
    report: SpectralReport = localize_zeros_and_poles(
        evaluator or RiccatiEvansFunction(profile, params, chart or ChartTransform()),
        clip_to_omega(search, wave_params, margin=margin),
        **localize_kwargs  # type: ignore[arg-type]
    )

    logging.info(
        f"Located {len(report.roots)} root(s) and {len(report.poles)} pole(s) of E_T: "
        f"roots {[f"{point.center:.4f}" for point in report.roots]}, "
        f"poles {[f"{point.center:.4f}" for point in report.poles]}"
    )
    return report
