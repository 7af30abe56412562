"""
The cubic potential F, diffusivity D = F', reaction R and the singular-limit geometry.

Every other module reads the model through `ModelParams`; polynomials are stored by
ascending coefficient vectors and their derivatives are formed symbolically once, when the
parameters are constructed.
"""

from collections.abc import Sequence

__all__: Sequence[str] = (
    "DEFAULT_F_COEFFS",
    "DEFAULT_R_COEFFS",
    "ALTERNATE_F_COEFFS",
    "FOLD_TOLERANCE",
    "ModelParams",
    "ModelEvaluation",
    "SingularGeometry",
    "DEFAULT_MODEL_PARAMS",
    "eval_model",
    "equal_area_jumps",
    "equal_area_residual",
    "fold_points",
    "singular_geometry"
)

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Final, NamedTuple, Self

import numpy as np
from numpy.polynomial import Polynomial
from numpy.typing import ArrayLike
from scipy import integrate, optimize

from shockfront_stability.exceptions import ConvergenceError, ImproperlyConfiguredError

DEFAULT_F_COEFFS: Final[tuple[float, float, float, float]] = (0.0, 21 / 8, -4.0, 2.0)
DEFAULT_R_COEFFS: Final[tuple[float, float, float, float]] = (0.0, -1.0, 6.0, -5.0)

# Antiderivative (zero constant) of D(u) = 6(u - 7/12)(u - 5/6).
ALTERNATE_F_COEFFS: Final[tuple[float, float, float, float]] = (0.0, 35 / 12, -17 / 4, 2.0)

FOLD_TOLERANCE: Final[float] = 1e-10
EQUAL_AREA_XTOL: Final[float] = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """
    Parameters of the regularized reaction-nonlinear-diffusion model.

    `F_coeffs` and `R_coeffs` are cubic coefficient vectors in ascending degree.
    Setting `use_paper_eq2_D` replaces F by the antiderivative of the alternate
    factorized diffusivity 6(u - 7/12)(u - 5/6).
    """

    eps: float = 1e-4
    c: float = 0.19686
    F_coeffs: tuple[float, ...] = DEFAULT_F_COEFFS
    R_coeffs: tuple[float, ...] = DEFAULT_R_COEFFS
    use_paper_eq2_D: bool = False

    F: Polynomial = field(init=False, repr=False, compare=False)
    G: Polynomial = field(init=False, repr=False, compare=False)
    D: Polynomial = field(init=False, repr=False, compare=False)
    Dprime: Polynomial = field(init=False, repr=False, compare=False)
    R: Polynomial = field(init=False, repr=False, compare=False)
    Rprime: Polynomial = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Validate the model invariants, then build the polynomial objects."""
        if self.use_paper_eq2_D:
            object.__setattr__(self, "F_coeffs", ALTERNATE_F_COEFFS)

        object.__setattr__(self, "F_coeffs", tuple(float(a) for a in self.F_coeffs))
        object.__setattr__(self, "R_coeffs", tuple(float(a) for a in self.R_coeffs))

        if self.eps < 0 or not math.isfinite(self.eps):
            NEGATIVE_EPS_MESSAGE: Final[str] = f"eps must be a finite value >= 0 (got {self.eps})"  # noqa: E501
            raise ImproperlyConfiguredError(NEGATIVE_EPS_MESSAGE)

        coeffs_name: str
        coeffs: tuple[float, ...]
        for coeffs_name, coeffs in (("F_coeffs", self.F_coeffs), ("R_coeffs", self.R_coeffs)):
            if len(coeffs) != 4 or coeffs[3] == 0:  # noqa: PLR2004
                NOT_CUBIC_MESSAGE: Final[str] = (
                    f"{coeffs_name} must contain exactly 4 coefficients "
                    "(ascending degree) of a genuine cubic"
                )
                raise ImproperlyConfiguredError(NOT_CUBIC_MESSAGE)

        F: Polynomial = Polynomial(self.F_coeffs)
        R: Polynomial = Polynomial(self.R_coeffs)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "G", F.integ())
        object.__setattr__(self, "D", F.deriv())
        object.__setattr__(self, "Dprime", F.deriv(2))
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "Rprime", R.deriv())

        self._validate_potential()
        self._validate_reaction()

    def _validate_potential(self) -> None:
        fold_roots: np.ndarray = self.D.roots()
        F_IS_NONMONOTONE: Final[bool] = bool(
            np.all(np.abs(fold_roots.imag) < 1e-14)
            and abs(fold_roots[0].real - fold_roots[1].real) > FOLD_TOLERANCE
            and np.all((fold_roots.real > 0) & (fold_roots.real < 1))
        )
        if not F_IS_NONMONOTONE:
            MONOTONE_F_MESSAGE: Final[str] = (
                "F must be nonmonotone: D = F' needs two distinct real roots in (0, 1)"
            )
            raise ImproperlyConfiguredError(MONOTONE_F_MESSAGE)

    def _validate_reaction(self) -> None:
        R_IS_BISTABLE: Final[bool] = bool(
            abs(self.R(0.0)) < 1e-12
            and abs(self.R(1.0)) < 1e-12
            and self.Rprime(0.0) < 0
            and self.Rprime(1.0) < 0
            and any(
                abs(root.imag) < 1e-12 and 0 < root.real < 1
                for root
                in self.R.roots()
            )
        )
        if not R_IS_BISTABLE:
            NOT_BISTABLE_MESSAGE: Final[str] = (
                "R must vanish at 0, at 1 and at one interior point, "
                "with R'(0) < 0 and R'(1) < 0 (bistable)"
            )
            raise ImproperlyConfiguredError(NOT_BISTABLE_MESSAGE)

    @property
    def is_default_potential(self) -> bool:
        return self.F_coeffs == DEFAULT_F_COEFFS

    @property
    def u_inflection(self) -> float:
        """Return the inflection point of F (the root of F'')."""
        return float(-self.F_coeffs[2] / (3 * self.F_coeffs[3]))

    def with_alternate_diffusion(self) -> Self:
        """Return a copy using the alternate factorized diffusivity for sensitivity runs."""
        return dataclasses.replace(self, use_paper_eq2_D=True)

    def with_wave(self, *, eps: float | None = None, c: float | None = None) -> Self:
        """Return a copy with a different regularization strength and/or wavespeed."""
        return dataclasses.replace(
            self,
            eps=self.eps if eps is None else eps,
            c=self.c if c is None else c
        )


DEFAULT_MODEL_PARAMS: Final[ModelParams] = ModelParams()


class ModelEvaluation(NamedTuple):
    F: float
    D: float
    Dprime: float
    R: float
    Rprime: float


@dataclass(frozen=True)
class SingularGeometry:
    """Jump values, folds and inflection of the critical manifold V = F(U)."""

    u_minus: float
    u_plus: float
    u_fold_left: float
    u_fold_right: float
    u_inflection: float
    v_star: float

    def __post_init__(self) -> None:
        """Check the ordering u_minus < folds < u_plus around the inflection."""
        IS_ORDERED: Final[bool] = bool(
            self.u_minus < self.u_fold_left < self.u_inflection
            < self.u_fold_right < self.u_plus
        )
        if not IS_ORDERED:
            UNORDERED_GEOMETRY_MESSAGE: Final[str] = (
                "Singular geometry must satisfy "
                "u_minus < u_fold_left < u_inflection < u_fold_right < u_plus "
                f"(got {self!r})"
            )
            raise ValueError(UNORDERED_GEOMETRY_MESSAGE)


def eval_model(u: ArrayLike, params: ModelParams = DEFAULT_MODEL_PARAMS) -> ModelEvaluation:
    """Evaluate F, D = F', D' = F'', R and R' at `u` (scalars or arrays)."""
    return ModelEvaluation(
        F=params.F(u),
        D=params.D(u),
        Dprime=params.Dprime(u),
        R=params.R(u),
        Rprime=params.Rprime(u)
    )


def fold_points(params: ModelParams = DEFAULT_MODEL_PARAMS) -> tuple[float, float]:
    """Return the ascending roots of D = F' (the fold lines of the critical manifold)."""
    d0: float
    d1: float
    d2: float
    d0, d1, d2 = params.D.coef
    discriminant: float = d1 ** 2 - 4 * d2 * d0
    if discriminant <= 0:
        NO_FOLDS_MESSAGE: Final[str] = (
            f"D = F' has no two distinct real roots (discriminant {discriminant:.6g} <= 0)"
        )
        raise ImproperlyConfiguredError(NO_FOLDS_MESSAGE)

    roots: tuple[float, float] = (
        (-d1 - math.sqrt(discriminant)) / (2 * d2),
        (-d1 + math.sqrt(discriminant)) / (2 * d2)
    )
    return min(roots), max(roots)


def equal_area_jumps(params: ModelParams = DEFAULT_MODEL_PARAMS) -> tuple[float, float]:
    """
    Return the shock endpoints (u_minus, u_plus) selected by the equal-area rule.

    The pair is symmetric about the inflection point, u_± = u_inflection ± s; the default
    potential has the closed form s = √3/12. Other cubics solve
    F(u_inflection + s) = F(u_inflection - s) for s beyond the fold half-width.
    """
    if params.is_default_potential:
        return (8 - math.sqrt(3)) / 12, (8 + math.sqrt(3)) / 12

    u_inflection: float = params.u_inflection
    u_fold_left: float
    u_fold_right: float
    u_fold_left, u_fold_right = fold_points(params)
    fold_half_width: float = 0.5 * (u_fold_right - u_fold_left)

    def jump_residual(s: float) -> float:
        return float(params.F(u_inflection + s) - params.F(u_inflection - s))

    e: ValueError
    try:
        s_root: float
        result: optimize.RootResults
        s_root, result = optimize.brentq(
            jump_residual,
            fold_half_width * (1 + 1e-9),
            3 * fold_half_width,
            xtol=EQUAL_AREA_XTOL,
            full_output=True
        )
    except ValueError as e:
        raise ConvergenceError(solver="equal-area root finding", reason=str(e)) from e

    if not result.converged:
        raise ConvergenceError(solver="equal-area root finding", reason=result.flag)

    logging.debug(f"Equal-area half-width s={s_root:.15g} after {result.iterations} iterations")  # noqa: E501

    return u_inflection - s_root, u_inflection + s_root


def equal_area_residual(params: ModelParams = DEFAULT_MODEL_PARAMS) -> float:
    """Return ∫ (v_star - F(u)) du over [u_minus, u_plus], zero at the jump pair."""
    u_minus: float
    u_plus: float
    u_minus, u_plus = equal_area_jumps(params)
    v_star: float = float(params.F(u_minus))

    residual: float
    residual, _ = integrate.quad(
        lambda u: v_star - params.F(u),
        u_minus,
        u_plus,
        epsabs=1e-15,
        epsrel=1e-14
    )
    return float(residual)


def singular_geometry(params: ModelParams = DEFAULT_MODEL_PARAMS) -> SingularGeometry:
    u_minus: float
    u_plus: float
    u_minus, u_plus = equal_area_jumps(params)
    u_fold_left: float
    u_fold_right: float
    u_fold_left, u_fold_right = fold_points(params)

    return SingularGeometry(
        u_minus=u_minus,
        u_plus=u_plus,
        u_fold_left=u_fold_left,
        u_fold_right=u_fold_right,
        u_inflection=params.u_inflection,
        v_star=float(params.F(u_plus))
    )
