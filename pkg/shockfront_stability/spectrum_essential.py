"""
Essential spectrum of the linearization about the wave.

The Fredholm borders are the dispersion curves of the two end states; the regions they cut
out of the λ-plane are told apart by the signs of the real parts of the spatial eigenvalues
of the asymptotic matrices.
"""

from collections.abc import Sequence

__all__: Sequence[str] = (
    "Endpoint",
    "RegionName",
    "FredholmBorder",
    "RegionLabel",
    "REGION_SIGNATURES",
    "dispersion",
    "essential_spectrum_abscissa",
    "region_signature",
    "classify_grid",
    "sector_bound_eigs",
    "sector_splitting",
    "essential_spectrum_plotdata"
)

import enum
import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Final

import numpy as np
from numpy.typing import ArrayLike

from shockfront_stability.exceptions import BorderProximityError, UnexpectedSignatureError
from shockfront_stability.model import DEFAULT_MODEL_PARAMS, ModelParams
from shockfront_stability.utils import ordered_map
from shockfront_stability.wave import equilibria_and_linearization

BORDER_PROXIMITY_TOLERANCE: Final[float] = 1e-12

type Signature = tuple[str, str, str, str]


class Endpoint(enum.StrEnum):
    """End state of the wave, named by its position on the U-axis."""

    LEFT = "left"
    RIGHT = "right"

    @property
    def u_bar(self) -> float:
        return 0.0 if self is Endpoint.LEFT else 1.0


class RegionName(enum.StrEnum):
    OMEGA = "Omega"
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"


STABLE_SPLIT: Final[Signature] = ("-", "-", "+", "+")
SHIFTED_SPLIT: Final[Signature] = ("-", "-", "-", "+")

# (signature at ζ → -∞ where U = 1, at ζ → +∞ where U = 0); A3 repeats the A2 pair.
REGION_SIGNATURES: Final[dict[tuple[Signature, Signature], RegionName]] = {
    (STABLE_SPLIT, STABLE_SPLIT): RegionName.OMEGA,
    (SHIFTED_SPLIT, STABLE_SPLIT): RegionName.A1,
    (STABLE_SPLIT, SHIFTED_SPLIT): RegionName.A2,
    (SHIFTED_SPLIT, SHIFTED_SPLIT): RegionName.A4
}


@dataclass(frozen=True)
class FredholmBorder:
    """Samples (k, λ(k)) of the dispersion curve of one end state."""

    endpoint: Endpoint
    k: np.ndarray
    lam: np.ndarray

    def rows(self) -> list[tuple[float, float, float, str]]:
        """Return (k, Re λ, Im λ, endpoint) rows for plot-data export."""
        return [
            (float(k), float(lam.real), float(lam.imag), str(self.endpoint))
            for k, lam
            in zip(self.k, self.lam, strict=True)
        ]


@dataclass(frozen=True)
class RegionLabel:
    """
    Region of the λ-plane containing a sample, with the raw end-state signatures.

    `sig_minus` belongs to the limit ζ → -∞ (U = 1) and `sig_plus` to ζ → +∞ (U = 0).
    """

    name: RegionName
    sig_minus: Signature
    sig_plus: Signature


def dispersion(k: ArrayLike, endpoint: Endpoint, params: ModelParams = DEFAULT_MODEL_PARAMS) -> np.ndarray:  # noqa: E501
    """Return λ(k) = -ε²k⁴ - D(U_end)k² + R'(U_end) + ick for the given end state."""
    k_values: np.ndarray = np.asarray(k, dtype=float)
    u_end: float = endpoint.u_bar
    return (
        -params.eps ** 2 * k_values ** 4
        - float(params.D(u_end)) * k_values ** 2
        + float(params.Rprime(u_end))
        + 1j * params.c * k_values
    )


def essential_spectrum_abscissa(params: ModelParams = DEFAULT_MODEL_PARAMS) -> float:
    """Return the largest real part reached by either Fredholm border."""
    abscissa: float = -math.inf

    endpoint: Endpoint
    for endpoint in Endpoint:
        diffusivity: float = float(params.D(endpoint.u_bar))
        rightmost: float = float(params.Rprime(endpoint.u_bar))
        if diffusivity < 0:
            if params.eps == 0:
                return math.inf
            rightmost += diffusivity ** 2 / (4 * params.eps ** 2)
        abscissa = max(abscissa, rightmost)

    return abscissa


def _signatures(lam: complex, params: ModelParams) -> tuple[Signature, Signature]:
    equilibria = equilibria_and_linearization(params.eps, params.c, lam, params)

    eigvals: np.ndarray
    for eigvals in (equilibria.eigvals_plus, equilibria.eigvals_minus):
        scale: float = max(1.0, float(np.abs(eigvals).max()))
        if np.abs(eigvals.real).min() < BORDER_PROXIMITY_TOLERANCE * scale:
            raise BorderProximityError(lam=lam)

    return (
        equilibria.signature("plus"),  # type: ignore[return-value]
        equilibria.signature("minus")
    )


def region_signature(lam: complex, params: ModelParams = DEFAULT_MODEL_PARAMS) -> RegionLabel:
    """Classify `lam` by the signatures of the asymptotic matrices at both end states."""
    sig_minus: Signature
    sig_plus: Signature
    sig_minus, sig_plus = _signatures(lam, params)

    if (sig_minus, sig_plus) not in REGION_SIGNATURES:
        raise UnexpectedSignatureError(
            sig_minus=f"({",".join(sig_minus)})",
            sig_plus=f"({",".join(sig_plus)})"
        )

    return RegionLabel(
        name=REGION_SIGNATURES[(sig_minus, sig_plus)],
        sig_minus=sig_minus,
        sig_plus=sig_plus
    )


@dataclass(frozen=True)
class _RegionClassifier:
    params: ModelParams

    def __call__(self, lam: complex) -> RegionLabel | None:
        e: BorderProximityError
        try:
            return region_signature(lam, self.params)
        except BorderProximityError as e:
            logging.debug(f"Skipping grid sample on a Fredholm border: {e.message}")
            return None


def classify_grid(lams: Iterable[complex], params: ModelParams = DEFAULT_MODEL_PARAMS, *, workers: int = 1) -> list[RegionLabel | None]:  # noqa: E501
    """Return the region label of every sample (None on a border), in input order."""
    return ordered_map(_RegionClassifier(params), lams, workers)


def sector_bound_eigs(arg_lambda: float, eps: float) -> np.ndarray:
    """
    Return the four spatial eigenvalues ±e^{i·arg λ/4}(1 ± i)/√(2ε) of the large-|λ| limit.

    They are the roots of ε²μ⁴ = -e^{i·arg λ}.
    """
    if abs(arg_lambda) > math.pi:
        INVALID_ARGUMENT_MESSAGE: Final[str] = (
            f"arg_lambda must lie in [-π, π] (got {arg_lambda})"
        )
        raise ValueError(INVALID_ARGUMENT_MESSAGE)

    rotation: complex = complex(np.exp(1j * arg_lambda / 4)) / math.sqrt(2 * eps)
    return np.array(
        [
            sign * rotation * (1 + branch * 1j)
            for sign in (1, -1)
            for branch in (1, -1)
        ]
    )


def sector_splitting(arg_lambda: float, eps: float) -> tuple[int, int]:
    """
    Count the spatial eigenvalues with positive real part in the large-|λ| limit.

    Returns the count from the closed form and from a dense eigensolve of the limiting
    companion matrix; both equal 2 away from the negative real axis.
    """
    closed_form: int = int(np.sum(sector_bound_eigs(arg_lambda, eps).real > 0))

    limiting_matrix: np.ndarray = np.zeros((4, 4), dtype=complex)
    limiting_matrix[0, 1] = limiting_matrix[1, 2] = limiting_matrix[2, 3] = 1.0
    limiting_matrix[3, 0] = -np.exp(1j * arg_lambda) / eps ** 2
    dense: int = int(np.sum(np.linalg.eigvals(limiting_matrix).real > 0))

    return closed_form, dense


def essential_spectrum_plotdata(k_range: tuple[float, float], n: int, params: ModelParams = DEFAULT_MODEL_PARAMS) -> tuple[FredholmBorder, FredholmBorder]:  # noqa: E501
    """Sample both Fredholm borders uniformly in k; returns (left border, right border)."""
    if n < 2:  # noqa: PLR2004
        TOO_FEW_SAMPLES_MESSAGE: Final[str] = f"n must be at least 2 (got {n})"
        raise ValueError(TOO_FEW_SAMPLES_MESSAGE)

    k: np.ndarray = np.linspace(*k_range, n)
    return (
        FredholmBorder(Endpoint.LEFT, k, dispersion(k, Endpoint.LEFT, params)),
        FredholmBorder(Endpoint.RIGHT, k, dispersion(k, Endpoint.RIGHT, params))
    )
