"""
Winding numbers of complex functions along closed contours in the λ-plane.

Contours are chains of segments parameterized by s ∈ [0, n_segments]. Samples are refined
until the argument of f changes by less than π/2 between neighbours; the total phase is
accumulated only once all values have been gathered in contour order.
"""

from collections.abc import Sequence

__all__: Sequence[str] = (
    "ContourKind",
    "ArcSegment",
    "LineSegment",
    "GeometricSegment",
    "SpectralContour",
    "LocatedPoint",
    "SearchBox",
    "SpectralReport",
    "circle_contour",
    "box_contour",
    "semicircle_with_detour",
    "evaluate_contour",
    "winding_number",
    "contour_dump",
    "localize_zeros_and_poles"
)

import dataclasses
import enum
import logging
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from typing import Final

import numpy as np

from shockfront_stability.exceptions import RootPolePairError, WindingNumberError
from shockfront_stability.utils import ordered_map

PHASE_STEP_LIMIT: Final[float] = math.pi / 2
ON_CONTOUR_TOLERANCE: Final[float] = 1e-13
INTEGRALITY_TOLERANCE: Final[float] = 1e-3
SPLIT_FRACTIONS: Final[tuple[float, ...]] = (0.4871, 0.5131, 0.5)
MIN_RELATIVE_SPACING: Final[float] = 1e-9
PAIR_MOMENT_FRACTION: Final[float] = 0.25

type LambdaEvaluator = Callable[[complex], complex]


class ContourKind(enum.StrEnum):
    CIRCLE = "circle"
    SEMICIRCLE_WITH_DETOUR = "semicircle_with_detour"
    POLYGON = "polygon"


@dataclass(frozen=True)
class ArcSegment:
    """Arc from angle `theta_start` to `theta_end` (counterclockwise if increasing)."""

    center: complex
    radius: float
    theta_start: float
    theta_end: float

    def point(self, t: np.ndarray) -> np.ndarray:
        return self.center + self.radius * np.exp(
            1j * (self.theta_start + t * (self.theta_end - self.theta_start))
        )


@dataclass(frozen=True)
class LineSegment:
    start: complex
    end: complex

    def point(self, t: np.ndarray) -> np.ndarray:
        return self.start + t * (self.end - self.start)


@dataclass(frozen=True)
class GeometricSegment:
    """Straight segment along a ray through the origin, sampled uniformly in log |λ|."""

    start: complex
    end: complex

    def __post_init__(self) -> None:
        """Check that both ends lie on one ray from the origin."""
        ratio: complex = self.end / self.start
        if abs(ratio.imag) > 1e-12 * abs(ratio) or ratio.real <= 0:
            NOT_ON_RAY_MESSAGE: Final[str] = (
                f"{self.start!r} and {self.end!r} do not lie on one ray through the origin"
            )
            raise ValueError(NOT_ON_RAY_MESSAGE)

    def point(self, t: np.ndarray) -> np.ndarray:
        return self.start * np.power(abs(self.end) / abs(self.start), t)


type Segment = ArcSegment | LineSegment | GeometricSegment


@dataclass(frozen=True)
class SpectralContour:
    """
    Closed contour in the λ-plane, with its adaptive samples once it has been evaluated.

    `s` is the contour parameter of every sample, running over [0, len(segments)].
    """

    kind: ContourKind
    segments: tuple[Segment, ...]
    center: complex = 0j
    radius: float = 0.0
    s: np.ndarray = field(default_factory=lambda: np.empty(0), compare=False)
    samples: np.ndarray = field(default_factory=lambda: np.empty(0, complex), compare=False)
    f_values: np.ndarray = field(default_factory=lambda: np.empty(0, complex), compare=False)
    total_phase: float = math.nan

    def points(self, s: np.ndarray) -> np.ndarray:
        """Map contour parameters to λ values."""
        index: np.ndarray = np.minimum(np.floor(s).astype(int), len(self.segments) - 1)
        result: np.ndarray = np.empty(s.shape, dtype=complex)

        segment_index: int
        for segment_index in np.unique(index):
            mask: np.ndarray = index == segment_index
            result[mask] = self.segments[segment_index].point(s[mask] - segment_index)

        return result

    @property
    def winding(self) -> int:
        return round(self.total_phase / (2 * math.pi))

    @property
    def is_evaluated(self) -> bool:
        return bool(self.f_values.size)

    @property
    def first_moment(self) -> complex:
        """
        Return (1/2πi)∮ λ f'/f dλ, the sum of the enclosed roots minus that of the poles.

        The increments of log f between neighbouring samples are weighted by the midpoint
        of each sampling interval, which is second-order accurate in the sample spacing.
        """
        midpoints: np.ndarray = 0.5 * (self.samples[1:] + self.samples[:-1])
        log_steps: np.ndarray = np.log(self.f_values[1:] / self.f_values[:-1])
        return complex(np.sum(midpoints * log_steps) / (2j * math.pi))


@dataclass(frozen=True)
class LocatedPoint:
    """Small box isolating a root (index > 0) or a pole (index < 0)."""

    center: complex
    radius: float
    index: int


@dataclass(frozen=True)
class SearchBox:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self) -> None:
        """Reject empty boxes."""
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            EMPTY_BOX_MESSAGE: Final[str] = f"Search box {self!r} is empty"
            raise ValueError(EMPTY_BOX_MESSAGE)

    @property
    def diameter(self) -> float:
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def split(self, fraction: float = 0.5) -> tuple["SearchBox", ...]:
        """Quadrisect the box at the given fraction of each side."""
        re_mid: float = self.re_min + fraction * (self.re_max - self.re_min)
        im_mid: float = self.im_min + fraction * (self.im_max - self.im_min)
        return (
            SearchBox(self.re_min, re_mid, self.im_min, im_mid),
            SearchBox(re_mid, self.re_max, self.im_min, im_mid),
            SearchBox(re_mid, self.re_max, im_mid, self.im_max),
            SearchBox(self.re_min, re_mid, im_mid, self.im_max)
        )


@dataclass(frozen=True)
class SpectralReport:
    """Located roots and poles inside a search contour, with its total winding."""

    contour: SpectralContour
    winding: int
    roots: tuple[LocatedPoint, ...]
    poles: tuple[LocatedPoint, ...]

    def __post_init__(self) -> None:
        """Check that the winding equals the sum of the located indices."""
        located_total: int = sum(point.index for point in (*self.roots, *self.poles))
        if located_total != self.winding:
            ADDITIVITY_MESSAGE: Final[str] = (
                f"Located indices sum to {located_total}, "
                f"but the enclosing contour winds {self.winding} times"
            )
            raise WindingNumberError(ADDITIVITY_MESSAGE)


def circle_contour(center: complex, radius: float) -> SpectralContour:
    """Return the counterclockwise circle B(radius, center)."""
    return SpectralContour(
        kind=ContourKind.CIRCLE,
        segments=(ArcSegment(center, radius, 0.0, 2 * math.pi),),
        center=center,
        radius=radius
    )


def box_contour(box: SearchBox) -> SpectralContour:
    """Return the counterclockwise boundary of `box`."""
    corners: tuple[complex, ...] = (
        complex(box.re_min, box.im_min),
        complex(box.re_max, box.im_min),
        complex(box.re_max, box.im_max),
        complex(box.re_min, box.im_max)
    )
    return SpectralContour(
        kind=ContourKind.POLYGON,
        segments=tuple(
            LineSegment(corners[index], corners[(index + 1) % 4])
            for index
            in range(4)
        ),
        center=box.center,
        radius=0.5 * box.diameter
    )


def semicircle_with_detour(radius: float = 1e5, detour_radius: float = 1.0) -> SpectralContour:
    """
    Return the right half-disc of `radius`, with a detour around the origin into Re λ > 0.

    The diameter lies on the imaginary axis; the detour is the right half of the circle of
    `detour_radius`, traversed clockwise so that the origin stays outside the contour.
    """
    if not 0 < detour_radius < radius:
        INVALID_RADII_MESSAGE: Final[str] = (
            f"Need 0 < detour_radius < radius (got {detour_radius}, {radius})"
        )
        raise ValueError(INVALID_RADII_MESSAGE)

    return SpectralContour(
        kind=ContourKind.SEMICIRCLE_WITH_DETOUR,
        segments=(
            ArcSegment(0j, radius, -math.pi / 2, math.pi / 2),
            GeometricSegment(1j * radius, 1j * detour_radius),
            ArcSegment(0j, detour_radius, math.pi / 2, -math.pi / 2),
            GeometricSegment(-1j * detour_radius, -1j * radius)
        ),
        center=0j,
        radius=radius
    )


class _EvaluationCache:
    """Values of f by λ, filled in ordered parallel batches."""

    def __init__(self, f: LambdaEvaluator, workers: int) -> None:
        """Create an empty cache around `f`."""
        self.f: LambdaEvaluator = f
        self.workers: int = workers
        self.values: dict[complex, complex] = {}

    def __call__(self, lams: Iterable[complex]) -> np.ndarray:
        requested: list[complex] = [complex(lam) for lam in lams]
        missing: list[complex] = list(dict.fromkeys(lam for lam in requested if lam not in self.values))  # noqa: E501
        if missing:
            self.values.update(zip(missing, ordered_map(self.f, missing, self.workers), strict=True))  # noqa: E501
        return np.array([self.values[lam] for lam in requested], dtype=complex)


def _check_off_contour(f_values: np.ndarray, samples: np.ndarray) -> None:
    bad: np.ndarray = ~np.isfinite(f_values) | (np.abs(f_values) < ON_CONTOUR_TOLERANCE)
    if np.any(bad):
        ON_CONTOUR_MESSAGE: Final[str] = (
            "The evaluated function has a root or pole on the contour near "
            f"λ={complex(samples[np.argmax(bad)])!r}"
        )
        raise WindingNumberError(ON_CONTOUR_MESSAGE)


def _evaluate_with_cache(contour: SpectralContour, cache: _EvaluationCache, *, n_initial: int, max_samples: int) -> SpectralContour:  # noqa: E501
    s: np.ndarray = np.unique(
        np.concatenate(
            [
                segment_index + np.linspace(0.0, 1.0, n_initial + 1)
                for segment_index
                in range(len(contour.segments))
            ]
        )
    )
    samples: np.ndarray = contour.points(s)
    samples[-1] = samples[0]
    f_values: np.ndarray = cache(samples)
    _check_off_contour(f_values, samples)

    refinement_pass: int = 0
    while True:
        phase_steps: np.ndarray = np.angle(f_values[1:] / f_values[:-1])
        coarse: np.ndarray = np.flatnonzero(np.abs(phase_steps) >= PHASE_STEP_LIMIT)
        if not coarse.size:
            break

        if s.size + coarse.size > max_samples:
            BUDGET_EXCEEDED_MESSAGE: Final[str] = (
                f"Contour refinement exceeded {max_samples} samples "
                f"({coarse.size} intervals still have phase steps >= π/2)"
            )
            raise WindingNumberError(BUDGET_EXCEEDED_MESSAGE)

        collapsed: np.ndarray = (
            np.abs(samples[coarse + 1] - samples[coarse])
            < MIN_RELATIVE_SPACING * np.maximum(1.0, np.abs(samples[coarse]))
        )
        if np.any(collapsed):
            ON_CONTOUR_JUMP_MESSAGE: Final[str] = (
                "The phase of f jumps across a vanishing interval near "
                f"λ={complex(samples[coarse[np.argmax(collapsed)]])!r}; "
                "a root or pole lies on the contour"
            )
            raise WindingNumberError(ON_CONTOUR_JUMP_MESSAGE)

        new_s: np.ndarray = 0.5 * (s[coarse] + s[coarse + 1])
        new_samples: np.ndarray = contour.points(new_s)
        new_values: np.ndarray = cache(new_samples)
        _check_off_contour(new_values, new_samples)

        s = np.insert(s, coarse + 1, new_s)
        samples = np.insert(samples, coarse + 1, new_samples)
        f_values = np.insert(f_values, coarse + 1, new_values)
        refinement_pass += 1
        logging.debug(
            f"Refinement pass {refinement_pass}: {coarse.size} intervals split, "
            f"{s.size} samples"
        )

    total_phase: float = float(np.sum(np.angle(f_values[1:] / f_values[:-1])))
    turns: float = total_phase / (2 * math.pi)
    if abs(turns - round(turns)) > INTEGRALITY_TOLERANCE:
        NON_INTEGRAL_MESSAGE: Final[str] = (
            f"Accumulated phase is {turns:.6f} turns, not an integer"
        )
        raise WindingNumberError(NON_INTEGRAL_MESSAGE)

    return dataclasses.replace(
        contour,
        s=s,
        samples=samples,
        f_values=f_values,
        total_phase=total_phase
    )


def evaluate_contour(f: LambdaEvaluator, contour: SpectralContour, *, n_initial: int = 64, max_samples: int = 20_000, workers: int = 1) -> SpectralContour:  # noqa: E501
    """Return `contour` with its adaptively refined samples, values and total phase."""
    return _evaluate_with_cache(
        contour,
        _EvaluationCache(f, workers),
        n_initial=n_initial,
        max_samples=max_samples
    )


def winding_number(f: LambdaEvaluator, contour: SpectralContour, **evaluation_kwargs: int) -> int:  # noqa: E501
    """Return the number of turns of f around 0 along `contour` (roots minus poles)."""
    return evaluate_contour(f, contour, **evaluation_kwargs).winding


def contour_dump(contour: SpectralContour) -> list[tuple[float, float, float, float, float]]:
    """Return (s, Re λ, Im λ, Re f, Im f) rows of an evaluated contour."""
    if not contour.is_evaluated:
        NOT_EVALUATED_MESSAGE: Final[str] = "Only evaluated contours can be dumped"
        raise ValueError(NOT_EVALUATED_MESSAGE)

    return [
        (float(s), float(lam.real), float(lam.imag), float(value.real), float(value.imag))
        for s, lam, value
        in zip(contour.s, contour.samples, contour.f_values, strict=True)
    ]


def _box_count(box: SearchBox, cache: _EvaluationCache, *, n_initial: int, max_samples: int) -> tuple[int, complex]:  # noqa: E501
    contour: SpectralContour = _evaluate_with_cache(
        box_contour(box),
        cache,
        n_initial=n_initial,
        max_samples=max_samples
    )
    return contour.winding, contour.first_moment


def _split_with_windings(box: SearchBox, cache: _EvaluationCache, *, n_initial: int, max_samples: int) -> list[tuple[SearchBox, int, complex]]:  # noqa: E501
    """Quadrisect `box`, shifting the split point off any root or pole met on a new edge."""
    last_error: WindingNumberError | None = None

    fraction: float
    for fraction in SPLIT_FRACTIONS:
        e: WindingNumberError
        try:
            counts: list[tuple[SearchBox, int, complex]] = []
            child: SearchBox
            for child in box.split(fraction):
                child_index: int
                child_moment: complex
                child_index, child_moment = _box_count(
                    child,
                    cache,
                    n_initial=n_initial,
                    max_samples=max_samples
                )
                counts.append((child, child_index, child_moment))
        except WindingNumberError as e:
            logging.debug(f"Split of {box!r} at {fraction} failed ({e.message}); jittering")
            last_error = e
        else:
            return counts

    raise last_error  # type: ignore[misc]


def _check_separated(located: list[LocatedPoint], diameter_tolerance: float) -> None:
    root: LocatedPoint
    for root in (point for point in located if point.index > 0):
        pole: LocatedPoint
        for pole in (point for point in located if point.index < 0):
            if abs(root.center - pole.center) < 2 * diameter_tolerance:
                raise RootPolePairError(root=root.center, pole=pole.center)


def localize_zeros_and_poles(f: LambdaEvaluator, search: SearchBox, *, diameter_tolerance: float = 1e-3, min_depth: int = 2, n_initial: int = 16, max_samples: int = 20_000, workers: int = 1) -> SpectralReport:  # noqa: E501
    """
    Isolate the roots and poles of f inside `search` by recursive quadrisection.

    Boxes are split unconditionally down to `min_depth`, then while their boundary winding
    is nonzero, until their diameter drops below `diameter_tolerance`. A box of winding 0
    is split further only while its first moment (the sum of its roots minus the sum of
    its poles) is at least a quarter of `diameter_tolerance`, which is how a root and a pole
    sharing a box are told apart from an empty box. A root and a pole that still share a
    box at the tolerance raise RootPolePairError.
    """
    cache: _EvaluationCache = _EvaluationCache(f, workers)
    outer: SpectralContour = _evaluate_with_cache(
        box_contour(search),
        cache,
        n_initial=n_initial,
        max_samples=max_samples
    )
    logging.info(f"Winding {outer.winding} around the search box {search!r}")

    pair_moment: float = PAIR_MOMENT_FRACTION * diameter_tolerance
    located: list[LocatedPoint] = []
    pending: list[tuple[SearchBox, int, complex, int]] = [
        (search, outer.winding, outer.first_moment, 0)
    ]
    while pending:
        box: SearchBox
        index: int
        moment: complex
        depth: int
        box, index, moment, depth = pending.pop()

        if depth >= min_depth and index == 0 and abs(moment) < pair_moment:
            continue

        if depth >= min_depth and index != 0 and box.diameter < diameter_tolerance:
            located.append(LocatedPoint(box.center, 0.5 * box.diameter, index))
            continue

        children: list[tuple[SearchBox, int, complex]] = _split_with_windings(
            box,
            cache,
            n_initial=n_initial,
            max_samples=max_samples
        )
        if sum(child_index for _, child_index, _ in children) != index:
            ADDITIVITY_MESSAGE: Final[str] = (
                f"Sub-box windings {[child_index for _, child_index, _ in children]} "
                f"do not add up to the winding {index} of {box!r}"
            )
            raise WindingNumberError(ADDITIVITY_MESSAGE)

        if depth >= min_depth and index == 0 and box.diameter < diameter_tolerance:
            if not any(child_index for _, child_index, _ in children):
                raise RootPolePairError(root=box.center, pole=box.center)

            raise RootPolePairError(
                root=next(child.center for child, child_index, _ in children if child_index > 0),  # noqa: E501
                pole=next(child.center for child, child_index, _ in children if child_index < 0)  # noqa: E501
            )

        pending.extend(
            (child, child_index, child_moment, depth + 1)
            for child, child_index, child_moment
            in children
        )

    _check_separated(located, diameter_tolerance)

    return SpectralReport(
        contour=outer,
        winding=outer.winding,
        roots=tuple(sorted((p for p in located if p.index > 0), key=lambda p: p.center.real)),
        poles=tuple(sorted((p for p in located if p.index < 0), key=lambda p: p.center.real))
    )
