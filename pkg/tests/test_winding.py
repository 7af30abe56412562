"""Tests of contour evaluation, winding numbers and root/pole localization."""

from collections.abc import Sequence

__all__: Sequence[str] = ()

import numpy as np
import pytest

from shockfront_stability.exceptions import RootPolePairError, WindingNumberError
from shockfront_stability.winding import (
    GeometricSegment,
    SearchBox,
    SpectralContour,
    SpectralReport,
    box_contour,
    circle_contour,
    contour_dump,
    evaluate_contour,
    localize_zeros_and_poles,
    semicircle_with_detour,
    winding_number,
)


@pytest.mark.parametrize(
    ("f", "expected"),
    (
        (lambda lam: lam, 1),
        (lambda lam: lam ** 2, 2),
        (lambda lam: 1 / lam, -1),
        (lambda lam: (lam - 0.5) / (lam - 2), 1),
        (lambda lam: lam - 3, 0)
    )
)
def test_circle_winding(f: object, expected: int) -> None:
    assert winding_number(f, circle_contour(0j, 1.0)) == expected  # type: ignore[arg-type]


def test_box_winding_counts_enclosed_roots() -> None:
    box: SearchBox = SearchBox(-1.0, 1.0, -1.0, 1.0)

    assert winding_number(lambda lam: (lam - 0.3j) * (lam + 0.5), box_contour(box)) == 2


@pytest.mark.parametrize(("shift", "expected"), ((-2.0, 1), (0.0, 0), (1.0, 0)))
def test_semicircle_detour_excludes_the_origin(shift: float, expected: int) -> None:
    contour: SpectralContour = semicircle_with_detour(1e5, 1.0)

    assert winding_number(lambda lam: lam + shift, contour) == expected


def test_semicircle_rejects_inverted_radii() -> None:
    with pytest.raises(ValueError, match="detour_radius"):
        semicircle_with_detour(1.0, 2.0)


def test_geometric_segment_must_lie_on_a_ray() -> None:
    with pytest.raises(ValueError, match="ray"):
        GeometricSegment(1.0, -1.0)


def test_root_on_the_contour_is_reported() -> None:
    with pytest.raises(WindingNumberError):
        winding_number(lambda lam: lam - 1, circle_contour(0j, 1.0))


def test_evaluated_contour_is_closed_and_dumpable() -> None:
    contour: SpectralContour = evaluate_contour(lambda lam: lam ** 3, circle_contour(0j, 2.0))
    rows: list[tuple[float, float, float, float, float]] = contour_dump(contour)

    assert contour.is_evaluated
    assert contour.winding == 3
    assert contour.samples[0] == contour.samples[-1]
    assert np.all(np.abs(np.angle(contour.f_values[1:] / contour.f_values[:-1])) < np.pi / 2)
    assert len(rows) == contour.s.size
    assert rows[0][:3] == (0.0, 2.0, 0.0)


def test_unevaluated_contour_cannot_be_dumped() -> None:
    with pytest.raises(ValueError, match="evaluated"):
        contour_dump(circle_contour(0j, 1.0))


def test_empty_search_box() -> None:
    with pytest.raises(ValueError, match="empty"):
        SearchBox(1.0, 0.0, -1.0, 1.0)


def test_report_indices_must_add_up() -> None:
    with pytest.raises(WindingNumberError):
        SpectralReport(contour=circle_contour(0j, 1.0), winding=1, roots=(), poles=())


def test_localize_separates_a_root_from_a_pole() -> None:
    root: complex = 0.1 + 0.05j
    pole: complex = -0.4

    report: SpectralReport = localize_zeros_and_poles(
        lambda lam: (lam - root) / (lam - pole),
        SearchBox(-1.0, 1.0, -1.0, 1.0)
    )

    assert report.winding == 0
    assert len(report.roots) == 1
    assert len(report.poles) == 1
    assert abs(report.roots[0].center - root) < 1e-3
    assert abs(report.poles[0].center - pole) < 1e-3
    assert report.roots[0].index == 1
    assert report.poles[0].index == -1

RNG_SEED: int = 20_240_617


class _RationalFunction:
    """Product of (λ - root) over the roots divided by the product of (λ - pole)."""

    def __init__(self, roots: Sequence[complex], poles: Sequence[complex]) -> None:
        self.roots: tuple[complex, ...] = tuple(roots)
        self.poles: tuple[complex, ...] = tuple(poles)

    def __call__(self, lam: complex) -> complex:
        numerator: complex = complex(np.prod([lam - root for root in self.roots]))
        denominator: complex = complex(np.prod([lam - pole for pole in self.poles]))
        return numerator / denominator


def test_first_moment_sums_roots_minus_poles() -> None:
    f: _RationalFunction = _RationalFunction((0.3j, -0.5), (0.2,))
    contour: SpectralContour = evaluate_contour(f, circle_contour(0j, 1.0), n_initial=512)

    assert contour.first_moment == pytest.approx(0.3j - 0.5 - 0.2, abs=2e-3)


def test_first_moment_of_an_empty_box_vanishes() -> None:
    f: _RationalFunction = _RationalFunction((0.3j, -0.5), (0.2,))
    contour: SpectralContour = evaluate_contour(f, box_contour(SearchBox(2.0, 3.0, 2.0, 3.0)))

    assert abs(contour.first_moment) < 1e-4


def test_winding_is_additive_over_subdivisions() -> None:
    rng: np.random.Generator = np.random.default_rng(RNG_SEED)
    f: _RationalFunction = _RationalFunction(
        rng.uniform(-0.9, 0.9, 4) + 1j * rng.uniform(-0.9, 0.9, 4),
        rng.uniform(-0.9, 0.9, 2) + 1j * rng.uniform(-0.9, 0.9, 2)
    )
    box: SearchBox = SearchBox(-1.0, 1.0, -1.0, 1.0)

    fraction: float
    for fraction in rng.uniform(0.3, 0.7, 5):
        children: tuple[SearchBox, ...] = box.split(float(fraction))

        assert sum(winding_number(f, box_contour(child)) for child in children) == 2


def test_roots_of_a_real_function_come_in_conjugate_pairs() -> None:
    f: _RationalFunction = _RationalFunction((-0.3 + 0.4j, -0.3 - 0.4j, 0.2), (-0.6 + 0.1j, -0.6 - 0.1j))  # noqa: E501
    report: SpectralReport = localize_zeros_and_poles(f, SearchBox(-1.0, 1.0, -1.0, 1.0))
    roots: list[complex] = sorted((point.center for point in report.roots), key=lambda z: (z.real, z.imag))  # noqa: E501
    poles: list[complex] = sorted((point.center for point in report.poles), key=lambda z: (z.real, z.imag))  # noqa: E501

    assert len(roots) == 3
    assert len(poles) == 2
    assert all(min(abs(other - root.conjugate()) for other in roots) < 2e-3 for root in roots)
    assert all(min(abs(other - pole.conjugate()) for other in poles) < 2e-3 for pole in poles)


def test_localize_splits_a_root_and_pole_sharing_a_box() -> None:
    root: complex = 0.31 + 0.27j
    pole: complex = root + 0.05

    report: SpectralReport = localize_zeros_and_poles(
        _RationalFunction((root,), (pole,)),
        SearchBox(-1.0, 1.0, -1.0, 1.0)
    )

    assert report.winding == 0
    assert [point.index for point in report.roots] == [1]
    assert [point.index for point in report.poles] == [-1]
    assert abs(report.roots[0].center - root) < 1e-3
    assert abs(report.poles[0].center - pole) < 1e-3


def test_localize_reports_an_unresolved_root_and_pole() -> None:
    root: complex = 0.31 + 0.27j

    with pytest.raises(RootPolePairError) as exc_info:
        localize_zeros_and_poles(
            _RationalFunction((root,), (root + 9e-4,)),
            SearchBox(-1.0, 1.0, -1.0, 1.0)
        )

    assert abs(exc_info.value.root - root) < 2e-3  # type: ignore[operator]
    assert abs(exc_info.value.pole - root) < 3e-3  # type: ignore[operator]
