"""Tests of the shared utilities."""

from collections.abc import Sequence

__all__: Sequence[str] = ()

import sys

import pytest

from shockfront_stability.utils import SuppressTraceback, ordered_map


@pytest.mark.parametrize("workers", (1, 2))
def test_ordered_map_keeps_input_order(workers: int) -> None:
    assert ordered_map(abs, [-3, 1, -2, 5, -4], workers) == [3, 1, 2, 5, 4]


def test_ordered_map_needs_a_worker() -> None:
    with pytest.raises(ValueError, match="workers"):
        ordered_map(abs, [1], 0)


def test_suppress_traceback_restores_the_limit(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(sys, "tracebacklimit", 5, raising=False)

    with SuppressTraceback(verbosity=1):
        assert sys.tracebacklimit == 0

    assert sys.tracebacklimit == 5


def test_full_tracebacks_at_high_verbosity(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(sys, "tracebacklimit", 5, raising=False)

    with SuppressTraceback(verbosity=3):
        assert sys.tracebacklimit == 5


@pytest.mark.parametrize(("verbosity", "suppressing"), ((-1, True), (2, True), (3, False)))
def test_suppressing_depends_on_verbosity(verbosity: int, suppressing: bool) -> None:  # noqa: FBT001
    assert SuppressTraceback(verbosity).suppressing is suppressing
