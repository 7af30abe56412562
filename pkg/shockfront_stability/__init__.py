"""Spectral stability of shock-fronted travelling waves, from the wave to its decay."""

from collections.abc import Sequence

__all__: Sequence[str] = ("run",)

from shockfront_stability.console import run
