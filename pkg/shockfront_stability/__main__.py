"""Command-line execution of the `shockfront_stability` package."""

from collections.abc import Sequence

__all__: Sequence[str] = ()

from shockfront_stability import console

if __name__ == "__main__":
    raise SystemExit(console.run())
