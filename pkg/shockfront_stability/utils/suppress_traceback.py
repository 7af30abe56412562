"""
Context manager to hide the traceback when a pipeline stage fails.

The command-line entry point only shows full tracebacks at the highest verbosity; the
previous traceback limit is restored when leaving the context manager.
"""

from collections.abc import Sequence

__all__: Sequence[str] = ("SuppressTraceback",)

import sys
from types import TracebackType
from typing import Final

FULL_TRACEBACK_VERBOSITY: Final[int] = 3


class SuppressTraceback:
    """Set `sys.tracebacklimit` to 0 below the full-traceback verbosity level."""

    def __init__(self, verbosity: int = 1, *, full_traceback_verbosity: int = FULL_TRACEBACK_VERBOSITY) -> None:  # noqa: E501
        """Create a context manager for the given command-line verbosity."""
        self.verbosity: int = verbosity
        self.full_traceback_verbosity: int = full_traceback_verbosity
        self._saved_limit: int | None = None

    @property
    def suppressing(self) -> bool:
        """Whether tracebacks are hidden inside this context."""
        return self.verbosity < self.full_traceback_verbosity

    def __enter__(self) -> None:
        """Save the current traceback limit, then hide tracebacks for low verbosity."""
        self._saved_limit = getattr(sys, "tracebacklimit", None)

        if self.suppressing:
            sys.tracebacklimit = 0

    def __exit__(self, exc_type: type[BaseException] | None, exc_val: BaseException | None, exc_tb: TracebackType | None) -> None:  # noqa: E501
        """Put the saved limit back, unless an exception is still on its way out."""
        if exc_val is not None:
            return

        if self._saved_limit is not None:
            sys.tracebacklimit = self._saved_limit
        elif hasattr(sys, "tracebacklimit"):
            del sys.tracebacklimit
