"""Order-preserving parallel evaluation of independent samples."""

from collections.abc import Sequence

__all__: Sequence[str] = ("ordered_map",)

import logging
import multiprocessing
from collections.abc import Callable, Iterable
from typing import Final


def ordered_map[T, R](func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """
    Evaluate `func` on every item, returning the results in input order.

    With more than one worker the items are spread over a process pool; `func` must then be
    picklable (a module-level function or an instance of a module-level class).
    """
    if workers < 1:
        INVALID_WORKERS_MESSAGE: Final[str] = f"workers must be >= 1 (got {workers})"
        raise ValueError(INVALID_WORKERS_MESSAGE)

    item_list: list[T] = list(items)
    if workers == 1 or len(item_list) <= 1:
        return [func(item) for item in item_list]

    logging.debug(f"Evaluating {len(item_list)} samples on {workers} worker processes")

    with multiprocessing.Pool(workers) as pool:
        return pool.map(func, item_list, chunksize=max(1, len(item_list) // (4 * workers)))
