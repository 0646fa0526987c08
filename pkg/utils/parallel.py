import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """Ordered map; results come back in input order whatever the thread count."""
    if threads < 1:
        raise ValueError(f"thread count must be positive, got {threads}")
    items = list(items)
    if threads == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug("mapping %d items over %d threads", len(items), min(threads, len(items)))
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))
