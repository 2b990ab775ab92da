"""
Worker Pool

Order-preserving map over independent work items, capped by
VOLSET_THREADS. Results come back in input order, so every merge done by
the callers is independent of scheduling.
"""
import logging
from multiprocessing.pool import ThreadPool
from typing import Callable, Iterable, List, Optional, TypeVar

from config import Config

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def parallel_map(func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    Apply func to every item, possibly on several threads.

    Args:
        func: Pure function of one work item
        items: Work items
        workers: Thread cap (default: Config.threads())

    Returns:
        Results in the same order as items
    """
    items = list(items)
    workers = min(workers or Config.threads(), len(items))
    if workers <= 1:
        return [func(item) for item in items]
    logger.debug(f'Mapping {len(items)} items over {workers} threads')
    with ThreadPool(workers) as pool:
        return pool.map(func, items)
