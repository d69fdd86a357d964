"""
Ordered parallel map used by the simulator and the auditor
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

T = TypeVar('T')
R = TypeVar('R')


def map_ordered(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """Apply fn to every item; results always come back in input order"""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
