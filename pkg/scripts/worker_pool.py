#!/usr/bin/env python
"""
Ordered fan-out of independent experiment tasks over a thread pool.
Results come back in input order so assembled output stays deterministic.
"""
from __future__ import annotations
import os
import logging
import concurrent.futures
import typing as _t

import psutil

try:
    from .errors import ParameterError
except ImportError:
    from errors import ParameterError

T = _t.TypeVar("T")
R = _t.TypeVar("R")


def resolve_workers(requested: _t.Optional[int] = None) -> int:
    """Pool size from the flag, else the physical core count."""
    if requested is not None and requested < 0:
        raise ParameterError(f"workers must be non-negative, got {requested}", workers=requested)
    if requested:
        return int(requested)
    physical = psutil.cpu_count(logical=False)
    return max(1, physical or os.cpu_count() or 1)


def map_ordered(fn: _t.Callable[[T], R], items: _t.Iterable[T],
                workers: _t.Optional[int] = None) -> _t.List[R]:
    """
    Apply fn to every item, concurrently when more than one worker is available.
    The first exception raised by a task propagates after the pool shuts down.
    """
    items = list(items)
    size = min(resolve_workers(workers), max(1, len(items)))
    if size == 1:
        return [fn(item) for item in items]
    logging.debug(f"Dispatching {len(items)} tasks over {size} workers")
    with concurrent.futures.ThreadPoolExecutor(max_workers=size) as executor:
        futures = [executor.submit(fn, item) for item in items]
        return [future.result() for future in futures]
