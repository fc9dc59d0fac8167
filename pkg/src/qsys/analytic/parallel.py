"""Deterministic ordered parallel map for independent numeric jobs."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["max_workers", "pmap"]


def max_workers() -> int:
    cap = os.environ.get("QSYS_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            raise ValueError(f"QSYS_THREADS must be an integer, got {cap!r}") from None
    return n


def pmap(fn, items, workers: int | None = None) -> list:
    """``[fn(x) for x in items]`` evaluated in a thread pool.

    Results come back in input order, so output never depends on scheduling.
    """
    items = list(items)
    workers = max_workers() if workers is None else max(1, workers)
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
