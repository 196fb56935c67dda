"""Ordered parallel map handed to the solvers; results never depend on the worker count."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def make_pmap(workers: int = 1):
    """Return a ``map``-like callable that preserves input order.

    Threads keep closures usable as tasks.  With ``workers <= 1`` the builtin
    ``map`` is returned so single-worker runs carry no pool overhead.
    """
    if workers is None or workers <= 1:
        return lambda fn, items: list(map(fn, items))

    def pmap(fn, items):
        items = list(items)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))

    return pmap
