"""Ordered parallel map capped by the ``QGC_THREADS`` environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    raw = os.environ.get("QGC_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def pmap(fn, items) -> list:
    """``[fn(x) for x in items]``, run on up to ``QGC_THREADS`` threads.

    Results keep input order, so output is independent of the thread count.
    """
    items = list(items)
    n = min(thread_cap(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
