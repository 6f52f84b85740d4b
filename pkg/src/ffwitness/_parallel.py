"""Order-preserving parallel map; FF_THREADS caps the worker count."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    raw = os.environ.get("FF_THREADS", "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"FF_THREADS must be a positive integer, got {raw!r}") from None
        if n < 1:
            raise ValueError(f"FF_THREADS must be a positive integer, got {raw!r}")
        return n
    return os.cpu_count() or 1


def pmap(fn, items) -> list:
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
