"""Bounded thread fan-out; FORMALITY_THREADS caps the worker count."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import InputError


def worker_count(requested: int | None = None) -> int:
    if requested is not None:
        if requested < 1:
            raise InputError("thread count must be positive")
        return requested
    raw = os.environ.get("FORMALITY_THREADS")
    if raw is None or raw.strip() == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"FORMALITY_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"FORMALITY_THREADS must be a positive integer, got {raw!r}")
    return n


def parallel_map(fn, items, threads: int | None = None) -> list:
    """map(fn, items) preserving order; runs on a thread pool when allowed."""
    items = list(items)
    n = min(worker_count(threads), max(len(items), 1))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
