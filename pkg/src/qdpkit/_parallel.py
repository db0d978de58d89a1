"""Order-preserving parallel map capped by the ``QDPKIT_THREADS`` environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from .errors import InvalidParams

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    raw = os.environ.get("QDPKIT_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise InvalidParams(f"QDPKIT_THREADS must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise InvalidParams(f"QDPKIT_THREADS must be a positive integer, got {raw!r}")
    return n


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Apply ``fn`` to every item; results come back in input order."""
    items = list(items)
    workers = min(thread_count(), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
