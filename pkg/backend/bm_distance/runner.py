"""
bm_distance/runner.py
─────────────────────────────────────────────────────────────────────────────
Batch orchestrator. A semaphore bounds how many tasks are in flight; with
jobs > 1 each task runs in a worker process, otherwise inline. Results come
back in input order whatever the completion order was.
"""

from __future__ import annotations

import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Iterable, Optional, TypeVar

log = logging.getLogger("bm_distance.runner")

T = TypeVar("T")
R = TypeVar("R")


async def run_all(
    fn: Callable[[T], R],
    items: Iterable[T],
    jobs: int = 1,
    label: str = "batch",
    on_progress: Optional[Callable[[str, int, float], Any]] = None,
) -> list[R]:
    """`fn` must be a module-level callable when jobs > 1 (it is pickled)."""
    tasks = list(items)
    if not tasks: return []
    total = len(tasks)
    completed = 0

    if jobs <= 1:
        out = []
        for item in tasks:
            out.append(fn(item))
            completed += 1
            if on_progress: on_progress(label, completed, completed / total * 100)
        return out

    sem = asyncio.Semaphore(jobs)
    loop = asyncio.get_running_loop()

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        async def _run_task(idx: int, item: T) -> R:
            nonlocal completed
            async with sem:
                try:
                    res = await loop.run_in_executor(pool, fn, item)
                except Exception as e:
                    log.error(f"[{label}] task {idx} failed: {e}")
                    raise
                completed += 1
                if on_progress: on_progress(label, completed, completed / total * 100)
                return res

        results = await asyncio.gather(*[_run_task(i, it) for i, it in enumerate(tasks)])
    log.info(f"[{label}] {total} tasks done on {jobs} workers")
    return list(results)


def run_batch(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1, label: str = "batch") -> list[R]:
    return asyncio.run(run_all(fn, items, jobs=jobs, label=label))
