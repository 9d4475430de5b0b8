"""Deterministic replicate scheduling.

Replicate ``i`` always draws from ``stream(seed, offset + i)``, so results do
not depend on the number of worker threads or on completion order.  The
kernels release the GIL, which lets threads overlap the hot loops.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

from .models import LevyModel
from .paths import sample_log_hat_I
from .rng import RandomStream, stream

R = TypeVar("R")

# index offsets keep the streams of different roles within one seed disjoint
HAT_I_OFFSET = 1 << 40
REFERENCE_OFFSET = 1 << 41
ML_OFFSET = 1 << 42


def default_threads() -> int:
    return max(1, min(8, os.cpu_count() or 1))


def run_replicates(
    fn: Callable[[int, RandomStream], R],
    n: int,
    seed: int,
    *,
    threads: int = 1,
    offset: int = 0,
    deadline: float | None = None,
    min_done: int = 2,
) -> list[R]:
    """``[fn(i, stream(seed, offset + i)) for i in range(n)]``, possibly threaded.

    With `deadline` (a ``time.monotonic()`` value) replicates not started
    before it are skipped, except the first `min_done`; the returned list is
    then the completed prefix.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    threads = max(1, int(threads))

    def one(i):
        if deadline is not None and i >= min_done and time.monotonic() > deadline:
            return _SKIPPED
        return fn(i, stream(seed, offset + i))

    if threads == 1 or n < 2:
        out = [one(i) for i in range(n)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(one, range(n)))
    for k, r in enumerate(out):
        if r is _SKIPPED:
            return out[:k]
    return out


_SKIPPED = object()


def log_hat_I_draws(
    model: LevyModel,
    n: int,
    seed: int,
    *,
    rel_tol: float = 1e-8,
    step: float | None = None,
    threads: int = 1,
    offset: int = HAT_I_OFFSET,
) -> np.ndarray:
    """Logarithms of `n` independent draws of the dual exponential functional."""
    return np.array(
        run_replicates(
            lambda i, r: sample_log_hat_I(model, rel_tol, r, step), n, seed, threads=threads, offset=offset
        ),
        dtype=float,
    )


def hat_I_draws(model: LevyModel, n: int, seed: int, **kw) -> np.ndarray:
    """`n` independent draws of the dual exponential functional."""
    return np.exp(log_hat_I_draws(model, n, seed, **kw))
