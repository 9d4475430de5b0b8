"""Counter-based random streams.

Every replicate owns a :class:`numpy.random.Generator` backed by Philox4x64.
The 128-bit Philox key is ``(index << 64) | seed``, and the counter starts at
zero, so replicate ``i`` of a run seeded with ``seed`` sees the same numbers
regardless of how replicates are scheduled across threads.
"""

from __future__ import annotations

import numpy as np

RandomStream = np.random.Generator

_MASK64 = (1 << 64) - 1


def stream(seed: int, index: int = 0) -> RandomStream:
    """Return the stream of replicate `index` under master `seed`."""
    seed = int(seed)
    index = int(index)
    if seed < 0 or seed > _MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    if index < 0 or index > _MASK64:
        raise ValueError(f"index must be an unsigned 64-bit integer, got {index}")
    return np.random.Generator(np.random.Philox(key=(index << 64) | seed))


def as_stream(rng) -> RandomStream:
    """Coerce ``None``/int/Generator into a Generator (ints become ``stream(int)``)."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return stream(0)
    return stream(int(rng))
