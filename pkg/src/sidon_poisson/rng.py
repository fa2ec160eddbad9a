"""Counter-based random streams.

Every Monte Carlo sample gets its own Philox-4x64 stream keyed by the run
seed, with the sample index in the top counter word.  A sample's draws depend
only on ``(seed, index)``, so results do not depend on how samples are split
across workers.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def stream(seed: int, index: int) -> np.random.Philox:
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must fit in 64 bits, got {seed}")
    return np.random.Philox(key=seed, counter=[0, 0, 0, index & MASK64])


def raw_words(bg: np.random.Philox, n: int) -> list[int]:
    return [int(w) for w in bg.random_raw(n)]


def uniform_u128(bg: np.random.Philox) -> int:
    """Uniform integer in ``[0, 2**128)``."""
    hi, lo = raw_words(bg, 2)
    return (hi << 64) | lo


def uniform_below(bg: np.random.Philox, n: int) -> int:
    """Uniform integer in ``[0, n)`` for arbitrary-size ``n``, by rejection."""
    if n <= 0:
        raise ValueError("n must be positive")
    if n == 1:
        return 0
    words = ((n - 1).bit_length() + 63) // 64
    bits = words * 64
    limit = (1 << bits) - ((1 << bits) % n)
    while True:
        x = 0
        for w in raw_words(bg, words):
            x = (x << 64) | w
        if x < limit:
            return x % n
