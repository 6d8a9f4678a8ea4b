# tools/streams.py
#
# Counter-based random streams. Stream (seed, key...) is independent of how
# many other streams exist or which worker draws it.

import numpy as np
from scipy import stats

INT64_LIMIT = 2 ** 63 - 1


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(sequence))


def uniform_below(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in [0, bound) for arbitrarily large bound."""
    if bound <= 0:
        raise ValueError(f"bound must be positive, got {bound}")
    if bound <= INT64_LIMIT:
        return int(rng.integers(0, bound))
    bits = bound.bit_length()
    nbytes = (bits + 7) // 8
    excess = nbytes * 8 - bits
    while True:
        x = int.from_bytes(rng.bytes(nbytes), "little") >> excess
        if x < bound:
            return x


def uniform_positions(rng: np.random.Generator, bound: int, size: int):
    if bound <= INT64_LIMIT:
        return [int(x) for x in rng.integers(0, bound, size=size)]
    return [uniform_below(rng, bound) for _ in range(size)]


def clopper_pearson(hits: int, trials: int, confidence: float):
    """Exact binomial interval for the success probability."""
    alpha = 1.0 - confidence
    lo = 0.0 if hits == 0 else float(stats.beta.ppf(alpha / 2, hits, trials - hits + 1))
    hi = 1.0 if hits == trials else float(stats.beta.ppf(1 - alpha / 2, hits + 1, trials - hits))
    return lo, hi
