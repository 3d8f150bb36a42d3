"""Deterministic RNG substreams.

Every randomized routine in the package takes an explicit integer seed and,
where it owns several independent sources of randomness, derives one
substream per (seed, stream-id) path. Substreams are independent of
scheduling: the generator for a given path is the same no matter how many
other paths were drawn before it.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def substream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the substream identified by (seed, *path).

    Negative identifiers are mapped to their 64-bit two's-complement value so
    that any Python int is accepted.
    """
    entropy = [int(seed) & _MASK64] + [int(x) & _MASK64 for x in path]
    return np.random.default_rng(np.random.SeedSequence(entropy))
