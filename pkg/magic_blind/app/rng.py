"""
Counter-based random streams.

Every stochastic step draws from its own ``numpy.random.Generator`` keyed by
(master seed, purpose label, trial, round), so trials and rounds can run in any order and
still replay bit for bit.
"""
import zlib

import numpy as np


SEED_MASK = (1 << 64) - 1


def stream(seed, label, trial=0, round=0):
    """
    Build the generator for one (purpose, trial, round) cell.

    Args:
        seed (int): The 64-bit master seed.
        label (str): Purpose label, e.g. ``'plan'`` or ``'round'``.
        trial (int): Trial counter.
        round (int): Round counter within the trial.

    Returns:
        numpy.random.Generator: A Philox generator seeded from the four coordinates.

    """
    entropy = [int(seed) & SEED_MASK, zlib.crc32(label.encode('utf-8')), int(trial), int(round)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def ensure(rng, seed=0, label='default'):
    """
    Return ``rng`` or a fresh stream when ``rng`` is None.
    """
    if rng is None:
        return stream(seed, label)
    return rng
