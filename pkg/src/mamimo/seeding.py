"""Deterministic per-trial random streams.

Every Monte-Carlo trial draws from its own generator, derived from the master
seed and the trial's integer coordinates (experiment point, trial index, ...).
The derivation is counter-based, so results are identical no matter how trials
are scheduled across threads.
"""

import numpy as np


def spawn_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for the trial addressed by ``key`` under a master ``seed``.

    ``key`` components must be non-negative integers.
    """
    if any(k < 0 for k in key):
        raise ValueError("stream key components must be non-negative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)
