"""
Seed derivation: every random stream in a run descends from one integer seed.
"""
import numpy as np


def derive_seed(base_seed: int, *keys: int) -> int:
    """
    Derive a child seed from a base seed and integer keys.

    The mapping is a pure function of its arguments, so a sweep cell
    (base_seed, budget, repeat) always receives the same seed.
    """
    entropy = [int(base_seed)] + [int(k) for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0] >> 1)


def make_rng(base_seed: int, *keys: int) -> np.random.Generator:
    """Create a generator seeded with derive_seed(base_seed, *keys)."""
    return np.random.default_rng(derive_seed(base_seed, *keys))
