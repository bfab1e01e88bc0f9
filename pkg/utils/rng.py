"""Seed streams built on numpy's SeedSequence."""
import numpy as np


def make_rng(seed: int | np.random.SeedSequence | None) -> np.random.Generator:
    """Return a PCG64 generator for a seed or an existing SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(seed))


def derive_seed(seed: int, *keys: int) -> int:
    """Derive a child seed deterministically from a master seed and integer keys.

    The same (seed, keys) always gives the same child, independent of the order
    in which children are requested.
    """
    entropy = [int(seed)] + [int(k) for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])


def draw_seed() -> int:
    """Draw a fresh 63-bit master seed from OS entropy."""
    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
