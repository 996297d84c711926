"""Seeded random streams.

All randomness goes through Philox, a counter-based generator, so that a
seed reproduces the same polytopes, hyperplanes and query sets on every
platform.
"""

import numpy as np


def make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def unit_vectors(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    """``count`` directions uniform on the unit sphere in ``R^d``."""
    g = rng.standard_normal((count, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)
