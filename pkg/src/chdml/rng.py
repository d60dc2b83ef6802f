"""Deterministic random-stream derivation.

Every stochastic step in the package draws from a generator derived from a
master seed plus an integer path (fold index, tree index, ...).  Derivation
goes through :class:`numpy.random.SeedSequence`, so sibling streams are
statistically independent and the overall result never depends on execution
order or scheduling.
"""

from __future__ import annotations

import numpy as np

__all__ = ["generator", "child_seed"]


def generator(seed: int, *path: int) -> np.random.Generator:
    """Return a fresh Generator for ``(seed, *path)``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, path)]))


def child_seed(seed: int, *path: int) -> int:
    """Derive a 64-bit child seed from a master seed and an integer path."""
    seq = np.random.SeedSequence([int(seed), *map(int, path)])
    return int(seq.generate_state(1, np.uint64)[0])
