"""Deterministic stream derivation on top of the Philox counter-based generator.

Every random stream in the package is identified by a base seed plus an
integer path (tags, cell hashes, run indices, draw indices).  Streams for
distinct paths are independent and their content never depends on thread
scheduling, so any computation keyed this way is reproducible bit for bit
at any worker count.
"""

from __future__ import annotations

import numpy as np

# Stream tags.  Never renumber: doing so silently changes every seeded result.
TAG_PERMUTATION = 0
TAG_SCORES = 1
TAG_MULTIPLIERS = 2
TAG_CELL = 3


def _seed_sequence(seed: int, path: tuple[int, ...]) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        entropy=int(seed), spawn_key=tuple(int(p) & 0xFFFFFFFF for p in path)
    )


def generator(seed: int, *path: int) -> np.random.Generator:
    """Philox generator for the stream identified by (seed, *path)."""
    key = _seed_sequence(seed, path).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed: int, *path: int) -> int:
    """Collapse (seed, *path) into a fresh 64-bit seed for a sub-component."""
    words = _seed_sequence(seed, path).generate_state(2, np.uint32)
    return int(words[0]) | (int(words[1]) << 32)
