"""Deterministic uniform generation shared by every Monte-Carlo code path."""
from __future__ import annotations

from collections.abc import Iterator

import numpy as np

# Rows are produced in fixed-size blocks from a single counter-based stream,
# so draw j always consumes uniforms [j*n, (j+1)*n) of the stream for a given
# seed. This layout is a stability contract: envelope estimation and bound
# computation rely on getting identical matrices for identical (seed, l, n).
BLOCK_ROWS = 65536


def generator(seed: int) -> np.random.Generator:
    """Counter-based generator for a 64-bit seed."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def child_seed(root: int, *path: int) -> int:
    """Stable 64-bit child seed derived from a root seed and an index path."""
    ss = np.random.SeedSequence((int(root),) + tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])


def sorted_uniform_blocks(seed: int, draws: int, n: int) -> Iterator[np.ndarray]:
    """Yield blocks of row-sorted uniform draws totalling shape (draws, n)."""
    gen = generator(seed)
    produced = 0
    while produced < draws:
        rows = min(BLOCK_ROWS, draws - produced)
        block = gen.random((rows, n))
        block.sort(axis=1)
        yield block
        produced += rows


def sorted_uniform_matrix(seed: int, draws: int, n: int) -> np.ndarray:
    """All draws at once; prefer the block iterator when draws*n is large."""
    return np.concatenate(list(sorted_uniform_blocks(seed, draws, n)), axis=0)
