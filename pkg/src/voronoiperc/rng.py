"""Deterministic substream derivation for reproducible parallel Monte Carlo.

Every random draw in the package comes from a Philox generator keyed on
(seed, purpose, indices...).  Work split into fixed-size blocks keyed this
way gives bit-identical results for any worker count or schedule.
"""

from __future__ import annotations

import numpy as np

_M64 = (1 << 64) - 1

# purpose tags keep substreams for distinct uses disjoint
POINTS = 1
COLORING = 2
SEGMENT = 3
REVEAL = 4
PIVOT = 5
REPLICA = 6
RESAMPLE = 7

# colorings per block; fixed so the worker count cannot change the draws
BLOCK = 4096


def fold(*path: int) -> int:
    """Mix a tuple of integers into one 64-bit word (splitmix-style)."""
    acc = 0x243F6A8885A308D3
    for p in path:
        acc ^= p & _M64
        acc = (acc * 0x9E3779B97F4A7C15 + 0x2545F4914F6CDD1D) & _M64
        acc ^= acc >> 29
    return acc


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for each distinct (seed, path)."""
    key = np.array([seed & _M64, fold(*path)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed: int, *path: int) -> int:
    """A 64-bit child seed, e.g. one per experiment replica."""
    return fold(seed & _M64, *path)


def block_spans(m: int, block: int = BLOCK) -> list[tuple[int, int, int]]:
    """(block index, offset, size) triples covering m draws."""
    return [
        (b, b * block, min(block, m - b * block))
        for b in range((m + block - 1) // block)
    ]


def coloring_block(n_cells: int, size: int, seed: int, purpose: int, b: int) -> np.ndarray:
    """Fair-coin colorings for block b, shape (size, n_cells), values 0/1."""
    rng = substream(seed, purpose, b)
    return rng.integers(0, 2, size=(size, n_cells), dtype=np.uint8)
