"""Influence of single cells on a crossing outcome.

The influence of a cell is the probability that recoloring just that cell
changes the crossing indicator.  Exact values enumerate the region
colorings and count sign-changing pairs, so each influence is
pairs / 2**(nr-1) with an integer numerator; Monte Carlo estimates reuse
one coloring per run and flip one bit at a time.  Cells that do not meet
the target have influence exactly zero under both methods.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng as vrng
from ._kernels import pivot_batch
from .crossing import (
    BLUE,
    ENUMERATION_LIMIT,
    CrossingQuery,
    EnumerationLimitError,
    Tessellation,
    build_query_graph,
    crossing_truth_table,
)


@dataclass(frozen=True)
class InfluenceVector:
    """Per-cell influences for a fixed tessellation and query."""

    values: np.ndarray
    method: str              # "exact" or "monte_carlo"
    m: int                   # colorings enumerated or sampled
    sum_sq: float
    exact_pair_counts: np.ndarray | None = None  # values[i] = counts[i] / 2**(exact_bits-1)
    exact_bits: int | None = None


def influences_exact(tess: Tessellation, query: CrossingQuery) -> InfluenceVector:
    if tess.n_cells > ENUMERATION_LIMIT:
        raise EnumerationLimitError(
            f"{tess.n_cells} cells exceed the exact limit {ENUMERATION_LIMIT}; use the Monte Carlo estimator"
        )
    graph = build_query_graph(tess, query.target, query.direction)
    table = crossing_truth_table(graph)
    k = graph.nr
    pair_counts = np.zeros(tess.n_cells, dtype=np.int64)
    values = np.zeros(tess.n_cells)
    for j in range(k):
        halves = table.reshape(-1, 2, 1 << j)
        pairs = int(np.count_nonzero(halves[:, 0, :] != halves[:, 1, :]))
        pair_counts[graph.region[j]] = pairs
        values[graph.region[j]] = math.ldexp(pairs, -(k - 1))
    # sum of squares is exact in int64 for k <= 24, and ldexp keeps it exact
    total = int(np.dot(pair_counts, pair_counts))
    for arr in (values, pair_counts):
        arr.setflags(write=False)
    return InfluenceVector(
        values=values,
        method="exact",
        m=1 << k,
        sum_sq=math.ldexp(total, -2 * (k - 1)) if k else 0.0,
        exact_pair_counts=pair_counts,
        exact_bits=k,
    )


def influences_mc(
    tess: Tessellation, query: CrossingQuery, m: int, seed: int, workers: int = 1
) -> InfluenceVector:
    if m < 1:
        raise ValueError("m must be >= 1")
    graph = build_query_graph(tess, query.target, query.direction)
    n = tess.n_cells
    blue = query.color == BLUE

    def run(span: tuple[int, int, int]) -> np.ndarray:
        b, _, size = span
        colors = vrng.coloring_block(n, size, seed, vrng.PIVOT, b)
        sub = colors[:, graph.region]
        if blue:
            sub = 1 - sub
        sub = np.ascontiguousarray(sub, dtype=np.uint8)
        base = np.empty(size, dtype=np.uint8)
        counts = np.zeros(graph.nr, dtype=np.int64)
        pivot_batch(graph.edges_i, graph.edges_j, graph.start_idx, graph.end_flag, sub, base, counts)
        return counts

    spans = vrng.block_spans(m)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, spans))
    else:
        parts = [run(s) for s in spans]
    pivots = np.sum(parts, axis=0) if parts else np.zeros(graph.nr, dtype=np.int64)
    values = np.zeros(n)
    values[graph.region] = pivots / m
    values.setflags(write=False)
    return InfluenceVector(
        values=values,
        method="monte_carlo",
        m=m,
        sum_sq=float(np.dot(values, values)),
    )


def influence_l2(vec: InfluenceVector) -> float:
    """Sum of squared influences; exact when the vector is exact."""
    if vec.exact_pair_counts is not None and vec.exact_bits:
        total = int(np.dot(vec.exact_pair_counts, vec.exact_pair_counts))
        return math.ldexp(total, -2 * (vec.exact_bits - 1))
    return float(np.dot(vec.values, vec.values))
