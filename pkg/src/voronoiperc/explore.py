"""Segment-seeded exploration of crossings and its revealment.

The crossing of an inner rectangle is decided by an algorithm that queries
cell colors one at a time: first every cell meeting a vertical segment
through the inner rectangle (abscissa drawn uniformly from the middle third
of its width), then, repeatedly, any unqueried cell meeting the inner
rectangle that shares a positive-length edge with an already queried red
cell.  The outcome read off the queried cells always equals the plain
left-right red crossing indicator, because a crossing chain must meet the
segment (its trace inside the inner rectangle is connected and spans the
full width) and red components of queried cells are queried in full.

The revealment of a cell is the probability that the algorithm queries it;
the maximum revealment over cells, together with the summed squared
influences, feeds the second-moment inequality checked by the test suite:
with q the maximum revealment, sum_j Inf_j^2 <= q.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import rng as vrng
from ._kernels import crossing_batch, explore_batch
from .crossing import (
    HORIZONTAL,
    Coloring,
    EnumerationLimitError,
    build_query_graph,
)
from .geometry import GEOM_TOL, Rect, Tessellation, strip_x_extent
from .influence import InfluenceVector

# exact revealment enumerates all 2**k region colorings; refuse beyond this
REVEAL_LIMIT = 20

_CHUNK = 1 << 20

EXACT_FIXED_SEGMENT = "exact_fixed_segment"
MONTE_CARLO = "monte_carlo"


def quarter_inner(window: Rect) -> Rect:
    """Default inner rectangle: concentric, same shape, a quarter of the area."""
    return window.scaled_concentric(window.area / 4.0)


@dataclass(frozen=True)
class QueryTrace:
    """One exploration run: the segment used, cells queried in order, outcome."""

    segment_x: float
    queried: tuple[int, ...]
    outcome: bool


def _segment_abscissa(inner: Rect, segment_seed: int) -> float:
    cx = inner.center[0]
    w = inner.width
    rng = vrng.substream(segment_seed, vrng.SEGMENT)
    return cx - w / 6.0 + (w / 3.0) * float(rng.random())


def _strip_intervals(tess: Tessellation, region: np.ndarray, inner: Rect) -> tuple[np.ndarray, np.ndarray]:
    """Per-region-cell x-interval within which a full-height segment meets the cell."""
    _, _, iymin, iymax = inner.bounds
    tol = GEOM_TOL * tess.window.scale
    lo = np.full(len(region), np.inf)
    hi = np.full(len(region), -np.inf)
    for local, g in enumerate(region):
        span = strip_x_extent(tess.cells[g], iymin, iymax, tol)
        if span is not None:
            lo[local], hi[local] = span
    return lo, hi


def _region_adjacency(tess: Tessellation, region: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CSR (indptr, indices) of the plain adjacency restricted to region cells."""
    nr = len(region)
    lookup = np.full(tess.n_cells, -1, dtype=np.int64)
    lookup[region] = np.arange(nr)
    a = lookup[tess.edges[:, 0]]
    b = lookup[tess.edges[:, 1]]
    keep = (a >= 0) & (b >= 0)
    src = np.concatenate([a[keep], b[keep]])
    dst = np.concatenate([b[keep], a[keep]])
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(nr + 1, dtype=np.int32)
    np.cumsum(np.bincount(src, minlength=nr), out=indptr[1:], dtype=np.int32)
    return indptr, dst[order].astype(np.int32)


def run_exploration(
    tess: Tessellation,
    inner: Rect,
    coloring: Coloring,
    segment_seed: int | None = None,
    segment_x: float | None = None,
) -> QueryTrace:
    """Run the query algorithm once and report the trace.

    Exactly one of segment_seed and segment_x selects the segment.
    """
    if (segment_seed is None) == (segment_x is None):
        raise ValueError("provide exactly one of segment_seed and segment_x")
    if coloring.n != tess.n_cells:
        raise ValueError("coloring length does not match the tessellation")
    x0 = _segment_abscissa(inner, segment_seed) if segment_x is None else float(segment_x)
    ixmin, ixmax, _, _ = inner.bounds
    tol = GEOM_TOL * tess.window.scale
    if not (ixmin - tol <= x0 <= ixmax + tol):
        raise ValueError("segment abscissa lies outside the inner rectangle")

    graph = build_query_graph(tess, inner, HORIZONTAL)
    region = graph.region
    nr = graph.nr
    lo, hi = _strip_intervals(tess, region, inner)
    queried = (lo <= x0) & (x0 <= hi)
    red = coloring.bits[region].astype(bool)

    indptr, indices = _region_adjacency(tess, region)
    order = [int(region[j]) for j in np.flatnonzero(queried)]
    while True:
        frontier = np.zeros(nr, dtype=bool)
        for c in np.flatnonzero(queried & red):
            frontier[indices[indptr[c] : indptr[c + 1]]] = True
        frontier &= ~queried
        if not frontier.any():
            break
        newly = np.flatnonzero(frontier)
        queried[newly] = True
        order.extend(int(region[j]) for j in newly)

    # outcome on the queried set: unqueried cells cannot belong to a red
    # crossing component, so zeroing them leaves the indicator unchanged
    col = np.zeros((1, nr), dtype=np.uint8)
    col[0, queried & red] = 1
    out = np.empty(1, dtype=np.uint8)
    crossing_batch(graph.edges_i, graph.edges_j, graph.start_idx, graph.end_flag, col, out)
    return QueryTrace(segment_x=x0, queried=tuple(order), outcome=bool(out[0]))


@dataclass(frozen=True)
class RevealmentReport:
    """Query probabilities per cell for the exploration algorithm."""

    per_cell: np.ndarray
    delta: float                 # max per-cell revealment
    method: str                  # "exact_fixed_segment" or "monte_carlo"
    m: int
    segment_x: float | None = None
    exact_counts: np.ndarray | None = None  # per_cell[i] = counts[i] / 2**exact_bits
    exact_bits: int | None = None


def revealment_exact(tess: Tessellation, inner: Rect, segment_x: float | None = None) -> RevealmentReport:
    """Enumerate all colorings of the cells meeting the inner rectangle.

    The segment is held fixed (default: the center of the inner rectangle,
    which is the center of the admissible middle third).
    """
    if tess.n_cells > REVEAL_LIMIT:
        raise EnumerationLimitError(
            f"{tess.n_cells} cells exceed the exact limit {REVEAL_LIMIT}; use the Monte Carlo estimator"
        )
    x0 = inner.center[0] if segment_x is None else float(segment_x)
    ixmin, ixmax, _, _ = inner.bounds
    tol = GEOM_TOL * tess.window.scale
    if not (ixmin - tol <= x0 <= ixmax + tol):
        raise ValueError("segment abscissa lies outside the inner rectangle")

    graph = build_query_graph(tess, inner, HORIZONTAL)
    region = graph.region
    k = graph.nr
    lo, hi = _strip_intervals(tess, region, inner)
    lmask = np.uint32(0)
    for j in np.flatnonzero((lo <= x0) & (x0 <= hi)):
        lmask |= np.uint32(1 << j)

    indptr, indices = _region_adjacency(tess, region)
    adj = np.zeros(k, dtype=np.uint32)
    for c in range(k):
        for nb in indices[indptr[c] : indptr[c + 1]]:
            adj[c] |= np.uint32(1 << nb)

    counts = np.zeros(k, dtype=np.int64)
    total = 1 << k
    zero = np.uint32(0)
    for c0 in range(0, total, _CHUNK):
        idx = np.arange(c0, min(c0 + _CHUNK, total), dtype=np.uint32)
        explored = np.full(len(idx), lmask, dtype=np.uint32)
        while True:
            active = explored & idx  # queried red cells reveal their neighbors
            frontier = np.zeros_like(explored)
            for i in range(k):
                if adj[i]:
                    frontier |= np.where((active >> np.uint32(i)) & np.uint32(1) != 0, adj[i], zero)
            grown = explored | frontier
            if np.array_equal(grown, explored):
                break
            explored = grown
        for j in range(k):
            counts[j] += int(((explored >> np.uint32(j)) & np.uint32(1)).sum())

    per_cell = np.zeros(tess.n_cells)
    full_counts = np.zeros(tess.n_cells, dtype=np.int64)
    per_cell[region] = [math.ldexp(int(c), -k) for c in counts]
    full_counts[region] = counts
    for arr in (per_cell, full_counts):
        arr.setflags(write=False)
    return RevealmentReport(
        per_cell=per_cell,
        delta=float(per_cell.max()) if tess.n_cells else 0.0,
        method=EXACT_FIXED_SEGMENT,
        m=total,
        segment_x=x0,
        exact_counts=full_counts,
        exact_bits=k,
    )


def revealment_mc(
    tess: Tessellation, inner: Rect, m: int, seed: int, workers: int = 1
) -> RevealmentReport:
    """Monte Carlo revealment: fresh segment and coloring per run."""
    if m < 1:
        raise ValueError("m must be >= 1")
    graph = build_query_graph(tess, inner, HORIZONTAL)
    region = graph.region
    nr = graph.nr
    lo, hi = _strip_intervals(tess, region, inner)
    indptr, indices = _region_adjacency(tess, region)
    cx = inner.center[0]
    w = inner.width
    n = tess.n_cells

    def run(span: tuple[int, int, int]) -> np.ndarray:
        b, _, size = span
        colors = vrng.coloring_block(n, size, seed, vrng.REVEAL, b)
        sub = np.ascontiguousarray(colors[:, region])
        xs = cx - w / 6.0 + (w / 3.0) * vrng.substream(seed, vrng.SEGMENT, b).random(size)
        lmask = ((lo[None, :] <= xs[:, None]) & (xs[:, None] <= hi[None, :])).astype(np.uint8)
        counts = np.zeros(nr, dtype=np.int64)
        explore_batch(indptr, indices, lmask, sub, counts)
        return counts

    spans = vrng.block_spans(m)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, spans))
    else:
        parts = [run(s) for s in spans]
    counts = np.sum(parts, axis=0) if nr else np.zeros(0, dtype=np.int64)
    per_cell = np.zeros(n)
    per_cell[region] = counts / m
    per_cell.setflags(write=False)
    return RevealmentReport(
        per_cell=per_cell,
        delta=float(per_cell.max()) if n else 0.0,
        method=MONTE_CARLO,
        m=m,
    )


class BoundCheck(NamedTuple):
    holds: bool
    lhs: float  # summed squared influences
    rhs: float  # max revealment


def check_influence_revealment_bound(infl: InfluenceVector, rev: RevealmentReport) -> BoundCheck:
    """sum_j Inf_j^2 <= max_i revealment_i, for the same inner rectangle.

    When both sides are exact the comparison is done in integers:
    sum (c_j / 2**(k-1))**2 <= q / 2**k  iff  4 * sum c_j**2 <= q * 2**k.
    """
    lhs = float(np.dot(infl.values, infl.values))
    rhs = rev.delta
    if infl.exact_pair_counts is not None and rev.exact_counts is not None:
        if infl.exact_bits != rev.exact_bits:
            raise ValueError("influence and revealment enumerations cover different regions")
        k = int(infl.exact_bits)
        lhs_int = 4 * int(np.dot(infl.exact_pair_counts, infl.exact_pair_counts))
        rhs_int = int(rev.exact_counts.max()) << k
        return BoundCheck(lhs_int <= rhs_int, lhs, rhs)
    return BoundCheck(lhs <= rhs, lhs, rhs)
