"""Crossing events for colored Voronoi tessellations.

A coloring assigns each cell red (bit 1) or blue (bit 0) by fair coins.  A
crossing query asks for a chain of same-colored cells connecting two
opposite sides of a target rectangle: consecutive cells must share a
positive-length Voronoi edge whose segment meets the closed target, every
cell in the chain must meet the closed target, and the chain's first and
last cells must touch the start and end sides of the target.

Queries are evaluated on a compact graph of the cells meeting the target;
cells outside it can never affect the outcome.  Exact quenched values are
computed by enumerating all colorings of that region, so they are dyadic
rationals reported with their integer numerator.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng as vrng
from ._kernels import crossing_batch
from .geometry import (
    GEOM_TOL,
    Rect,
    Tessellation,
    clip_polygon,
    segments_meet_rect,
)
from .stats import wilson_halfwidth

RED = "red"
BLUE = "blue"
HORIZONTAL = "h"
VERTICAL = "v"

# beyond this many relevant cells, exact enumeration is refused
ENUMERATION_LIMIT = 24

# colorings per enumeration chunk, bounds peak memory
_CHUNK = 1 << 20


class EnumerationLimitError(ValueError):
    """Exact enumeration requested for a configuration that is too large."""


@dataclass(frozen=True)
class Coloring:
    """Per-cell colors: bit 1 is red, bit 0 is blue."""

    bits: np.ndarray
    seed: int | None = None

    def __post_init__(self) -> None:
        bits = np.ascontiguousarray(np.asarray(self.bits, dtype=np.uint8))
        if bits.ndim != 1:
            raise ValueError("bits must be a 1-d array")
        if bits.size and bits.max() > 1:
            raise ValueError("bits must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def n(self) -> int:
        return len(self.bits)


def draw_coloring(tess: Tessellation | int, seed: int) -> Coloring:
    """Fair-coin coloring of the cells, deterministic per seed."""
    n = tess if isinstance(tess, int) else tess.n_cells
    rng = vrng.substream(seed, vrng.COLORING)
    return Coloring(bits=rng.integers(0, 2, size=n, dtype=np.uint8), seed=seed)


@dataclass(frozen=True)
class CrossingQuery:
    """Cross the target left-right ("h") or bottom-top ("v") in one color."""

    target: Rect
    direction: str = HORIZONTAL
    color: str = RED

    def __post_init__(self) -> None:
        if self.direction not in (HORIZONTAL, VERTICAL):
            raise ValueError(f"direction must be 'h' or 'v', got {self.direction!r}")
        if self.color not in (RED, BLUE):
            raise ValueError(f"color must be 'red' or 'blue', got {self.color!r}")


@dataclass(frozen=True)
class QueryGraph:
    """Region-local crossing graph: cells meeting the target, re-indexed."""

    region: np.ndarray     # global indices of cells meeting the target, ascending
    edges_i: np.ndarray    # local edge endpoints, int32
    edges_j: np.ndarray
    start_idx: np.ndarray  # local indices of cells touching the start side
    end_flag: np.ndarray   # uint8 flags of cells touching the end side

    @property
    def nr(self) -> int:
        return len(self.region)


def build_query_graph(tess: Tessellation, target: Rect, direction: str) -> QueryGraph:
    window = tess.window
    if not window.contains_rect(target):
        raise ValueError("target rectangle must lie inside the window")
    n = tess.n_cells
    tol = GEOM_TOL * window.scale

    if window.covers(target):
        region = np.arange(n, dtype=np.int64)
        ei = tess.edges[:, 0].astype(np.int32)
        ej = tess.edges[:, 1].astype(np.int32)
        if direction == HORIZONTAL:
            start_mask, end_mask = tess.side_touch[:, 0], tess.side_touch[:, 1]
        else:
            start_mask, end_mask = tess.side_touch[:, 2], tess.side_touch[:, 3]
        return QueryGraph(
            region=region,
            edges_i=ei,
            edges_j=ej,
            start_idx=np.flatnonzero(start_mask).astype(np.int32),
            end_flag=end_mask.astype(np.uint8),
        )

    txmin, txmax, tymin, tymax = target.bounds
    bb = tess.bboxes
    candidate = ~(
        (bb[:, 1] < txmin - tol) | (bb[:, 0] > txmax + tol) | (bb[:, 3] < tymin - tol) | (bb[:, 2] > tymax + tol)
    )
    members: list[int] = []
    start_local: list[int] = []
    end_local: list[int] = []
    for i in np.flatnonzero(candidate):
        clipped = clip_polygon(tess.cells[i], target.bounds, tol)
        if len(clipped) == 0:
            continue
        local = len(members)
        members.append(int(i))
        cxmin, cymin = clipped.min(axis=0)
        cxmax, cymax = clipped.max(axis=0)
        if direction == HORIZONTAL:
            touch_start, touch_end = cxmin <= txmin + tol, cxmax >= txmax - tol
        else:
            touch_start, touch_end = cymin <= tymin + tol, cymax >= tymax - tol
        if touch_start:
            start_local.append(local)
        if touch_end:
            end_local.append(local)

    region = np.asarray(members, dtype=np.int64)
    lookup = np.full(n, -1, dtype=np.int64)
    lookup[region] = np.arange(len(region))
    in_region = lookup[tess.edges[:, 0]] >= 0
    in_region &= lookup[tess.edges[:, 1]] >= 0
    cand_edges = np.flatnonzero(in_region)
    if len(cand_edges):
        hit = segments_meet_rect(tess.edge_segments[cand_edges], target.bounds, tol)
        cand_edges = cand_edges[hit]
    ei = lookup[tess.edges[cand_edges, 0]].astype(np.int32)
    ej = lookup[tess.edges[cand_edges, 1]].astype(np.int32)
    end_flag = np.zeros(len(region), dtype=np.uint8)
    end_flag[end_local] = 1
    return QueryGraph(
        region=region,
        edges_i=ei,
        edges_j=ej,
        start_idx=np.asarray(start_local, dtype=np.int32),
        end_flag=end_flag,
    )


def _query_indicator(bits: np.ndarray, color: str) -> np.ndarray:
    """Row of 1s exactly where the cell carries the query color."""
    return bits if color == RED else (1 - bits).astype(np.uint8)


def detect_crossing(tess: Tessellation, coloring: Coloring, query: CrossingQuery) -> bool:
    if coloring.n != tess.n_cells:
        raise ValueError("coloring length does not match the tessellation")
    graph = build_query_graph(tess, query.target, query.direction)
    col = np.ascontiguousarray(
        _query_indicator(coloring.bits, query.color)[graph.region][None, :]
    )
    out = np.empty(1, dtype=np.uint8)
    crossing_batch(graph.edges_i, graph.edges_j, graph.start_idx, graph.end_flag, col, out)
    return bool(out[0])


def check_duality(tess: Tessellation, coloring: Coloring, target: Rect) -> bool:
    """Exactly one of red left-right and blue bottom-top crossings occurs.

    Returns that XOR; it holds identically when the target is the full
    window, which the test suite checks at scale.
    """
    red_lr = detect_crossing(tess, coloring, CrossingQuery(target, HORIZONTAL, RED))
    blue_tb = detect_crossing(tess, coloring, CrossingQuery(target, VERTICAL, BLUE))
    return red_lr != blue_tb


def crossing_truth_table(graph: QueryGraph) -> np.ndarray:
    """Outcome for every coloring of the region, as a bool array of length 2**nr.

    Bit j of the array index is 1 exactly when region cell j carries the
    query color; flipping a cell's color flips that bit, so pair counts and
    probabilities read off this table match the underlying fair-coin model
    for either query color.
    """
    nr = graph.nr
    if nr > ENUMERATION_LIMIT:
        raise EnumerationLimitError(f"{nr} relevant cells exceed the exact limit {ENUMERATION_LIMIT}")
    adj = np.zeros(nr, dtype=np.uint32)
    for a, b in zip(graph.edges_i, graph.edges_j):
        adj[a] |= np.uint32(1 << b)
        adj[b] |= np.uint32(1 << a)
    start_mask = np.uint32(0)
    for s in graph.start_idx:
        start_mask |= np.uint32(1 << s)
    end_mask = np.uint32(0)
    for e in np.flatnonzero(graph.end_flag):
        end_mask |= np.uint32(1 << e)

    total = 1 << nr
    out = np.empty(total, dtype=bool)
    zero = np.uint32(0)
    for c0 in range(0, total, _CHUNK):
        idx = np.arange(c0, min(c0 + _CHUNK, total), dtype=np.uint32)
        reach = idx & start_mask
        while True:
            frontier = np.zeros_like(reach)
            for i in range(nr):
                if adj[i]:
                    frontier |= np.where((reach >> np.uint32(i)) & np.uint32(1) != 0, adj[i], zero)
            grown = reach | (frontier & idx)
            if np.array_equal(grown, reach):
                break
            reach = grown
        out[c0 : c0 + len(idx)] = (reach & end_mask) != 0
    return out


@dataclass(frozen=True)
class QuenchedEstimate:
    """Crossing probability over colorings for one fixed tessellation."""

    value: float
    method: str                  # "exact" or "monte_carlo"
    colorings_used: int
    ci_halfwidth: float          # 95% Wilson half-width; zero when exact
    exact_count: int | None = None   # value == exact_count / 2**exact_bits
    exact_bits: int | None = None


def quenched_probability_exact(tess: Tessellation, query: CrossingQuery) -> QuenchedEstimate:
    """Enumerate all colorings of the cells meeting the target."""
    if tess.n_cells > ENUMERATION_LIMIT:
        raise EnumerationLimitError(
            f"{tess.n_cells} cells exceed the exact limit {ENUMERATION_LIMIT}; use the Monte Carlo estimator"
        )
    graph = build_query_graph(tess, query.target, query.direction)
    table = crossing_truth_table(graph)
    count = int(table.sum())
    return QuenchedEstimate(
        value=math.ldexp(count, -graph.nr),
        method="exact",
        colorings_used=len(table),
        ci_halfwidth=0.0,
        exact_count=count,
        exact_bits=graph.nr,
    )


def quenched_probability_mc(
    tess: Tessellation, query: CrossingQuery, m: int, seed: int, workers: int = 1
) -> QuenchedEstimate:
    """Monte Carlo over m fresh colorings.

    Colorings are drawn in fixed-size blocks keyed by (seed, block index),
    so the result is identical for any worker count.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    graph = build_query_graph(tess, query.target, query.direction)
    n = tess.n_cells
    blue = query.color == BLUE

    def run(span: tuple[int, int, int]) -> int:
        b, _, size = span
        colors = vrng.coloring_block(n, size, seed, vrng.COLORING, b)
        sub = colors[:, graph.region]
        if blue:
            sub = 1 - sub
        sub = np.ascontiguousarray(sub, dtype=np.uint8)
        out = np.empty(size, dtype=np.uint8)
        crossing_batch(graph.edges_i, graph.edges_j, graph.start_idx, graph.end_flag, sub, out)
        return int(out.sum())

    spans = vrng.block_spans(m)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(run, spans))
    else:
        hits = sum(map(run, spans))
    return QuenchedEstimate(
        value=hits / m,
        method="monte_carlo",
        colorings_used=m,
        ci_halfwidth=wilson_halfwidth(hits, m),
    )
