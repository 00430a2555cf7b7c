"""One-arm events around a point and blue circuits in square annuli.

Distances are sup-norm, so balls are axis-aligned squares and annuli are
square frames.  The one-arm event asks for a chain of red cells, each
meeting the ball of radius b around u (intersected with an ambient
rectangle), leading from a cell that meets the ball of radius a to a cell
that reaches distance b.  The circuit event asks for a blue cycle
separating the two boundary squares of an annulus; by planar duality it
occurs exactly when no red chain of annulus-meeting cells joins the inner
boundary to the outer boundary, which is how it is evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .crossing import (
    ENUMERATION_LIMIT,
    Coloring,
    EnumerationLimitError,
    QueryGraph,
    QuenchedEstimate,
    crossing_truth_table,
)
from ._kernels import crossing_batch
from . import rng as vrng
from .geometry import (
    GEOM_TOL,
    Rect,
    Tessellation,
    clip_polygon,
    clip_segments_to_rect,
)
from .stats import wilson_halfwidth


@dataclass(frozen=True)
class ArmQuery:
    """Red path from the radius-a square around u out to sup-distance b."""

    u: tuple[float, float]
    a: float
    b: float
    ambient: Rect | None = None  # default: the whole window

    def __post_init__(self) -> None:
        if not (0.0 < self.a < self.b):
            raise ValueError("radii must satisfy 0 < a < b")


@dataclass(frozen=True)
class AnnulusQuery:
    """Square annulus around center with side 7**j inside and 3 * 7**j outside."""

    center: tuple[float, float]
    j: int

    def __post_init__(self) -> None:
        if not (isinstance(self.j, int) and self.j >= 1):
            raise ValueError("j must be a positive integer")

    @property
    def inner_half(self) -> float:
        return 0.5 * 7.0**self.j

    @property
    def outer_half(self) -> float:
        return 1.5 * 7.0**self.j


def _max_sup_dist(pts: np.ndarray, center: tuple[float, float]) -> float:
    # sup-norm is convex, so the max over a convex polygon sits at a vertex
    return float(
        np.maximum(np.abs(pts[:, 0] - center[0]), np.abs(pts[:, 1] - center[1])).max()
    )


def build_arm_graph(tess: Tessellation, q: ArmQuery) -> QueryGraph:
    window = tess.window
    ambient = q.ambient if q.ambient is not None else window
    tol = GEOM_TOL * window.scale
    ux, uy = q.u
    axmin, axmax, aymin, aymax = ambient.bounds
    rbounds = (
        max(ux - q.b, axmin),
        min(ux + q.b, axmax),
        max(uy - q.b, aymin),
        min(uy + q.b, aymax),
    )
    sbounds = (ux - q.a, ux + q.a, uy - q.a, uy + q.a)
    if (
        sbounds[0] > axmax + tol
        or sbounds[1] < axmin - tol
        or sbounds[2] > aymax + tol
        or sbounds[3] < aymin - tol
    ):
        raise ValueError("ball around u does not meet the ambient rectangle")

    bb = tess.bboxes
    candidate = ~(
        (bb[:, 1] < rbounds[0] - tol)
        | (bb[:, 0] > rbounds[1] + tol)
        | (bb[:, 3] < rbounds[2] - tol)
        | (bb[:, 2] > rbounds[3] + tol)
    )
    members: list[int] = []
    start_local: list[int] = []
    end_local: list[int] = []
    for i in np.flatnonzero(candidate):
        clipped = clip_polygon(tess.cells[i], rbounds, tol)
        if len(clipped) == 0:
            continue
        local = len(members)
        members.append(int(i))
        # reaching the complement of the radius-b ball is judged on the raw
        # cell; membership and edges are confined to the region rectangle
        if _max_sup_dist(tess.cells[i], q.u) >= q.b - tol:
            end_local.append(local)
        if len(clip_polygon(tess.cells[i], sbounds, tol)) > 0:
            start_local.append(local)

    region = np.asarray(members, dtype=np.int64)
    lookup = np.full(tess.n_cells, -1, dtype=np.int64)
    lookup[region] = np.arange(len(region))
    a = lookup[tess.edges[:, 0]]
    b = lookup[tess.edges[:, 1]]
    keep = (a >= 0) & (b >= 0)
    cand_edges = np.flatnonzero(keep)
    if len(cand_edges):
        ok, _ = clip_segments_to_rect(tess.edge_segments[cand_edges], rbounds, tol)
        cand_edges = cand_edges[ok]
    end_flag = np.zeros(len(region), dtype=np.uint8)
    end_flag[end_local] = 1
    return QueryGraph(
        region=region,
        edges_i=lookup[tess.edges[cand_edges, 0]].astype(np.int32),
        edges_j=lookup[tess.edges[cand_edges, 1]].astype(np.int32),
        start_idx=np.asarray(start_local, dtype=np.int32),
        end_flag=end_flag,
    )


def build_annulus_graph(tess: Tessellation, q: AnnulusQuery) -> QueryGraph:
    """Radial graph: annulus-meeting cells, inner-boundary starts, outer-boundary ends."""
    window = tess.window
    tol = GEOM_TOL * window.scale
    cx, cy = q.center
    hin, hout = q.inner_half, q.outer_half
    obounds = (cx - hout, cx + hout, cy - hout, cy + hout)
    ibounds = (cx - hin, cx + hin, cy - hin, cy + hin)

    bb = tess.bboxes
    candidate = ~(
        (bb[:, 1] < obounds[0] - tol)
        | (bb[:, 0] > obounds[1] + tol)
        | (bb[:, 3] < obounds[2] - tol)
        | (bb[:, 2] > obounds[3] + tol)
    )
    members: list[int] = []
    start_local: list[int] = []
    end_local: list[int] = []
    for i in np.flatnonzero(candidate):
        outer_part = clip_polygon(tess.cells[i], obounds, tol)
        if len(outer_part) == 0:
            continue
        reach = _max_sup_dist(outer_part, q.center)
        if reach < hin - tol:
            continue  # cell sits inside the hole
        local = len(members)
        members.append(int(i))
        if reach >= hout - tol:
            end_local.append(local)
        inner_part = clip_polygon(tess.cells[i], ibounds, tol)
        if len(inner_part) and _max_sup_dist(inner_part, q.center) >= hin - tol:
            start_local.append(local)

    region = np.asarray(members, dtype=np.int64)
    lookup = np.full(tess.n_cells, -1, dtype=np.int64)
    lookup[region] = np.arange(len(region))
    a = lookup[tess.edges[:, 0]]
    b = lookup[tess.edges[:, 1]]
    cand_edges = np.flatnonzero((a >= 0) & (b >= 0))
    if len(cand_edges):
        ok, clipped = clip_segments_to_rect(tess.edge_segments[cand_edges], obounds, tol)
        far = np.maximum(
            np.maximum(np.abs(clipped[:, 0, 0] - cx), np.abs(clipped[:, 0, 1] - cy)),
            np.maximum(np.abs(clipped[:, 1, 0] - cx), np.abs(clipped[:, 1, 1] - cy)),
        )
        cand_edges = cand_edges[ok & (far >= hin - tol)]
    end_flag = np.zeros(len(region), dtype=np.uint8)
    end_flag[end_local] = 1
    return QueryGraph(
        region=region,
        edges_i=lookup[tess.edges[cand_edges, 0]].astype(np.int32),
        edges_j=lookup[tess.edges[cand_edges, 1]].astype(np.int32),
        start_idx=np.asarray(start_local, dtype=np.int32),
        end_flag=end_flag,
    )


def _red_connects(graph: QueryGraph, bits: np.ndarray) -> bool:
    col = np.ascontiguousarray(bits[graph.region][None, :], dtype=np.uint8)
    out = np.empty(1, dtype=np.uint8)
    crossing_batch(graph.edges_i, graph.edges_j, graph.start_idx, graph.end_flag, col, out)
    return bool(out[0])


def one_arm_indicator(tess: Tessellation, coloring: Coloring, q: ArmQuery) -> bool:
    if coloring.n != tess.n_cells:
        raise ValueError("coloring length does not match the tessellation")
    return _red_connects(build_arm_graph(tess, q), coloring.bits)


def blue_circuit_indicator(tess: Tessellation, coloring: Coloring, q: AnnulusQuery) -> bool:
    """True when blue cells separate the annulus boundaries.

    Evaluated as the absence of a red inner-to-outer chain, which is
    equivalent by planar duality.
    """
    if coloring.n != tess.n_cells:
        raise ValueError("coloring length does not match the tessellation")
    return not _red_connects(build_annulus_graph(tess, q), coloring.bits)


def _graph_quenched_mc(graph: QueryGraph, n_cells: int, m: int, seed: int) -> QuenchedEstimate:
    hits = 0
    for b, _, size in vrng.block_spans(m):
        colors = vrng.coloring_block(n_cells, size, seed, vrng.COLORING, b)
        sub = np.ascontiguousarray(colors[:, graph.region])
        out = np.empty(size, dtype=np.uint8)
        crossing_batch(graph.edges_i, graph.edges_j, graph.start_idx, graph.end_flag, sub, out)
        hits += int(out.sum())
    return QuenchedEstimate(
        value=hits / m,
        method="monte_carlo",
        colorings_used=m,
        ci_halfwidth=wilson_halfwidth(hits, m),
    )


def one_arm_quenched_mc(tess: Tessellation, q: ArmQuery, m: int, seed: int) -> QuenchedEstimate:
    """Probability of the one-arm event over m fresh colorings."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return _graph_quenched_mc(build_arm_graph(tess, q), tess.n_cells, m, seed)


def blue_circuit_quenched_mc(tess: Tessellation, q: AnnulusQuery, m: int, seed: int) -> QuenchedEstimate:
    """Probability of a blue circuit in the annulus over m fresh colorings."""
    if m < 1:
        raise ValueError("m must be >= 1")
    radial = _graph_quenched_mc(build_annulus_graph(tess, q), tess.n_cells, m, seed)
    hits = m - round(radial.value * m)
    return QuenchedEstimate(
        value=hits / m,
        method="monte_carlo",
        colorings_used=m,
        ci_halfwidth=wilson_halfwidth(hits, m),
    )


def one_arm_quenched_exact(tess: Tessellation, q: ArmQuery) -> QuenchedEstimate:
    """Exact one-arm probability by enumerating region colorings."""
    if tess.n_cells > ENUMERATION_LIMIT:
        raise EnumerationLimitError(
            f"{tess.n_cells} cells exceed the exact limit {ENUMERATION_LIMIT}; use the Monte Carlo estimator"
        )
    graph = build_arm_graph(tess, q)
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
