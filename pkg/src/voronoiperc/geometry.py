"""Rectangle windows, point samplers, and window-clipped Voronoi tessellations.

The tessellation is built once per configuration and shared read-only by all
queries.  Cells are convex polygons clipped to the window; adjacency records
every positive-length shared Voronoi edge together with its segment geometry,
and per-cell metadata (side contact, bounding box, radius, area) is
precomputed for the percolation queries downstream.

Construction uses the reflection trick: the point set is augmented with its
mirror image across each window side and the plain Voronoi diagram of the
augmented set is taken.  Inside the window a mirrored site is never closer
than its original, and each site's bisector with its own mirror is exactly
the window side, so the augmented diagram's cell of an original site equals
its true Voronoi cell intersected with the window.  This also makes every
kept cell bounded, so no infinite-ridge handling is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.spatial import QhullError, Voronoi

from . import rng as vrng

# relative tolerances, scaled by window size where applied
CONTAIN_TOL = 1e-12
GEOM_TOL = 1e-9


class DegenerateConfigurationError(ValueError):
    """A point set that cannot be tessellated reliably."""


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle given by aspect ratio rho = width/height and area."""

    rho: float
    area: float = 1.0
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rho) and self.rho > 0.0):
            raise ValueError(f"rho must be a positive finite real, got {self.rho!r}")
        if not (math.isfinite(self.area) and self.area > 0.0):
            raise ValueError(f"area must be a positive finite real, got {self.area!r}")
        cx, cy = self.center
        if not (math.isfinite(cx) and math.isfinite(cy)):
            raise ValueError("center coordinates must be finite")

    @property
    def width(self) -> float:
        return math.sqrt(self.rho * self.area)

    @property
    def height(self) -> float:
        return math.sqrt(self.area / self.rho)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """(xmin, xmax, ymin, ymax)."""
        cx, cy = self.center
        w2, h2 = 0.5 * self.width, 0.5 * self.height
        return (cx - w2, cx + w2, cy - h2, cy + h2)

    @property
    def scale(self) -> float:
        return max(self.width, self.height)

    @classmethod
    def from_bounds(cls, xmin: float, xmax: float, ymin: float, ymax: float) -> "Rect":
        w, h = xmax - xmin, ymax - ymin
        if w <= 0.0 or h <= 0.0:
            raise ValueError("bounds describe an empty rectangle")
        return cls(rho=w / h, area=w * h, center=(0.5 * (xmin + xmax), 0.5 * (ymin + ymax)))

    @classmethod
    def left_anchored(cls, rho: float, area: float) -> "Rect":
        """Rectangle with its left side on the vertical axis, vertically centered."""
        w = math.sqrt(rho * area)
        h = math.sqrt(area / rho)
        return cls.from_bounds(0.0, w, -0.5 * h, 0.5 * h)

    def scaled_concentric(self, area: float) -> "Rect":
        """Same center and aspect ratio, different area."""
        return Rect(rho=self.rho, area=area, center=self.center)

    def contains_rect(self, other: "Rect", tol: float = CONTAIN_TOL) -> bool:
        slack = tol * self.scale
        xmin, xmax, ymin, ymax = self.bounds
        oxmin, oxmax, oymin, oymax = other.bounds
        return (
            oxmin >= xmin - slack
            and oxmax <= xmax + slack
            and oymin >= ymin - slack
            and oymax <= ymax + slack
        )

    def covers(self, other: "Rect", tol: float = CONTAIN_TOL) -> bool:
        """True when other is the same rectangle up to tolerance."""
        slack = tol * max(self.scale, 1.0)
        return all(abs(a - b) <= slack for a, b in zip(self.bounds, other.bounds))


def halfplane_window(rho: float, area: float, pad: float | None = None) -> tuple[Rect, Rect]:
    """Padded Poisson sampling window emulating a right half-plane.

    Returns (window, target) where target is the left-anchored rectangle of
    the given shape and window extends it by pad on the right, top and
    bottom (not on the left: the axis side coincides with the half-plane
    edge).  Default pad is 4 * area**(1/4), beyond which distant nuclei are
    irrelevant to the target with overwhelming probability.
    """
    target = Rect.left_anchored(rho, area)
    if pad is None:
        pad = 4.0 * area ** 0.25
    xmin, xmax, ymin, ymax = target.bounds
    window = Rect.from_bounds(xmin, xmax + pad, ymin - pad, ymax + pad)
    return window, target


@dataclass(frozen=True)
class Configuration:
    """A finite planar point set together with its sampling window."""

    points: np.ndarray
    window: Rect
    model: str = "user"
    seed: int | None = None

    def __post_init__(self) -> None:
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must be an (N, 2) array")
        if not np.isfinite(pts).all():
            raise ValueError("points must be finite")
        xmin, xmax, ymin, ymax = self.window.bounds
        slack = CONTAIN_TOL * self.window.scale
        if pts.size and not (
            (pts[:, 0] >= xmin - slack).all()
            and (pts[:, 0] <= xmax + slack).all()
            and (pts[:, 1] >= ymin - slack).all()
            and (pts[:, 1] <= ymax + slack).all()
        ):
            raise ValueError("points must lie in the closed window")
        if len(pts) and len(np.unique(pts, axis=0)) != len(pts):
            raise ValueError("coincident points are not allowed")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)


def _uniform_points(rng: np.random.Generator, window: Rect, n: int) -> np.ndarray:
    xmin, xmax, ymin, ymax = window.bounds
    pts = rng.random((n, 2))
    pts[:, 0] = xmin + (xmax - xmin) * pts[:, 0]
    pts[:, 1] = ymin + (ymax - ymin) * pts[:, 1]
    return pts


def _resample_duplicates(pts: np.ndarray, window: Rect, seed: int) -> np.ndarray:
    # duplicates have probability zero; redraw offenders from a derived stream
    attempt = 0
    while True:
        _, first = np.unique(pts, axis=0, return_index=True)
        if len(first) == len(pts):
            return pts
        dup = np.setdiff1d(np.arange(len(pts)), first)
        rng = vrng.substream(seed, vrng.RESAMPLE, attempt)
        pts[dup] = _uniform_points(rng, window, len(dup))
        attempt += 1


def sample_binomial(window: Rect, n: int, seed: int) -> Configuration:
    """Exactly n i.i.d. uniform points in the window; deterministic per seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = vrng.substream(seed, vrng.POINTS)
    pts = _resample_duplicates(_uniform_points(rng, window, n), window, seed)
    return Configuration(points=pts, window=window, model="binomial", seed=seed)


def sample_poisson(window: Rect, seed: int) -> Configuration:
    """Unit-rate Poisson sample: count ~ Poisson(window area), uniform positions."""
    rng = vrng.substream(seed, vrng.POINTS)
    count = int(rng.poisson(window.area))
    pts = _resample_duplicates(_uniform_points(rng, window, count), window, seed)
    return Configuration(points=pts, window=window, model="poisson", seed=seed)


@dataclass(frozen=True)
class Tessellation:
    """Voronoi cells of a configuration, clipped to the window. Immutable."""

    config: Configuration
    cells: tuple[np.ndarray, ...]       # per-cell CCW vertex arrays (k_i, 2)
    edges: np.ndarray                   # (E, 2) int32, i < j, positive-length shared edges
    edge_segments: np.ndarray           # (E, 2, 2) endpoints of each shared edge
    neighbors: tuple[np.ndarray, ...]   # per-cell sorted neighbor indices
    side_touch: np.ndarray              # (N, 4) bool columns: left, right, bottom, top
    radii: np.ndarray                   # (N,) max distance nucleus -> own cell vertex
    areas: np.ndarray                   # (N,) cell areas
    bboxes: np.ndarray                  # (N, 4) per-cell (xmin, xmax, ymin, ymax)

    @property
    def window(self) -> Rect:
        return self.config.window

    @property
    def points(self) -> np.ndarray:
        return self.config.points

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def adjacent(self, i: int, j: int) -> bool:
        return j in self.neighbors[i]

    def adjacency_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) arrays of the adjacency, for kernel consumption."""
        counts = np.fromiter((len(nb) for nb in self.neighbors), np.int32, self.n_cells)
        indptr = np.zeros(self.n_cells + 1, np.int32)
        np.cumsum(counts, out=indptr[1:])
        indices = (
            np.concatenate(self.neighbors).astype(np.int32)
            if self.n_cells and indptr[-1]
            else np.empty(0, np.int32)
        )
        return indptr, indices


def _extract_cells(
    vor: "Voronoi", pts: np.ndarray, n: int, tol: float
) -> tuple[list[np.ndarray], np.ndarray, np.ndarray, np.ndarray]:
    """CCW-ordered, deduplicated cell rings with areas, radii and bboxes.

    All cells are processed at once on flat arrays; per-ring reductions go
    through reduceat, which keeps the construction fast for many small cells.
    """
    counts = np.empty(n, dtype=np.int64)
    flat: list[int] = []
    for i in range(n):
        region = vor.regions[vor.point_region[i]]
        if not region or -1 in region:
            raise DegenerateConfigurationError(f"unbounded or empty cell for nucleus {i}")
        counts[i] = len(region)
        flat.extend(region)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    verts = vor.vertices[np.asarray(flat, dtype=np.int64)]
    owner = np.repeat(np.arange(n), counts)

    cx = np.add.reduceat(verts[:, 0], offsets[:-1]) / counts
    cy = np.add.reduceat(verts[:, 1], offsets[:-1]) / counts
    ang = np.arctan2(verts[:, 1] - cy[owner], verts[:, 0] - cx[owner])
    verts = verts[np.lexsort((ang, owner))]

    # drop consecutive near-duplicates within each ring, then a trailing
    # vertex that closes back onto the ring's first vertex
    pos = np.arange(len(verts))
    starts = offsets[:-1][owner]
    prev = np.where(pos > starts, pos - 1, pos)
    gap = np.abs(verts - verts[prev]).max(axis=1)
    keep = (gap > tol) | (pos == starts)
    kept_idx = np.flatnonzero(keep)
    last_kept = np.zeros(n, dtype=np.int64)
    last_kept[owner[kept_idx]] = kept_idx  # ascending: final write wins
    wrap_gap = np.abs(verts[last_kept] - verts[offsets[:-1]]).max(axis=1)
    drop = (wrap_gap <= tol) & (last_kept > offsets[:-1])
    keep[last_kept[drop]] = False

    owner = owner[keep]
    verts = verts[keep]
    counts = np.bincount(owner, minlength=n)
    if (counts < 3).any():
        bad = int(np.argmin(counts))
        raise DegenerateConfigurationError(f"degenerate cell for nucleus {bad}")
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])

    pos = np.arange(len(verts))
    nxt = np.where(pos + 1 < offsets[1:][owner], pos + 1, offsets[:-1][owner])
    cross = verts[:, 0] * verts[nxt, 1] - verts[:, 1] * verts[nxt, 0]
    areas = 0.5 * np.add.reduceat(cross, offsets[:-1])
    d2 = ((verts - pts[owner]) ** 2).sum(axis=1)
    radii = np.sqrt(np.maximum.reduceat(d2, offsets[:-1]))
    bboxes = np.column_stack(
        [
            np.minimum.reduceat(verts[:, 0], offsets[:-1]),
            np.maximum.reduceat(verts[:, 0], offsets[:-1]),
            np.minimum.reduceat(verts[:, 1], offsets[:-1]),
            np.maximum.reduceat(verts[:, 1], offsets[:-1]),
        ]
    )
    verts.setflags(write=False)
    cells = np.split(verts, offsets[1:-1])
    return cells, areas, radii, bboxes


def build_tessellation(config: Configuration) -> Tessellation:
    """Clipped Voronoi cells, adjacency with edge geometry, and cell metadata."""
    n = config.n
    if n < 1:
        raise DegenerateConfigurationError("configuration has no points")
    pts = config.points
    window = config.window
    xmin, xmax, ymin, ymax = window.bounds
    scale = window.scale
    tol = GEOM_TOL * scale

    # a site exactly on the boundary coincides with its own mirror image
    on_edge = (
        (np.abs(pts[:, 0] - xmin) < CONTAIN_TOL * scale)
        | (np.abs(pts[:, 0] - xmax) < CONTAIN_TOL * scale)
        | (np.abs(pts[:, 1] - ymin) < CONTAIN_TOL * scale)
        | (np.abs(pts[:, 1] - ymax) < CONTAIN_TOL * scale)
    )
    if on_edge.any():
        raise DegenerateConfigurationError(
            "nucleus on the window boundary; the clipped construction is degenerate there"
        )

    aug = np.vstack([pts, pts, pts, pts, pts])
    aug[n : 2 * n, 0] = 2.0 * xmin - pts[:, 0]
    aug[2 * n : 3 * n, 0] = 2.0 * xmax - pts[:, 0]
    aug[3 * n : 4 * n, 1] = 2.0 * ymin - pts[:, 1]
    aug[4 * n :, 1] = 2.0 * ymax - pts[:, 1]

    try:
        vor = Voronoi(aug)
    except QhullError as exc:
        raise DegenerateConfigurationError(f"Voronoi construction failed: {exc}") from exc

    cells, areas, radii, bboxes = _extract_cells(vor, pts, n, CONTAIN_TOL * scale)
    side_touch = np.column_stack(
        [
            bboxes[:, 0] <= xmin + tol,
            bboxes[:, 1] >= xmax - tol,
            bboxes[:, 2] <= ymin + tol,
            bboxes[:, 3] >= ymax - tol,
        ]
    )

    total = float(areas.sum())
    if abs(total - window.area) > 1e-9 * window.area:
        raise DegenerateConfigurationError(
            f"cells do not tile the window: total area {total} vs {window.area}"
        )

    rp = vor.ridge_points
    rv = np.asarray(vor.ridge_vertices)
    both_orig = (rp[:, 0] < n) & (rp[:, 1] < n) & (rv[:, 0] >= 0) & (rv[:, 1] >= 0)
    seg = vor.vertices[rv[both_orig]]
    length = np.sqrt(((seg[:, 0] - seg[:, 1]) ** 2).sum(axis=1))
    keep = length > tol
    pairs = np.sort(rp[both_orig][keep].astype(np.int32), axis=1)
    seg = seg[keep]
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    edges = np.ascontiguousarray(pairs[order])
    edge_segments = np.ascontiguousarray(seg[order])

    nb: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        nb[a].append(int(b))
        nb[b].append(int(a))
    neighbors = tuple(np.array(sorted(v), dtype=np.int32) for v in nb)

    for arr in (edges, edge_segments, side_touch, radii, areas, bboxes):
        arr.setflags(write=False)
    return Tessellation(
        config=config,
        cells=tuple(cells),
        edges=edges,
        edge_segments=edge_segments,
        neighbors=neighbors,
        side_touch=side_touch,
        radii=radii,
        areas=areas,
        bboxes=bboxes,
    )


class RadiusStats(NamedTuple):
    max_radius: float
    radii: np.ndarray


def cell_radius_stats(tess: Tessellation) -> RadiusStats:
    """Max cell radius together with the per-cell radius vector."""
    return RadiusStats(float(tess.radii.max()), tess.radii)


# ---------------------------------------------------------------------------
# small geometry predicates shared by the query modules
# ---------------------------------------------------------------------------

def clip_polygon(verts: np.ndarray, bounds: tuple[float, float, float, float], tol: float = 0.0) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon to a closed rectangle.

    With positive tol the rectangle is inflated, so boundary contact within
    tol survives the clip (closed-set convention).
    """
    xmin, xmax, ymin, ymax = bounds
    poly = verts
    # (coordinate index, bound, keep-side sign)
    for axis, bound, sign in ((0, xmin - tol, 1.0), (0, xmax + tol, -1.0), (1, ymin - tol, 1.0), (1, ymax + tol, -1.0)):
        if len(poly) == 0:
            return poly
        d = sign * (poly[:, axis] - bound)
        nxt = np.roll(np.arange(len(poly)), -1)
        out: list[np.ndarray] = []
        for i in range(len(poly)):
            j = nxt[i]
            if d[i] >= 0.0:
                out.append(poly[i])
                if d[j] < 0.0:
                    t = d[i] / (d[i] - d[j])
                    out.append(poly[i] + t * (poly[j] - poly[i]))
            elif d[j] >= 0.0:
                t = d[i] / (d[i] - d[j])
                out.append(poly[i] + t * (poly[j] - poly[i]))
        poly = np.asarray(out) if out else np.empty((0, 2))
    return poly


def polygon_meets_rect(verts: np.ndarray, bounds: tuple[float, float, float, float], tol: float) -> bool:
    """Nonempty intersection of a convex polygon with a closed rectangle."""
    xmin, xmax, ymin, ymax = bounds
    vxmin, vymin = verts.min(axis=0)
    vxmax, vymax = verts.max(axis=0)
    if vxmax < xmin - tol or vxmin > xmax + tol or vymax < ymin - tol or vymin > ymax + tol:
        return False
    if vxmin >= xmin - tol and vxmax <= xmax + tol and vymin >= ymin - tol and vymax <= ymax + tol:
        return True
    return len(clip_polygon(verts, bounds, tol)) > 0


def clip_segments_to_rect(
    segments: np.ndarray, bounds: tuple[float, float, float, float], tol: float
) -> tuple[np.ndarray, np.ndarray]:
    """Clip closed segments to a closed rectangle.

    Returns (mask, clipped) where mask flags segments meeting the rectangle
    and clipped holds the surviving subsegment endpoints (undefined rows
    where mask is False).
    """
    xmin, xmax, ymin, ymax = bounds
    p0 = segments[:, 0, :]
    d = segments[:, 1, :] - p0
    t0 = np.zeros(len(segments))
    t1 = np.ones(len(segments))
    ok = np.ones(len(segments), dtype=bool)
    for p, q in (
        (-d[:, 0], p0[:, 0] - (xmin - tol)),
        (d[:, 0], (xmax + tol) - p0[:, 0]),
        (-d[:, 1], p0[:, 1] - (ymin - tol)),
        (d[:, 1], (ymax + tol) - p0[:, 1]),
    ):
        parallel = p == 0.0
        ok &= ~(parallel & (q < 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            t = q / p
        entering = p < 0.0
        t0 = np.where(~parallel & entering, np.maximum(t0, t), t0)
        t1 = np.where(~parallel & ~entering, np.minimum(t1, t), t1)
    ok &= t0 <= t1
    clipped = np.empty_like(segments)
    clipped[:, 0, :] = p0 + t0[:, None] * d
    clipped[:, 1, :] = p0 + t1[:, None] * d
    return ok, clipped


def segments_meet_rect(segments: np.ndarray, bounds: tuple[float, float, float, float], tol: float) -> np.ndarray:
    """Vectorized closed-segment vs closed-rectangle intersection test."""
    ok, _ = clip_segments_to_rect(segments, bounds, tol)
    return ok


def vline_span(verts: np.ndarray, x0: float, tol: float) -> tuple[float, float] | None:
    """y-interval of (convex polygon) ∩ (vertical line x = x0), or None."""
    x = verts[:, 0]
    if x.max() < x0 - tol or x.min() > x0 + tol:
        return None
    ys: list[float] = []
    k = len(verts)
    for i in range(k):
        j = (i + 1) % k
        xi, xj = x[i], x[j]
        if abs(xi - x0) <= tol:
            ys.append(verts[i, 1])
        lo, hi = (xi, xj) if xi <= xj else (xj, xi)
        if lo < x0 < hi:
            t = (x0 - xi) / (xj - xi)
            ys.append(verts[i, 1] + t * (verts[j, 1] - verts[i, 1]))
    if not ys:
        return None
    return (min(ys), max(ys))


def strip_x_extent(verts: np.ndarray, ymin: float, ymax: float, tol: float) -> tuple[float, float] | None:
    """x-range of (convex polygon) ∩ (horizontal strip ymin..ymax), or None.

    A vertical segment at abscissa x0 spanning the strip meets the polygon
    iff x0 lies in this range (convexity makes the projection an interval).
    """
    clipped = clip_polygon(verts, (-np.inf, np.inf, ymin, ymax), tol)
    if len(clipped) == 0:
        return None
    return (float(clipped[:, 0].min()), float(clipped[:, 0].max()))
