"""Hot loops for coloring batches, compiled with numba.

All kernels operate on a compact region-local graph: vertices are the cells
that meet the query target, re-indexed 0..nr-1, and edges are the shared
Voronoi edges relevant to the query.  Colorings arrive as uint8 matrices
with one row per run (1 = cell carries the query color).  Kernels release
the GIL so batches can be spread over threads; results are pure counts, so
any partition of the runs yields identical totals.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True, inline="always")
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True, nogil=True, inline="always")
def _crossing_one(ei, ej, start_idx, end_flag, col, parent, endroot):
    nr = parent.shape[0]
    for v in range(nr):
        parent[v] = v
        endroot[v] = 0
    for e in range(ei.shape[0]):
        a = ei[e]
        b = ej[e]
        if col[a] == 1 and col[b] == 1:
            ra = _find(parent, a)
            rb = _find(parent, b)
            if ra != rb:
                parent[ra] = rb
    for v in range(nr):
        if end_flag[v] == 1 and col[v] == 1:
            endroot[_find(parent, v)] = 1
    for k in range(start_idx.shape[0]):
        s = start_idx[k]
        if col[s] == 1 and endroot[_find(parent, s)] == 1:
            return True
    return False


@njit(cache=True, nogil=True)
def crossing_batch(ei, ej, start_idx, end_flag, colors, out):
    """out[r] = 1 iff coloring row r contains a start-to-end colored path."""
    nr = end_flag.shape[0]
    parent = np.empty(nr, np.int32)
    endroot = np.empty(nr, np.uint8)
    for r in range(colors.shape[0]):
        out[r] = 1 if _crossing_one(ei, ej, start_idx, end_flag, colors[r], parent, endroot) else 0


@njit(cache=True, nogil=True)
def pivot_batch(ei, ej, start_idx, end_flag, colors, base_out, pivot_counts):
    """Single-bit flips: pivot_counts[c] += 1 when flipping cell c changes the outcome."""
    nr = end_flag.shape[0]
    parent = np.empty(nr, np.int32)
    endroot = np.empty(nr, np.uint8)
    for r in range(colors.shape[0]):
        col = colors[r]
        base = _crossing_one(ei, ej, start_idx, end_flag, col, parent, endroot)
        base_out[r] = 1 if base else 0
        for c in range(nr):
            col[c] ^= 1
            flipped = _crossing_one(ei, ej, start_idx, end_flag, col, parent, endroot)
            col[c] ^= 1
            if flipped != base:
                pivot_counts[c] += 1


@njit(cache=True, nogil=True)
def explore_batch(indptr, indices, lmask, colors, query_counts):
    """Run the reveal-by-adjacency closure per row and accumulate query counts.

    Row r starts by querying every cell flagged in lmask[r]; thereafter any
    unqueried cell adjacent to a queried cell of the query color (colors
    row value 1) is queried, until no rule applies.  query_counts[c] is
    incremented once per row in which cell c was queried.
    """
    nr = indptr.shape[0] - 1
    queried = np.empty(nr, np.uint8)
    stack = np.empty(nr, np.int32)
    for r in range(lmask.shape[0]):
        top = 0
        for v in range(nr):
            q = lmask[r, v]
            queried[v] = q
            if q == 1:
                stack[top] = v
                top += 1
        while top > 0:
            top -= 1
            c = stack[top]
            if colors[r, c] == 1:
                for k in range(indptr[c], indptr[c + 1]):
                    nb = indices[k]
                    if queried[nb] == 0:
                        queried[nb] = 1
                        stack[top] = nb
                        top += 1
        for v in range(nr):
            if queried[v] == 1:
                query_counts[v] += 1
