import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from voronoiperc import (
    BLUE,
    HORIZONTAL,
    RED,
    VERTICAL,
    CrossingQuery,
    EnumerationLimitError,
    Rect,
    build_query_graph,
    influence_l2,
    influences_exact,
    influences_mc,
)

from conftest import UNIT, tess_cached
from oracles import influences_naive

WINDOW_QUERY = CrossingQuery(target=UNIT, direction=HORIZONTAL, color=RED)


class TestExact:
    def test_single_cell(self, single_cell):
        vec = influences_exact(single_cell, WINDOW_QUERY)
        assert vec.values.tolist() == [1.0]
        assert vec.sum_sq == 1.0
        assert influence_l2(vec) == 1.0

    def test_two_cell_and(self, two_cells_vertical):
        vec = influences_exact(two_cells_vertical, WINDOW_QUERY)
        assert vec.values.tolist() == [0.5, 0.5]
        assert vec.sum_sq == 0.5

    def test_two_cell_or(self, two_cells_horizontal):
        # OR event: flipping matters only when the other cell is blue
        vec = influences_exact(two_cells_horizontal, WINDOW_QUERY)
        assert vec.values.tolist() == [0.5, 0.5]
        assert vec.sum_sq == 0.5

    @pytest.mark.parametrize("n,seed", [(8, 2), (12, 7), (12, 19)])
    def test_matches_naive_recount(self, n, seed):
        tess = tess_cached(n, seed)
        vec = influences_exact(tess, WINDOW_QUERY)
        graph = build_query_graph(tess, UNIT, HORIZONTAL)
        naive = influences_naive(graph)
        for local, g in enumerate(graph.region):
            assert vec.values[g] == float(naive[local])
        assert influence_l2(vec) == float(sum(f * f for f in naive))

    def test_guard(self):
        with pytest.raises(EnumerationLimitError):
            influences_exact(tess_cached(25, 0), WINDOW_QUERY)

    def test_zero_off_target(self):
        tess = tess_cached(16, 4)
        target = Rect(rho=1.0, area=0.2, center=(-0.15, 0.1))
        vec = influences_exact(tess, CrossingQuery(target, HORIZONTAL, RED))
        graph = build_query_graph(tess, target, HORIZONTAL)
        off = np.setdiff1d(np.arange(tess.n_cells), graph.region)
        assert len(off) > 0
        assert (vec.values[off] == 0.0).all()

    def test_duality_swap_identity(self):
        # flipping one bit changes red-LR iff it changes blue-TB (complement event)
        for n, seed in [(7, 1), (11, 3), (14, 6)]:
            tess = tess_cached(n, seed)
            red_h = influences_exact(tess, CrossingQuery(UNIT, HORIZONTAL, RED))
            blue_v = influences_exact(tess, CrossingQuery(UNIT, VERTICAL, BLUE))
            assert red_h.values.tolist() == blue_v.values.tolist()


class TestMonteCarlo:
    def test_single_cell(self, single_cell):
        vec = influences_mc(single_cell, WINDOW_QUERY, 10_000, 1)
        assert vec.values[0] == 1.0

    def test_two_cell_and(self, two_cells_vertical):
        vec = influences_mc(two_cells_vertical, WINDOW_QUERY, 100_000, 5)
        sigma = math.sqrt(0.25 / 100_000)
        assert abs(vec.values[0] - 0.5) <= 4 * sigma
        assert abs(vec.values[1] - 0.5) <= 4 * sigma

    def test_agrees_with_exact_per_entry(self):
        tess = tess_cached(16, 11)
        exact = influences_exact(tess, WINDOW_QUERY)
        mc = influences_mc(tess, WINDOW_QUERY, 100_000, 23)
        bad = 0
        for j in range(tess.n_cells):
            p = exact.values[j]
            sigma = math.sqrt(p * (1 - p) / 100_000)
            if abs(mc.values[j] - p) > 4 * sigma:
                bad += 1
        assert bad / tess.n_cells <= 0.05

    def test_worker_determinism(self):
        tess = tess_cached(30, 9)
        a = influences_mc(tess, WINDOW_QUERY, 4096, 3, workers=1)
        b = influences_mc(tess, WINDOW_QUERY, 4096, 3, workers=6)
        assert a.values.tolist() == b.values.tolist()

    def test_blue_color_flips_coloring_not_result_scale(self):
        # the blue event's influences are estimated from inverted colorings;
        # per-entry values still agree with the exact blue influences
        tess = tess_cached(10, 13)
        q = CrossingQuery(UNIT, VERTICAL, BLUE)
        exact = influences_exact(tess, q)
        mc = influences_mc(tess, q, 50_000, 7)
        for j in range(tess.n_cells):
            p = exact.values[j]
            sigma = math.sqrt(p * (1 - p) / 50_000)
            assert abs(mc.values[j] - p) <= 4 * sigma + 1e-12


class TestSumSquares:
    def test_simple_values(self):
        class Dummy:
            exact_pair_counts = None
            exact_bits = None

        d = Dummy()
        d.values = np.array([1.0])
        assert influence_l2(d) == 1.0
        d.values = np.array([0.5, 0.5])
        assert influence_l2(d) == 0.5

    @pytest.mark.parametrize("n,seed", [(10, 21), (14, 22), (18, 23)])
    def test_monotone_event_bound(self, n, seed):
        vec = influences_exact(tess_cached(n, seed), WINDOW_QUERY)
        assert influence_l2(vec) <= 1.0

    def test_exact_l2_is_integer_arithmetic(self):
        tess = tess_cached(12, 31)
        vec = influences_exact(tess, WINDOW_QUERY)
        k = vec.exact_bits
        total = int(np.dot(vec.exact_pair_counts, vec.exact_pair_counts))
        assert influence_l2(vec) == math.ldexp(total, -2 * (k - 1))


@settings(max_examples=20, deadline=None)
@given(n=st.integers(min_value=1, max_value=10), seed=st.integers(min_value=0, max_value=2**31))
def test_exact_influences_property(n, seed):
    tess = tess_cached(n, seed % 48)
    vec = influences_exact(tess, WINDOW_QUERY)
    assert ((vec.values >= 0.0) & (vec.values <= 1.0)).all()
    assert influence_l2(vec) <= 1.0
    graph = build_query_graph(tess, UNIT, HORIZONTAL)
    naive = influences_naive(graph)
    for local, g in enumerate(graph.region):
        assert vec.values[g] == float(naive[local])
