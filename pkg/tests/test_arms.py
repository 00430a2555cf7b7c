import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from voronoiperc import (
    AnnulusQuery,
    ArmQuery,
    Coloring,
    EnumerationLimitError,
    Rect,
    blue_circuit_indicator,
    blue_circuit_quenched_mc,
    build_annulus_graph,
    build_arm_graph,
    build_tessellation,
    draw_coloring,
    one_arm_indicator,
    one_arm_quenched_exact,
    one_arm_quenched_mc,
    sample_binomial,
)
from voronoiperc import rng as vrng
from voronoiperc.geometry import GEOM_TOL, clip_polygon

from conftest import UNIT, tess_cached, user_tess
from oracles import arm_indicator_naive, sup_dist

GRID = [[x, y] for y in (-1 / 3, 0.0, 1 / 3) for x in (-1 / 3, 0.0, 1 / 3)]
CENTER = 4          # nucleus (0, 0)
MIDS = (1, 3, 5, 7)  # edge-midpoint nuclei


@pytest.fixture(scope="module")
def grid_tess():
    return user_tess(GRID)


class TestQueryValidation:
    def test_arm_radii(self):
        with pytest.raises(ValueError):
            ArmQuery(u=(0.0, 0.0), a=0.3, b=0.2)
        with pytest.raises(ValueError):
            ArmQuery(u=(0.0, 0.0), a=0.0, b=0.2)

    def test_annulus_scale(self):
        with pytest.raises(ValueError):
            AnnulusQuery(center=(0.0, 0.0), j=0)
        q = AnnulusQuery(center=(0.0, 0.0), j=1)
        assert q.inner_half == 3.5
        assert q.outer_half == 10.5
        q2 = AnnulusQuery(center=(1.0, 2.0), j=2)
        assert q2.inner_half == 24.5
        assert q2.outer_half == 73.5

    def test_ball_outside_ambient(self, grid_tess):
        with pytest.raises(ValueError):
            build_arm_graph(grid_tess, ArmQuery(u=(5.0, 5.0), a=0.1, b=0.3))

    def test_coloring_length(self, grid_tess):
        q = ArmQuery(u=(0.0, 0.0), a=0.1, b=0.45)
        with pytest.raises(ValueError):
            one_arm_indicator(grid_tess, draw_coloring(4, 0), q)


class TestGridExactValues:
    # 3x3 grid of square cells: center cell only start, mid cells reach 0.45

    def test_center_arm(self, grid_tess):
        est = one_arm_quenched_exact(grid_tess, ArmQuery(u=(0.0, 0.0), a=0.1, b=0.45))
        assert est.value == 15 / 32
        assert est.method == "exact"
        assert est.ci_halfwidth == 0.0
        assert math.ldexp(est.exact_count, -est.exact_bits) == est.value

    def test_center_arm_wider_start(self, grid_tess):
        # a = 0.2 > 1/6 pulls every outer cell into the start set, and each
        # outer cell is already an end, so the arm needs any outer cell red
        est = one_arm_quenched_exact(grid_tess, ArmQuery(u=(0.0, 0.0), a=0.2, b=0.45))
        assert est.value == 255 / 256

    def test_band_ambient(self, grid_tess):
        # region limited to the middle row; event = center and (left or right)
        band = Rect(rho=10 / 3, area=0.3)
        q = ArmQuery(u=(0.0, 0.0), a=0.1, b=0.45, ambient=band)
        est = one_arm_quenched_exact(grid_tess, q)
        assert est.value == 3 / 8

    def test_corner_point(self, grid_tess):
        # the corner cell alone starts and already reaches distance 0.3
        est = one_arm_quenched_exact(grid_tess, ArmQuery(u=(0.5, 0.5), a=0.1, b=0.3))
        assert est.value == 0.5

    def test_mid_side_point(self, grid_tess):
        est = one_arm_quenched_exact(grid_tess, ArmQuery(u=(0.5, 0.0), a=0.1, b=0.3))
        assert est.value == 0.5

    def test_indicator_matches_event(self, grid_tess):
        q = ArmQuery(u=(0.0, 0.0), a=0.1, b=0.45)
        for seed in range(32):
            col = draw_coloring(9, seed)
            expect = bool(col.bits[CENTER]) and any(col.bits[m] for m in MIDS)
            assert one_arm_indicator(grid_tess, col, q) == expect


class TestArmAgainstNaive:
    @pytest.mark.parametrize("n,seed", [(6, 1), (10, 2), (12, 3)])
    def test_random_instances(self, n, seed):
        tess = tess_cached(n, seed)
        queries = [
            ArmQuery(u=(0.0, 0.0), a=0.08, b=0.3),
            ArmQuery(u=(-0.2, 0.1), a=0.05, b=0.25),
            ArmQuery(u=(0.5, 0.5), a=0.1, b=0.4),
        ]
        for q in queries:
            for cseed in range(10):
                col = draw_coloring(n, cseed)
                naive = arm_indicator_naive(tess, col.bits, q.u, q.a, q.b, UNIT.bounds)
                assert one_arm_indicator(tess, col, q) == naive

    def test_exact_equals_full_enumeration(self):
        tess = tess_cached(8, 9)
        q = ArmQuery(u=(0.0, 0.0), a=0.1, b=0.35)
        est = one_arm_quenched_exact(tess, q)
        hits = 0
        for code in range(1 << 8):
            bits = np.array([(code >> i) & 1 for i in range(8)], dtype=np.uint8)
            hits += one_arm_indicator(tess, Coloring(bits), q)
        assert est.value == hits / 256.0

    def test_enumeration_guard(self):
        tess = tess_cached(25, 0)
        with pytest.raises(EnumerationLimitError):
            one_arm_quenched_exact(tess, ArmQuery(u=(0.0, 0.0), a=0.1, b=0.3))


class TestArmMonotonicity:
    def test_red_monotone(self):
        # turning a blue cell red never destroys the arm
        tess = tess_cached(12, 5)
        q = ArmQuery(u=(0.0, 0.0), a=0.1, b=0.35)
        for cseed in range(20):
            col = draw_coloring(12, cseed)
            before = one_arm_indicator(tess, col, q)
            blues = np.flatnonzero(col.bits == 0)
            if len(blues) == 0:
                continue
            bits = col.bits.copy()
            bits[blues[cseed % len(blues)]] = 1
            after = one_arm_indicator(tess, Coloring(bits), q)
            assert after >= before

    def test_anti_monotone_in_b(self):
        # a chain out to the larger radius contains a chain to the smaller
        for n, seed in [(10, 11), (14, 12)]:
            tess = tess_cached(n, seed)
            q_near = ArmQuery(u=(0.0, 0.0), a=0.08, b=0.25)
            q_far = ArmQuery(u=(0.0, 0.0), a=0.08, b=0.4)
            for cseed in range(25):
                col = draw_coloring(n, cseed)
                if one_arm_indicator(tess, col, q_far):
                    assert one_arm_indicator(tess, col, q_near)
            near = one_arm_quenched_exact(tess, q_near).value
            far = one_arm_quenched_exact(tess, q_far).value
            assert far <= near

    def test_monotone_in_a(self):
        for n, seed in [(10, 13), (14, 14)]:
            tess = tess_cached(n, seed)
            q_small = ArmQuery(u=(0.0, 0.0), a=0.05, b=0.35)
            q_large = ArmQuery(u=(0.0, 0.0), a=0.15, b=0.35)
            for cseed in range(25):
                col = draw_coloring(n, cseed)
                if one_arm_indicator(tess, col, q_small):
                    assert one_arm_indicator(tess, col, q_large)
            assert (
                one_arm_quenched_exact(tess, q_small).value
                <= one_arm_quenched_exact(tess, q_large).value
            )

    def test_shift_covariance(self):
        window = Rect(rho=1.0, area=1.0)
        pts = sample_binomial(window, 10, seed=21).points
        tess_a = user_tess(pts, window)
        shift = np.array([3.0, -2.0])
        window_b = Rect(rho=1.0, area=1.0, center=(3.0, -2.0))
        tess_b = user_tess(pts + shift, window_b)
        for cseed in range(10):
            col = draw_coloring(10, cseed)
            qa = ArmQuery(u=(0.05, -0.1), a=0.07, b=0.3)
            qb = ArmQuery(u=(3.05, -2.1), a=0.07, b=0.3)
            assert one_arm_indicator(tess_a, col, qa) == one_arm_indicator(tess_b, col, qb)


class TestArmMonteCarlo:
    def test_matches_exact_within_4_sigma(self):
        tess = tess_cached(14, 31)
        q = ArmQuery(u=(0.0, 0.0), a=0.1, b=0.35)
        exact = one_arm_quenched_exact(tess, q).value
        m = 50_000
        est = one_arm_quenched_mc(tess, q, m, seed=3)
        sigma = math.sqrt(exact * (1 - exact) / m)
        assert abs(est.value - exact) <= 4 * sigma
        assert est.ci_halfwidth > 0.0
        assert est.colorings_used == m

    def test_block_stream_matches_indicator(self):
        # one block: the vectorized path must agree run for run with the indicator
        tess = tess_cached(16, 33)
        q = ArmQuery(u=(0.0, 0.0), a=0.1, b=0.35)
        m, seed = 64, 17
        est = one_arm_quenched_mc(tess, q, m, seed)
        colors = vrng.coloring_block(16, m, seed, vrng.COLORING, 0)
        manual = sum(one_arm_indicator(tess, Coloring(colors[i]), q) for i in range(m))
        assert est.value == manual / m

    def test_determinism(self):
        tess = tess_cached(20, 35)
        q = ArmQuery(u=(0.0, 0.0), a=0.1, b=0.35)
        a = one_arm_quenched_mc(tess, q, 5000, 7)
        b = one_arm_quenched_mc(tess, q, 5000, 7)
        assert a.value == b.value

    def test_m_validation(self, grid_tess):
        with pytest.raises(ValueError):
            one_arm_quenched_mc(grid_tess, ArmQuery(u=(0.0, 0.0), a=0.1, b=0.3), 0, 1)


BIG = Rect(rho=1.0, area=576.0)  # 24 x 24, holds the j=1 annulus with margin


def big_tess(n, seed):
    return build_tessellation(sample_binomial(BIG, n, seed))


class TestAnnulusGraph:
    def test_region_excludes_hole_and_far_cells(self):
        tess = big_tess(500, 41)
        q = AnnulusQuery(center=(0.0, 0.0), j=1)
        graph = build_annulus_graph(tess, q)
        tol = GEOM_TOL * tess.window.scale
        obounds = (-q.outer_half, q.outer_half, -q.outer_half, q.outer_half)
        in_region = set(int(g) for g in graph.region)
        assert 0 < len(in_region) < tess.n_cells
        for i in range(tess.n_cells):
            part = clip_polygon(tess.cells[i], obounds, tol)
            if len(part) == 0:
                reach = None
            else:
                reach = max(sup_dist(tuple(v), q.center) for v in part)
            if i in in_region:
                assert reach is not None and reach >= q.inner_half - tol
            else:
                assert reach is None or reach < q.inner_half + tol

    def test_ends_reach_outer_boundary(self):
        tess = big_tess(500, 41)
        q = AnnulusQuery(center=(0.0, 0.0), j=1)
        graph = build_annulus_graph(tess, q)
        tol = GEOM_TOL * tess.window.scale
        obounds = (-q.outer_half, q.outer_half, -q.outer_half, q.outer_half)
        ends = graph.region[graph.end_flag.astype(bool)]
        assert len(ends) > 0
        for g in ends:
            part = clip_polygon(tess.cells[g], obounds, tol)
            assert max(sup_dist(tuple(v), q.center) for v in part) >= q.outer_half - tol


class TestCircuit:
    def test_all_blue_has_circuit(self):
        tess = big_tess(400, 43)
        q = AnnulusQuery(center=(0.0, 0.0), j=1)
        assert blue_circuit_indicator(tess, Coloring(np.zeros(400, dtype=np.uint8)), q)

    def test_all_red_has_no_circuit(self):
        tess = big_tess(400, 43)
        q = AnnulusQuery(center=(0.0, 0.0), j=1)
        assert not blue_circuit_indicator(tess, Coloring(np.ones(400, dtype=np.uint8)), q)

    def test_anti_monotone_in_red(self):
        tess = big_tess(300, 45)
        q = AnnulusQuery(center=(0.0, 0.0), j=1)
        for cseed in range(15):
            col = draw_coloring(300, cseed)
            before = blue_circuit_indicator(tess, col, q)
            blues = np.flatnonzero(col.bits == 0)
            bits = col.bits.copy()
            bits[blues[cseed % len(blues)]] = 1
            after = blue_circuit_indicator(tess, Coloring(bits), q)
            assert after <= before

    def test_mc_matches_indicator_stream(self):
        tess = big_tess(300, 45)
        q = AnnulusQuery(center=(0.0, 0.0), j=1)
        m, seed = 64, 29
        est = blue_circuit_quenched_mc(tess, q, m, seed)
        colors = vrng.coloring_block(300, m, seed, vrng.COLORING, 0)
        manual = sum(blue_circuit_indicator(tess, Coloring(colors[i]), q) for i in range(m))
        assert est.value == manual / m
        assert 0.0 <= est.value <= 1.0
        assert est.colorings_used == m

    def test_mc_nondegenerate(self):
        # sparse enough that blue circuits occur, dense enough that they fail
        tess = big_tess(64, 47)
        q = AnnulusQuery(center=(0.0, 0.0), j=1)
        est = blue_circuit_quenched_mc(tess, q, 512, 3)
        assert 0.0 < est.value < 1.0


@settings(max_examples=15, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=10),
    seed=st.integers(min_value=0, max_value=10**6),
    cseed=st.integers(min_value=0, max_value=10**6),
)
def test_arm_indicator_property(n, seed, cseed):
    tess = tess_cached(n, seed % 24)
    col = draw_coloring(n, cseed)
    q = ArmQuery(u=(0.0, 0.0), a=0.09, b=0.33)
    naive = arm_indicator_naive(tess, col.bits, q.u, q.a, q.b, UNIT.bounds)
    assert one_arm_indicator(tess, col, q) == naive
