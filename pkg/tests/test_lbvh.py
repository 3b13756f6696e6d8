import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdlayout.backends.lbvh import (
    Aabb,
    build_lbvh,
    gather_visited,
    morton_codes,
    morton_decode,
    morton_encode,
    neighbors_all,
    radius_gather,
    repulsive,
    validate_lbvh,
)
from fdlayout.backends.naive import repulsive_naive_cutoff
from fdlayout.forces import compute_k

from oracles import brute_neighbors


def random_points(n, seed, scale=100.0):
    return np.random.default_rng(seed).random((n, 2)) * scale


UNIT_WORLD = Aabb(0.0, 0.0, 1.0, 1.0)


class TestMorton:
    def test_interleave_by_hand(self):
        # quantized (x=3, y=1): x bits at even positions -> 0b0111 = 7
        pos = np.array([[3.5 / 65536.0, 1.5 / 65536.0]])
        assert morton_encode(pos[0], UNIT_WORLD) == 7

    def test_origin_is_zero(self):
        assert morton_encode((0.0, 0.0), UNIT_WORLD) == 0

    def test_decode_round_trip(self):
        pos = random_points(500, 0, scale=1.0)
        codes = morton_codes(pos, UNIT_WORLD)
        qx = np.clip(np.floor(pos[:, 0] * 65535.0), 0, 65535).astype(int)
        qy = np.clip(np.floor(pos[:, 1] * 65535.0), 0, 65535).astype(int)
        for c, ex, ey in zip(codes.tolist(), qx.tolist(), qy.tolist()):
            assert morton_decode(c) == (ex, ey)

    def test_out_of_box_clamped(self):
        world = Aabb(0.0, 0.0, 1.0, 1.0)
        assert morton_encode((-5.0, 2.0), world) == morton_encode((0.0, 1.0), world)


class TestBuild:
    def test_single_primitive_root_is_leaf(self):
        bvh = build_lbvh(np.array([[2.0, 3.0]]))
        assert bvh.n == 1
        assert bvh.is_leaf(bvh.root)
        assert bvh.primitive_of(bvh.root) == 0
        validate_lbvh(bvh)

    def test_structural_counts(self):
        for n in (2, 3, 7, 64, 1000):
            bvh = build_lbvh(random_points(n, n))
            assert bvh.left.shape[0] == n - 1
            validate_lbvh(bvh)

    def test_duplicate_positions_id_tiebreak(self):
        pos = np.vstack([np.full((20, 2), 5.0), random_points(30, 1)])
        bvh = build_lbvh(pos)
        validate_lbvh(bvh)

    def test_every_point_reachable_by_containment_walk(self):
        pos = random_points(10_000, 9)
        bvh = build_lbvh(pos)
        n = bvh.n
        for p in range(0, n, 97):
            x, y = pos[p]
            stack = [0]
            found = False
            while stack:
                node = stack.pop()
                if (bvh.aabb_min[node, 0] <= x <= bvh.aabb_max[node, 0]
                        and bvh.aabb_min[node, 1] <= y <= bvh.aabb_max[node, 1]):
                    if node >= n - 1:
                        if bvh.primitive_of(node) == p:
                            found = True
                            break
                    else:
                        stack.extend((int(bvh.left[node]), int(bvh.right[node])))
            assert found

    @given(st.integers(1, 400))
    @settings(max_examples=60, deadline=None)
    def test_random_builds_valid(self, n):
        bvh = build_lbvh(random_points(n, n * 7 + 1))
        validate_lbvh(bvh)

    def test_build_time_subquadratic(self):
        sizes = [1 << e for e in range(8, 19, 2)]
        times = []
        for n in sizes:
            pos = random_points(n, n)
            build_lbvh(pos)  # warm any lazy state
            best = min(
                _timed(lambda: build_lbvh(pos)) for _ in range(3)
            )
            times.append(best)
        slope = np.polyfit(np.log(sizes), np.log(times), 1)[0]
        assert slope <= 1.3


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


class TestRadiusGather:
    def test_collinear_example(self):
        bvh = build_lbvh(np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 0.0]]))
        assert radius_gather(bvh, 0, 2.0).tolist() == [1]

    def test_radius_below_min_spacing_empty(self):
        pos = random_points(100, 3)
        bvh = build_lbvh(pos)
        for q in range(100):
            assert radius_gather(bvh, q, 1e-9).size == 0

    def test_matches_brute_filter(self):
        pos = random_points(1000, 4)
        bvh = build_lbvh(pos)
        rng = np.random.default_rng(5)
        for q in rng.integers(0, 1000, size=50).tolist():
            r = float(rng.random() * 30)
            assert np.array_equal(radius_gather(bvh, q, r), brute_neighbors(pos, q, r))

    def test_symmetry(self):
        pos = random_points(300, 6)
        bvh = build_lbvh(pos)
        r = 2.0 * compute_k(pos)
        sets = [set(radius_gather(bvh, q, r).tolist()) for q in range(300)]
        for v in range(300):
            for u in sets[v]:
                assert v in sets[u]

    def test_gather_visited_positive(self):
        pos = random_points(500, 8)
        bvh = build_lbvh(pos)
        assert gather_visited(bvh, 0, 1.0) >= 1


class TestRepulsive:
    def test_matches_oracle_bitwise(self):
        for seed in range(5):
            pos = random_points(400, seed)
            k = compute_k(pos)
            got = np.zeros((400, 2))
            want = np.zeros((400, 2))
            repulsive(pos, k, got)
            repulsive_naive_cutoff(pos, k, want)
            assert np.array_equal(got, want)

    def test_all_far_apart_zero(self):
        pos = np.array([[0.0, 0.0], [100.0, 0.0], [0.0, 100.0], [100.0, 100.0]])
        disp = np.zeros((4, 2))
        repulsive(pos, 1.0, disp)
        assert not disp.any()

    def test_parallel_mode_bitwise_equal(self):
        pos = random_points(350, 11)
        k = compute_k(pos)
        serial = np.zeros((350, 2))
        parallel = np.zeros((350, 2))
        repulsive(pos, k, serial, threads=1)
        repulsive(pos, k, parallel, threads=0)
        assert np.array_equal(serial, parallel)

    def test_reports_build_and_traversal_times(self):
        pos = random_points(2000, 12)
        disp = np.zeros((2000, 2))
        times = repulsive(pos, compute_k(pos), disp)
        assert times.build_s > 0
        assert times.traversal_s > 0


class TestStackGuard:
    def test_large_build_never_overflows(self):
        n = 1 << 16
        pos = random_points(n, 13)
        r = 2.0 * compute_k(pos)
        nl = neighbors_all(pos, r)
        assert 0 < nl.max_stack <= 64

    def test_coincident_heavy_layout(self):
        # thousands of identical codes force splits into the id tiebreak bits
        pos = np.vstack([np.full((4096, 2), 7.0), random_points(4096, 14)])
        r = 2.0 * compute_k(pos)
        nl = neighbors_all(pos, r)
        assert nl.max_stack <= 64
