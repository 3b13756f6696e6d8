import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdlayout.backends.common import pair_direction_compiled
from fdlayout.forces import (
    MIN_SEPARATION_EPSILON,
    ForceParams,
    compute_k,
    cool,
    displace,
    f_att,
    f_rep,
    f_rep_cutoff,
    jitter_delta,
    pair_direction,
)

TOL = 1e-12

coords = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
ks = st.floats(0.01, 100.0)


def vec(x, y):
    return np.array([x, y], dtype=np.float64)


class TestRepulsion:
    def test_unit_distance(self):
        assert f_rep(vec(1, 0), 1.0) == pytest.approx((1.0, 0.0), abs=TOL)

    def test_half_at_distance_two(self):
        assert f_rep(vec(0, 2), 1.0) == pytest.approx((0.0, 0.5), abs=TOL)

    def test_three_four_five(self):
        assert f_rep(vec(3, 4), 2.0) == pytest.approx((0.48, 0.64), abs=TOL)

    def test_rejects_coincident(self):
        with pytest.raises(ValueError):
            f_rep(vec(0, 0), 1.0)

    @given(coords, coords, ks)
    @settings(max_examples=200)
    def test_antisymmetry_and_magnitude(self, dx, dy, k):
        d = math.hypot(dx, dy)
        if d < 1e-6:
            return
        fwd = f_rep(vec(dx, dy), k)
        bwd = f_rep(vec(-dx, -dy), k)
        assert np.array_equal(fwd, -bwd)
        assert np.hypot(*fwd) == pytest.approx(k * k / d, rel=1e-9)


class TestRepulsionCutoff:
    def test_outside_radius_zero(self):
        assert f_rep_cutoff(vec(3, 0), 1.0).tolist() == [0.0, 0.0]

    def test_inside_equals_f_rep(self):
        assert np.array_equal(f_rep_cutoff(vec(1, 0), 1.0), f_rep(vec(1, 0), 1.0))

    def test_boundary_exactly_2k_zero(self):
        assert f_rep_cutoff(vec(2, 0), 1.0).tolist() == [0.0, 0.0]

    @given(coords, coords, ks)
    @settings(max_examples=200)
    def test_agrees_inside_zero_outside(self, dx, dy, k):
        d = math.hypot(dx, dy)
        if d < 1e-6:
            return
        got = f_rep_cutoff(vec(dx, dy), k)
        if d < 2 * k:
            assert np.array_equal(got, f_rep(vec(dx, dy), k))
        else:
            assert got.tolist() == [0.0, 0.0]


class TestAttraction:
    def test_distance_two(self):
        assert f_att(vec(2, 0), 1.0) == pytest.approx((4.0, 0.0), abs=TOL)

    def test_distance_one_k_two(self):
        assert f_att(vec(0, 1), 2.0) == pytest.approx((0.0, 0.5), abs=TOL)

    def test_three_four_k_five(self):
        assert f_att(vec(3, 4), 5.0) == pytest.approx((3.0, 4.0), abs=TOL)

    @given(coords, coords, ks)
    @settings(max_examples=200)
    def test_magnitude(self, dx, dy, k):
        d = math.hypot(dx, dy)
        if d < 1e-6:
            return
        assert np.hypot(*f_att(vec(dx, dy), k)) == pytest.approx(
            d * d / k, rel=1e-9
        )


class TestComputeK:
    def test_square_aabb(self):
        pos = np.array([[0.0, 0.0], [100.0, 100.0]] + [[50.0, 50.0]] * 98)
        assert compute_k(pos) == pytest.approx(10.0, abs=TOL)

    def test_collinear_clamped(self):
        pos = np.array([[0.0, 5.0], [2.0, 5.0], [5.0, 5.0], [8.0, 5.0]])
        assert compute_k(pos) == pytest.approx(math.sqrt(8 / 4), abs=TOL)

    def test_single_vertex_clamped(self):
        assert compute_k(np.array([[3.0, 4.0]])) == pytest.approx(1.0, abs=TOL)


class TestCool:
    def test_start(self):
        assert cool(10.0, 0, 100) == pytest.approx(10.0, abs=TOL)

    def test_midpoint(self):
        assert cool(10.0, 50, 100) == pytest.approx(5.0, abs=TOL)

    def test_last_iteration(self):
        assert cool(10.0, 99, 100) == pytest.approx(0.1, abs=TOL)

    def test_strictly_decreasing(self):
        ts = [cool(7.0, i, 50) for i in range(50)]
        assert all(a > b for a, b in zip(ts, ts[1:]))


class TestDisplace:
    def test_clamped_to_t(self):
        pos = np.zeros((1, 2))
        displace(pos, np.array([[3.0, 0.0]]), 1.0)
        assert pos[0].tolist() == pytest.approx([1.0, 0.0], abs=TOL)

    def test_below_clamp_moves_fully(self):
        pos = np.zeros((1, 2))
        displace(pos, np.array([[0.5, 0.0]]), 1.0)
        assert pos[0].tolist() == pytest.approx([0.5, 0.0], abs=TOL)

    def test_zero_dispersion_unmoved(self):
        pos = np.array([[2.0, 3.0]])
        displace(pos, np.zeros((1, 2)), 5.0)
        assert pos[0].tolist() == [2.0, 3.0]

    @given(
        st.lists(st.tuples(coords, coords), min_size=1, max_size=20),
        st.just(0.0) | st.floats(1e-9, 10.0),
    )
    @settings(max_examples=100)
    def test_never_moves_more_than_t(self, disps, t):
        disp = np.array(disps, dtype=np.float64)
        pos = np.zeros_like(disp)
        displace(pos, disp, t)
        moved = np.hypot(pos[:, 0], pos[:, 1])
        assert (moved <= t * (1 + 1e-12)).all()


class TestForceParams:
    def test_cutoff_must_be_2k(self):
        with pytest.raises(ValueError):
            ForceParams(k=1.0, cutoff_radius=1.5, temperature=1.0)

    def test_from_k(self):
        p = ForceParams.from_k(3.0, temperature=0.5)
        assert p.cutoff_radius == 6.0


class TestJitter:
    def test_interpreted_matches_compiled_bitwise(self):
        for a, b in [(0, 1), (1, 0), (5, 2), (123456, 789), (3, 3), (2**31, 7)]:
            assert pair_direction(a, b) == pair_direction_compiled(a, b)

    def test_direction_symmetric_in_pair(self):
        assert pair_direction(4, 9) == pair_direction(9, 4)

    def test_delta_antisymmetric(self):
        fwd = jitter_delta(4, 9)
        bwd = jitter_delta(9, 4)
        assert fwd == (-bwd[0], -bwd[1])

    @given(st.integers(0, 2**31), st.integers(0, 2**31))
    @settings(max_examples=100)
    def test_unit_magnitude(self, a, b):
        x, y = pair_direction(a, b)
        assert math.hypot(x, y) == pytest.approx(1.0, rel=1e-12)

    def test_delta_magnitude_is_eps(self):
        dx, dy = jitter_delta(1, 2)
        assert math.hypot(dx, dy) == pytest.approx(
            MIN_SEPARATION_EPSILON, rel=1e-12
        )
