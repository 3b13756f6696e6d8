import io
import math

import numpy as np
import pytest

from fdlayout.backends import UnknownBackendError
from fdlayout.forces import compute_k
from fdlayout.graph import Graph, gen_binary_tree, gen_k5_cluster_graph
from fdlayout.layout import (
    EngineConfig,
    Layout,
    attractive_phase,
    init_layout,
    load_positions_csv,
    run_layout,
    save_positions_csv,
)


def isolated(n):
    return Graph(n, np.empty((0, 2), dtype=np.int64))


class TestInitLayout:
    def test_deterministic_for_seed(self):
        g = isolated(100)
        a = init_layout(g, 1.0, seed=7)
        b = init_layout(g, 1.0, seed=7)
        assert np.array_equal(a.positions, b.positions)

    def test_seed_changes_layout(self):
        g = isolated(100)
        a = init_layout(g, 1.0, seed=7)
        b = init_layout(g, 1.0, seed=8)
        assert not np.array_equal(a.positions, b.positions)

    def test_range_contract(self):
        lay = init_layout(isolated(10_000), 100.0, seed=3)
        assert lay.positions.min() >= 0.0
        assert lay.positions.max() <= 100.0

    def test_sample_mean_near_half(self):
        lay = init_layout(isolated(100_000), 1.0, seed=5)
        assert lay.positions.mean() == pytest.approx(0.5, abs=0.01)

    def test_rejects_bad_extent(self):
        with pytest.raises(ValueError):
            init_layout(isolated(3), 0.0, seed=1)


class TestAttractivePhase:
    def test_single_edge_example(self):
        g = Graph(2, np.array([[0, 1]]))
        pos = np.array([[0.0, 0.0], [2.0, 0.0]])
        disp = np.zeros((2, 2))
        attractive_phase(g, pos, 1.0, disp)
        assert disp[1].tolist() == pytest.approx([-4.0, 0.0], abs=1e-12)
        assert disp[0].tolist() == pytest.approx([4.0, 0.0], abs=1e-12)

    def test_no_edges_no_change(self):
        g = isolated(5)
        disp = np.ones((5, 2))
        attractive_phase(g, np.random.default_rng(0).random((5, 2)), 1.0, disp)
        assert (disp == 1.0).all()

    def test_momentum_conserved_exactly(self):
        g = gen_k5_cluster_graph(8, connected=True)
        pos = init_layout(g, 10.0, seed=1).positions
        disp = np.zeros((g.vertex_count, 2))
        attractive_phase(g, pos, compute_k(pos), disp)
        # pairwise antisymmetric additions cancel up to rounding residue
        assert np.abs(disp.sum(axis=0)).max() < 1e-9 * g.edge_count


class TestRunLayout:
    def test_two_isolated_vertices_repel(self):
        g = isolated(2)
        initial = Layout(np.array([[0.45, 0.5], [0.55, 0.5]]))
        k = compute_k(initial.positions)
        assert math.dist(initial.positions[0], initial.positions[1]) < 2 * k
        cfg = EngineConfig(backend="naive-cutoff", iterations=1, initial_extent=1.0)
        final, _ = run_layout(g, cfg, initial=initial)
        assert math.dist(final.positions[0], final.positions[1]) > math.dist(
            initial.positions[0], initial.positions[1]
        )

    def test_bitwise_deterministic_across_runs(self):
        g = gen_binary_tree(5)
        cfg = EngineConfig(backend="lbvh", iterations=20, seed=9)
        a, _ = run_layout(g, cfg)
        b, _ = run_layout(g, cfg)
        assert np.array_equal(a.positions, b.positions)

    def test_backends_agree_end_to_end(self):
        g = gen_k5_cluster_graph(10, connected=True)
        results = {}
        for backend in ("naive-cutoff", "grid", "lbvh", "rayquery"):
            cfg = EngineConfig(backend=backend, iterations=50, seed=4)
            lay, _ = run_layout(g, cfg)
            results[backend] = lay.positions
        ref = results["naive-cutoff"]
        for backend in ("grid", "lbvh", "rayquery"):
            assert np.array_equal(ref, results[backend]), backend

    def test_unknown_backend_fails_before_work(self):
        with pytest.raises(UnknownBackendError):
            run_layout(isolated(2), EngineConfig(backend="bogus"))

    def test_initial_layout_size_checked(self):
        with pytest.raises(ValueError):
            run_layout(isolated(3), EngineConfig(iterations=1),
                       initial=Layout(np.zeros((2, 2))))

    def test_timing_report_shape(self):
        g = gen_binary_tree(4)
        _, report = run_layout(g, EngineConfig(backend="lbvh", iterations=7))
        assert report.iterations == 7
        assert len(report.build_s) == 7
        csv = report.to_csv()
        lines = csv.strip().split("\n")
        assert lines[0] == "iteration,build_ms,traversal_ms,attract_ms,displace_ms,total_ms"
        assert len(lines) == 8

    def test_threads_flag_keeps_results_bitwise(self):
        g = gen_k5_cluster_graph(6, connected=True)
        base, _ = run_layout(g, EngineConfig(backend="grid", iterations=15, threads=1))
        auto, _ = run_layout(g, EngineConfig(backend="grid", iterations=15, threads=0))
        assert np.array_equal(base.positions, auto.positions)

    def test_nondeterministic_mode_close_but_valid(self):
        g = gen_k5_cluster_graph(6, connected=True)
        det, _ = run_layout(g, EngineConfig(backend="lbvh", iterations=10))
        loose, _ = run_layout(
            g, EngineConfig(backend="lbvh", iterations=10, deterministic=False)
        )
        assert np.allclose(det.positions, loose.positions, rtol=1e-6, atol=1e-9)


class TestPositionsCsv:
    def test_round_trip(self):
        lay = init_layout(isolated(17), 3.0, seed=2)
        buf = io.StringIO()
        save_positions_csv(lay, buf)
        buf.seek(0)
        back = load_positions_csv(buf)
        assert np.array_equal(lay.positions, back.positions)

    def test_header_required(self):
        with pytest.raises(ValueError):
            load_positions_csv(io.StringIO("0,1,2\n"))
