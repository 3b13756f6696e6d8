import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdlayout.graph import (
    EdgeListParseError,
    Graph,
    gen_binary_tree,
    gen_k5_cluster_graph,
    graph_stats,
    parse_edge_list,
    serialize_edge_list,
)


class TestParse:
    def test_two_edges(self):
        parsed = parse_edge_list("0 1\n1 2")
        assert parsed.graph.vertex_count == 3
        assert parsed.graph.edges.tolist() == [[0, 1], [1, 2]]
        assert parsed.self_loops_dropped == 0
        assert parsed.duplicates_dropped == 0

    def test_duplicate_and_self_loop_dropped(self):
        parsed = parse_edge_list("0 1\n1 0\n2 2")
        assert parsed.graph.vertex_count == 3
        assert parsed.graph.edges.tolist() == [[0, 1]]
        assert parsed.duplicates_dropped == 1
        assert parsed.self_loops_dropped == 1

    def test_comment_and_max_id_sizing(self):
        parsed = parse_edge_list("# c\n0 3")
        assert parsed.graph.vertex_count == 4
        assert parsed.graph.edges.tolist() == [[0, 3]]

    def test_header_fixes_vertex_count(self):
        parsed = parse_edge_list("|V| 10\n0 3\n")
        assert parsed.graph.vertex_count == 10

    def test_header_too_small_rejected(self):
        with pytest.raises(EdgeListParseError):
            parse_edge_list("|V| 3\n0 5\n")

    def test_malformed_token_reports_line(self):
        with pytest.raises(EdgeListParseError, match="line 2"):
            parse_edge_list("0 1\n1 x\n")

    def test_wrong_arity_reports_line(self):
        with pytest.raises(EdgeListParseError, match="line 3"):
            parse_edge_list("0 1\n1 2\n1 2 3\n")

    def test_empty_input_rejected(self):
        with pytest.raises(EdgeListParseError):
            parse_edge_list("# only comments\n\n")

    def test_text_stream_accepted(self):
        parsed = parse_edge_list(io.StringIO("0 1\n"))
        assert parsed.graph.edge_count == 1

    def test_remap_compresses_sparse_ids(self):
        parsed = parse_edge_list("10 30\n30 20\n", remap=True)
        assert parsed.graph.vertex_count == 3
        assert parsed.graph.edges.tolist() == [[0, 2], [1, 2]]
        assert parsed.id_map.tolist() == [10, 20, 30]


class TestGraphInvariants:
    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Graph(2, np.array([[0, 5]]))

    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            Graph(3, np.array([[1, 1]]))

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            Graph(3, np.array([[0, 1], [0, 1]]))

    def test_adjacency_matches_degrees(self):
        g = gen_k5_cluster_graph(3, connected=True)
        adj = g.adjacency()
        deg = g.degrees()
        assert [len(a) for a in adj] == deg.tolist()
        for v, neigh in enumerate(adj):
            for u in neigh.tolist():
                assert v in adj[u].tolist()


edge_lists = st.lists(
    st.tuples(st.integers(0, 30), st.integers(0, 30)).filter(lambda e: e[0] != e[1]),
    min_size=0,
    max_size=60,
)


@given(edge_lists, st.integers(31, 40))
@settings(max_examples=60)
def test_serialize_round_trips(pairs, n):
    lo = [min(p) for p in pairs]
    hi = [max(p) for p in pairs]
    edges = np.unique(np.array(list(zip(lo, hi)), dtype=np.int64).reshape(-1, 2), axis=0)
    g = Graph(n, edges)
    assert parse_edge_list(serialize_edge_list(g)).graph == g


class TestGenerators:
    def test_single_k5(self):
        g = gen_k5_cluster_graph(1, connected=False)
        s = graph_stats(g)
        assert (s.vertex_count, s.edge_count, s.component_count) == (5, 10, 1)

    def test_connected_k5_chain_counts(self):
        g = gen_k5_cluster_graph(5000, connected=True)
        # 5000 * 10 clique edges plus 4999 chain edges
        assert g.vertex_count == 25000
        assert g.edge_count == 54999
        s = graph_stats(g)
        assert s.component_count == 1
        assert (s.min_degree, s.max_degree) == (4, 6)

    def test_unconnected_k5_components(self):
        s = graph_stats(gen_k5_cluster_graph(12, connected=False))
        assert s.component_count == 12
        assert (s.min_component_size, s.max_component_size) == (5, 5)
        assert (s.min_degree, s.max_degree, s.mean_degree) == (4, 4, Fraction(4))

    def test_cluster_count_zero_rejected(self):
        with pytest.raises(ValueError):
            gen_k5_cluster_graph(0)

    def test_btree_depth_one(self):
        g = gen_binary_tree(1)
        assert (g.vertex_count, g.edge_count) == (3, 2)

    def test_btree_depth_four(self):
        g = gen_binary_tree(4)
        assert (g.vertex_count, g.edge_count) == (31, 30)

    def test_btree_depth_zero_rejected(self):
        with pytest.raises(ValueError):
            gen_binary_tree(0)

    def test_btree_child_indexing(self):
        g = gen_binary_tree(3)
        edges = set(map(tuple, g.edges.tolist()))
        for i in range(7):
            assert (i, 2 * i + 1) in edges
            assert (i, 2 * i + 2) in edges

    @given(st.integers(1, 40), st.booleans())
    @settings(max_examples=40)
    def test_k5_component_structure(self, clusters, connected):
        g = gen_k5_cluster_graph(clusters, connected=connected)
        s = graph_stats(g)
        assert s.component_count == (1 if connected or clusters == 1 else clusters)
        assert 2 * g.edge_count == int(g.degrees().sum())

    @given(st.integers(1, 10))
    @settings(max_examples=10)
    def test_btree_degree_sum(self, depth):
        g = gen_binary_tree(depth)
        assert g.vertex_count == (1 << (depth + 1)) - 1
        assert g.edge_count == g.vertex_count - 1
        assert 2 * g.edge_count == int(g.degrees().sum())


class TestStats:
    def test_isolated_vertices(self):
        s = graph_stats(Graph(3, np.empty((0, 2), dtype=np.int64)))
        assert s.component_count == 3
        assert (s.min_degree, s.max_degree, s.mean_degree) == (0, 0, Fraction(0))

    def test_mean_degree_is_exact_rational(self):
        s = graph_stats(gen_binary_tree(4))
        assert s.mean_degree == Fraction(2 * 30, 31)

    def test_csv_shape(self):
        csv = graph_stats(gen_binary_tree(2)).to_csv()
        header, row = csv.strip().split("\n")
        assert header.split(",") == [
            "vertices", "edges", "components", "min_deg", "max_deg",
            "mean_deg", "min_cvert", "max_cvert", "mean_cvert",
        ]
        assert row.split(",")[0] == "7"
