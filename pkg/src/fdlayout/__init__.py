"""Force-directed graph layout with interchangeable repulsion backends."""

import os

# Keep numba quiet about TBB version mismatches; workqueue is always
# available and fork-safe.  Must be set before numba is first imported.
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

from .backends import (
    BACKEND_NAMES,
    TraversalStackOverflow,
    UnknownBackendError,
    get_backend,
)
from .forces import (
    MIN_SEPARATION_EPSILON,
    ForceParams,
    compute_k,
    cool,
    displace,
    f_att,
    f_rep,
    f_rep_cutoff,
    jitter_delta,
)
from .graph import (
    EdgeListParse,
    EdgeListParseError,
    Graph,
    GraphStats,
    gen_binary_tree,
    gen_k5_cluster_graph,
    graph_stats,
    parse_edge_list,
    serialize_edge_list,
)
from .layout import (
    EngineConfig,
    Layout,
    LayoutDiverged,
    TimingReport,
    attractive_phase,
    init_layout,
    load_positions_csv,
    run_layout,
    save_positions_csv,
)
from .svgexport import SvgStyle, export_svg, render_svg

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAMES",
    "EdgeListParse",
    "EdgeListParseError",
    "EngineConfig",
    "ForceParams",
    "Graph",
    "GraphStats",
    "Layout",
    "LayoutDiverged",
    "MIN_SEPARATION_EPSILON",
    "SvgStyle",
    "TimingReport",
    "TraversalStackOverflow",
    "UnknownBackendError",
    "attractive_phase",
    "compute_k",
    "cool",
    "displace",
    "export_svg",
    "f_att",
    "f_rep",
    "f_rep_cutoff",
    "gen_binary_tree",
    "gen_k5_cluster_graph",
    "get_backend",
    "graph_stats",
    "init_layout",
    "jitter_delta",
    "load_positions_csv",
    "parse_edge_list",
    "render_svg",
    "run_layout",
    "save_positions_csv",
    "serialize_edge_list",
]
