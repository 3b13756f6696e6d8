"""Command-line front end: graph generation, layout runs, statistics,
and the binary-tree scaling benchmark."""

from __future__ import annotations

import argparse
import sys

from . import bench as benchmod
from .backends import BACKEND_NAMES
from .graph import (
    EdgeListParseError,
    gen_binary_tree,
    gen_k5_cluster_graph,
    graph_stats,
    parse_edge_list,
    serialize_edge_list,
)
from .layout import EngineConfig, run_layout, save_positions_csv
from .svgexport import export_svg


def _add_engine_flags(p: argparse.ArgumentParser, iterations_default: int) -> None:
    p.add_argument("--backend", choices=BACKEND_NAMES, default="naive-cutoff")
    p.add_argument("--iterations", type=int, default=iterations_default)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--extent", type=float, default=100.0)
    p.add_argument("--deterministic", choices=("on", "off"), default="on")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for the repulsive phase (0 = auto)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdlayout",
        description="Force-directed graph layout with pluggable repulsion backends.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a synthetic graph")
    p_gen.add_argument("generator", choices=("k5", "btree"))
    p_gen.add_argument("--clusters", type=int, help="K5 cluster count")
    p_gen.add_argument("--connected", action="store_true",
                       help="chain consecutive K5 clusters with single edges")
    p_gen.add_argument("--depth", type=int, help="binary tree depth")
    p_gen.add_argument("--out", required=True, help="edge-list output path")
    p_gen.add_argument("--stats", help="stats CSV path (default: OUT.stats.csv)")

    p_lay = sub.add_parser("layout", help="run the spring embedder on a graph")
    p_lay.add_argument("--input", required=True, help="edge-list path")
    _add_engine_flags(p_lay, iterations_default=100)
    p_lay.add_argument("--svg", help="write an SVG rendering here")
    p_lay.add_argument("--positions", help="write final positions CSV here")
    p_lay.add_argument("--timings", help="write per-iteration timing CSV here")
    p_lay.add_argument("--remap-out",
                       help="remap sparse ids and write the new->old map here")

    p_stats = sub.add_parser("stats", help="graph statistics as one CSV row")
    p_stats.add_argument("--input", required=True, help="edge-list path")
    p_stats.add_argument("--out", help="stats CSV path (default: stdout)")

    p_bench = sub.add_parser(
        "bench-scale", help="repulsive-phase scaling study over binary trees"
    )
    p_bench.add_argument("--depth-min", type=int, default=4)
    p_bench.add_argument("--depth-max", type=int, default=14)
    p_bench.add_argument(
        "--backends", default="naive-cutoff,lbvh,rayquery",
        help="comma-separated backend list",
    )
    p_bench.add_argument("--reference", default="naive-cutoff",
                         help="speedup reference backend")
    p_bench.add_argument("--iterations", type=int, default=20,
                         help="measured iterations per run")
    p_bench.add_argument("--warmup", type=int, default=benchmod.DEFAULT_WARMUP)
    p_bench.add_argument("--seed", type=int, default=42)
    p_bench.add_argument("--extent", type=float, default=100.0)
    p_bench.add_argument("--threads", type=int, default=1)
    p_bench.add_argument("--out", required=True, help="records CSV path")
    p_bench.add_argument("--slopes", help="slopes CSV path (default: OUT.slopes.csv)")

    return parser


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.generator == "k5":
        if args.clusters is None:
            raise ValueError("gen k5 requires --clusters")
        g = gen_k5_cluster_graph(args.clusters, connected=args.connected)
    else:
        if args.depth is None:
            raise ValueError("gen btree requires --depth")
        g = gen_binary_tree(args.depth)
    stats = graph_stats(g)
    with open(args.out, "w") as fh:
        fh.write(serialize_edge_list(g))
    stats_path = args.stats or args.out + ".stats.csv"
    with open(stats_path, "w") as fh:
        fh.write(stats.to_csv())
    print(
        f"wrote {args.out}: |V|={stats.vertex_count} |E|={stats.edge_count} "
        f"|C|={stats.component_count}"
    )
    return 0


def _load_graph(args: argparse.Namespace):
    remap = getattr(args, "remap_out", None) is not None
    with open(args.input) as fh:
        parsed = parse_edge_list(fh, remap=remap)
    if parsed.self_loops_dropped or parsed.duplicates_dropped:
        print(
            f"dropped {parsed.self_loops_dropped} self-loops and "
            f"{parsed.duplicates_dropped} duplicate edges",
            file=sys.stderr,
        )
    return parsed


def _cmd_layout(args: argparse.Namespace) -> int:
    parsed = _load_graph(args)
    g = parsed.graph
    cfg = EngineConfig(
        backend=args.backend,
        iterations=args.iterations,
        seed=args.seed,
        initial_extent=args.extent,
        deterministic=args.deterministic == "on",
        threads=args.threads,
    )
    layout, report = run_layout(g, cfg)
    if args.remap_out and parsed.id_map is not None:
        with open(args.remap_out, "w") as fh:
            fh.write("new,old\n")
            for new, old in enumerate(parsed.id_map.tolist()):
                fh.write(f"{new},{old}\n")
    if args.positions:
        save_positions_csv(layout, args.positions)
    if args.svg:
        export_svg(layout, g, args.svg)
    if args.timings:
        with open(args.timings, "w") as fh:
            fh.write(report.to_csv())
    mean_ms = report.mean_total_s() * 1e3
    print(
        f"{args.backend}: {g.vertex_count} vertices, {g.edge_count} edges, "
        f"{cfg.iterations} iterations, {mean_ms:.3f} ms/iteration mean"
    )
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    parsed = _load_graph(args)
    csv = graph_stats(parsed.graph).to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv)
    else:
        sys.stdout.write(csv)
    return 0


def _cmd_bench_scale(args: argparse.Namespace) -> int:
    if not 4 <= args.depth_min <= args.depth_max <= 18:
        raise ValueError("depth range must satisfy 4 <= min <= max <= 18")
    backends = [b.strip() for b in args.backends.split(",") if b.strip()]
    for b in backends:
        if b not in BACKEND_NAMES:
            raise ValueError(f"unknown backend {b!r}")
    depths = list(range(args.depth_min, args.depth_max + 1))
    study = benchmod.bench_scale(
        depths,
        backends,
        args.iterations,
        reference=args.reference,
        seed=args.seed,
        extent=args.extent,
        threads=args.threads,
        warmup=args.warmup,
    )
    with open(args.out, "w") as fh:
        fh.write(benchmod.records_csv(study.records))
    slopes_path = args.slopes or args.out + ".slopes.csv"
    with open(slopes_path, "w") as fh:
        fh.write(benchmod.slopes_csv(study))
    print(f"speedup reference backend: {args.reference}")
    for backend, slope in study.slopes.items():
        print(f"{backend}: log-log slope {slope:.3f}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "layout": _cmd_layout,
    "stats": _cmd_stats,
    "bench-scale": _cmd_bench_scale,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, EdgeListParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
