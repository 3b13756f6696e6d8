#!/usr/bin/env python3
"""Per-phase timing report and layout gallery on the benchmark corpus.

Builds four datasets (two K5-cluster graphs, a complete binary tree, and
a random sparse stand-in for a social-feed graph), prints their
statistics, times the repulsive phase of each backend, and renders an
SVG of the final rayquery layout per dataset.

Sizes default to desk-scale; pass --scale 1.0 for the full corpus
(25K / 68K / 131K / 250K vertices), which mainly stresses naive-cutoff.

    python scripts/corpus_report.py --out results/corpus --scale 0.2
"""

import argparse
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from fdlayout.bench import bench_dataset, records_csv
from fdlayout.graph import (
    Graph,
    gen_binary_tree,
    gen_k5_cluster_graph,
    graph_stats,
)
from fdlayout.layout import EngineConfig, run_layout
from fdlayout.svgexport import export_svg


def random_sparse_graph(n: int, m: int, seed: int) -> Graph:
    """Random simple graph stand-in with roughly m edges."""
    rng = np.random.default_rng(seed)
    pairs = rng.integers(0, n, size=(int(m * 1.2), 2), dtype=np.int64)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    edges = np.unique(np.stack([lo, hi], axis=1), axis=0)[:m]
    return Graph(n, edges)


def build_corpus(scale: float) -> dict[str, Graph]:
    k5_conn = max(2, int(5000 * scale))
    k5_unconn = max(2, int(50_000 * scale))
    depth = max(4, int(round(16 + np.log2(scale))) if scale < 1 else 16)
    feed_n = max(10, int(68_000 * scale))
    feed_m = max(12, int(101_000 * scale))
    return {
        f"k5x{k5_conn}-connected": gen_k5_cluster_graph(k5_conn, connected=True),
        f"feed-{feed_n}": random_sparse_graph(feed_n, feed_m, seed=1),
        f"btree-{depth}": gen_binary_tree(depth),
        f"k5x{k5_unconn}": gen_k5_cluster_graph(k5_unconn, connected=False),
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scale", type=float, default=0.1,
                    help="corpus size factor (1.0 = full sizes)")
    ap.add_argument("--backends", default="naive-cutoff,grid,lbvh,rayquery")
    ap.add_argument("--iterations", type=int, default=10)
    ap.add_argument("--layout-iterations", type=int, default=100,
                    help="iterations for the rendered layouts")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="results/corpus")
    ap.add_argument("--no-svg", action="store_true")
    args = ap.parse_args()

    backends = [b.strip() for b in args.backends.split(",") if b.strip()]
    out_dir = pathlib.Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    corpus = build_corpus(args.scale)
    records = []
    for label, g in corpus.items():
        s = graph_stats(g)
        print(
            f"{label}: |V|={s.vertex_count} |E|={s.edge_count} "
            f"|C|={s.component_count} deg {s.min_degree}/{s.max_degree}/"
            f"{float(s.mean_degree):.2f}"
        )
        records.extend(
            bench_dataset(
                label, g, backends, args.iterations,
                seed=args.seed, threads=args.threads,
            )
        )
        if not args.no_svg:
            cfg = EngineConfig(
                backend="rayquery", iterations=args.layout_iterations,
                seed=args.seed, threads=args.threads,
            )
            layout, _ = run_layout(g, cfg)
            export_svg(layout, g, str(out_dir / f"{label}.svg"))

    (out_dir / "per_phase.csv").write_text(records_csv(records))
    print(f"\n{'dataset':>22} {'backend':>13} {'build ms':>9} {'trav ms':>9} "
          f"{'build %':>8} {'speedup':>8}")
    for r in records:
        print(
            f"{r.dataset:>22} {r.backend:>13} {r.build_ms:9.3f} "
            f"{r.traversal_ms:9.3f} {r.build_pct:8.2f} {r.speedup:8.2f}"
        )
    print(f"\nwrote {out_dir}/per_phase.csv"
          + ("" if args.no_svg else f" and {len(corpus)} SVGs"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
