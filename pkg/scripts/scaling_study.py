#!/usr/bin/env python3
"""Repulsive-phase scaling study over complete binary trees.

Runs every backend on trees of increasing depth, reports the mean
repulsive-phase time per iteration, speedups against the reference
backend, and a least-squares log-log slope per backend.  Writes the
records and slopes CSVs next to each other.

    python scripts/scaling_study.py --depth-min 4 --depth-max 14 \
        --backends naive-cutoff,grid,lbvh,rayquery --out results/scaling.csv
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from fdlayout.backends import BACKEND_NAMES
from fdlayout.bench import bench_scale, records_csv, slopes_csv


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth-min", type=int, default=4)
    ap.add_argument("--depth-max", type=int, default=14)
    ap.add_argument("--backends", default="naive-cutoff,lbvh,rayquery")
    ap.add_argument("--reference", default="naive-cutoff")
    ap.add_argument("--iterations", type=int, default=20)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="results/scaling.csv")
    args = ap.parse_args()

    backends = [b.strip() for b in args.backends.split(",") if b.strip()]
    unknown = [b for b in backends if b not in BACKEND_NAMES]
    if unknown:
        ap.error(f"unknown backends: {unknown}")

    depths = list(range(args.depth_min, args.depth_max + 1))
    study = bench_scale(
        depths,
        backends,
        args.iterations,
        reference=args.reference,
        seed=args.seed,
        threads=args.threads,
    )

    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(records_csv(study.records))
    slopes_path = out.with_suffix(out.suffix + ".slopes.csv")
    slopes_path.write_text(slopes_csv(study))

    print(f"{'dataset':>10} {'backend':>13} {'repulsive ms':>13} {'speedup':>8}")
    for r in study.records:
        print(f"{r.dataset:>10} {r.backend:>13} {r.repulsive_ms:13.3f} {r.speedup:8.2f}")
    print(f"\nspeedup reference: {args.reference}")
    for backend, slope in study.slopes.items():
        print(f"log-log slope {backend}: {slope:.3f}")
    print(f"\nwrote {out} and {slopes_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
