"""Benchmark harness: per-backend repulsive-phase timing records and the
binary-tree scaling study with log-log slope estimates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, gen_binary_tree
from .layout import EngineConfig, TimingReport, run_layout

BENCH_CSV_HEADER = (
    "dataset,backend,iterations,build_ms,traversal_ms,build_pct,"
    "repulsive_ms,full_iter_ms,speedup"
)
SLOPES_CSV_HEADER = "backend,slope,samples"

DEFAULT_WARMUP = 2  # first iterations discarded (also absorbs JIT warm-up)


@dataclass(frozen=True)
class BenchRecord:
    dataset: str
    backend: str
    iterations: int  # measured iterations (after warm-up)
    build_ms: float
    traversal_ms: float
    build_pct: float
    repulsive_ms: float
    full_iter_ms: float
    speedup: float

    def to_csv_row(self) -> str:
        return (
            f"{self.dataset},{self.backend},{self.iterations},"
            f"{self.build_ms!r},{self.traversal_ms!r},{self.build_pct!r},"
            f"{self.repulsive_ms!r},{self.full_iter_ms!r},{self.speedup!r}"
        )


def _summarize(
    dataset: str, backend: str, report: TimingReport, warmup: int
) -> BenchRecord:
    build = report.mean_build_s(warmup) * 1e3
    trav = report.mean_traversal_s(warmup) * 1e3
    rep = build + trav
    pct = 100.0 * build / rep if rep > 0 else 0.0
    return BenchRecord(
        dataset=dataset,
        backend=backend,
        iterations=report.iterations - warmup,
        build_ms=build,
        traversal_ms=trav,
        build_pct=pct,
        repulsive_ms=rep,
        full_iter_ms=report.mean_total_s(warmup) * 1e3,
        speedup=1.0,
    )


def bench_dataset(
    dataset: str,
    graph: Graph,
    backends: list[str],
    iterations: int,
    *,
    reference: str = "naive-cutoff",
    seed: int = 42,
    extent: float = 100.0,
    threads: int = 1,
    warmup: int = DEFAULT_WARMUP,
) -> list[BenchRecord]:
    """Run each backend on one graph; speedups are relative to ``reference``.

    ``iterations`` counts measured iterations; ``warmup`` extra iterations
    run first and are discarded from the means.
    """
    if reference not in backends:
        raise ValueError(f"reference backend {reference!r} not in backends")
    records = []
    for backend in backends:
        cfg = EngineConfig(
            backend=backend,
            iterations=iterations + warmup,
            seed=seed,
            initial_extent=extent,
            threads=threads,
        )
        _, report = run_layout(graph, cfg)
        records.append(_summarize(dataset, backend, report, warmup))
    ref_ms = next(r.repulsive_ms for r in records if r.backend == reference)
    return [
        BenchRecord(
            **{
                **r.__dict__,
                "speedup": ref_ms / r.repulsive_ms if r.repulsive_ms > 0 else 1.0,
            }
        )
        for r in records
    ]


@dataclass(frozen=True)
class ScaleStudy:
    records: list[BenchRecord]
    slopes: dict[str, float]  # log-log slope of repulsive time vs |V|


def bench_scale(
    depths: list[int],
    backends: list[str],
    iterations: int,
    *,
    reference: str = "naive-cutoff",
    seed: int = 42,
    extent: float = 100.0,
    threads: int = 1,
    warmup: int = DEFAULT_WARMUP,
) -> ScaleStudy:
    """Scaling study over complete binary trees of the given depths."""
    if not depths:
        raise ValueError("at least one depth required")
    records: list[BenchRecord] = []
    for depth in depths:
        graph = gen_binary_tree(depth)
        records.extend(
            bench_dataset(
                f"btree-{depth}",
                graph,
                backends,
                iterations,
                reference=reference,
                seed=seed,
                extent=extent,
                threads=threads,
                warmup=warmup,
            )
        )
    slopes: dict[str, float] = {}
    if len(depths) >= 2:
        sizes = {f"btree-{d}": (1 << (d + 1)) - 1 for d in depths}
        for backend in backends:
            xs = np.log([sizes[r.dataset] for r in records if r.backend == backend])
            ys = np.log([r.repulsive_ms for r in records if r.backend == backend])
            slopes[backend] = float(np.polyfit(xs, ys, 1)[0])
    return ScaleStudy(records, slopes)


def records_csv(records: list[BenchRecord]) -> str:
    return "\n".join([BENCH_CSV_HEADER] + [r.to_csv_row() for r in records]) + "\n"


def slopes_csv(study: ScaleStudy) -> str:
    per_backend: dict[str, int] = {}
    for r in study.records:
        per_backend[r.backend] = per_backend.get(r.backend, 0) + 1
    rows = [SLOPES_CSV_HEADER]
    for backend, slope in study.slopes.items():
        rows.append(f"{backend},{slope!r},{per_backend.get(backend, 0)}")
    return "\n".join(rows) + "\n"
