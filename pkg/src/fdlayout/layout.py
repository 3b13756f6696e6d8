"""Layout state and the spring-embedder iteration engine.

Each iteration recomputes k from the current AABB, zeroes the dispersion
buffer, runs the selected repulsive backend, adds attractive forces over
edges, then displaces every vertex by at most the current temperature.
The dispersion buffer is a plain (n, 2) float64 array.
"""

from __future__ import annotations

import io
import time
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np
from numba import njit

from .backends import BACKEND_NAMES, get_backend
from .backends.common import _pair_delta
from .forces import MIN_SEPARATION_EPSILON, ForceParams, compute_k, cool
from .graph import Graph

TIMING_CSV_HEADER = "iteration,build_ms,traversal_ms,attract_ms,displace_ms,total_ms"
POSITIONS_CSV_HEADER = "id,x,y"


class LayoutDiverged(RuntimeError):
    """A position became non-finite during iteration."""


@dataclass
class Layout:
    """Per-vertex 2-d positions in layout units."""

    positions: np.ndarray

    def __post_init__(self) -> None:
        self.positions = np.asarray(self.positions, dtype=np.float64).reshape(-1, 2)

    @property
    def vertex_count(self) -> int:
        return self.positions.shape[0]

    def copy(self) -> "Layout":
        return Layout(self.positions.copy())

    def aabb(self) -> tuple[np.ndarray, np.ndarray]:
        return self.positions.min(axis=0), self.positions.max(axis=0)


@dataclass(frozen=True)
class EngineConfig:
    backend: str = "naive-cutoff"
    iterations: int = 100
    seed: int = 42
    initial_extent: float = 100.0
    deterministic: bool = True
    threads: int = 1  # 0 = auto (all available); 1 = serial

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.initial_extent <= 0:
            raise ValueError("initial_extent must be positive")


@dataclass
class TimingReport:
    """Per-iteration wall times (seconds) for each engine phase."""

    backend: str
    build_s: list[float] = field(default_factory=list)
    traversal_s: list[float] = field(default_factory=list)
    attract_s: list[float] = field(default_factory=list)
    displace_s: list[float] = field(default_factory=list)
    total_s: list[float] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.total_s)

    def mean_build_s(self, warmup: int = 0) -> float:
        return float(np.mean(self.build_s[warmup:]))

    def mean_traversal_s(self, warmup: int = 0) -> float:
        return float(np.mean(self.traversal_s[warmup:]))

    def mean_repulsive_s(self, warmup: int = 0) -> float:
        return self.mean_build_s(warmup) + self.mean_traversal_s(warmup)

    def mean_total_s(self, warmup: int = 0) -> float:
        return float(np.mean(self.total_s[warmup:]))

    def to_csv(self) -> str:
        rows = [TIMING_CSV_HEADER]
        for i in range(self.iterations):
            rows.append(
                f"{i},{self.build_s[i] * 1e3!r},{self.traversal_s[i] * 1e3!r},"
                f"{self.attract_s[i] * 1e3!r},{self.displace_s[i] * 1e3!r},"
                f"{self.total_s[i] * 1e3!r}"
            )
        return "\n".join(rows) + "\n"


def init_layout(g: Graph | int, extent: float, seed: int) -> Layout:
    """Uniform i.i.d. positions in [0, extent]^2 from a PCG64 stream.

    Identical (vertex count, extent, seed) give bitwise-identical layouts.
    """
    n = g.vertex_count if isinstance(g, Graph) else int(g)
    if n < 1:
        raise ValueError("layout requires at least one vertex")
    if extent <= 0:
        raise ValueError("extent must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    return Layout(rng.random((n, 2)) * extent)


@njit(cache=True)
def _attract_kernel(pos, edges, k, eps, disp):
    # Sequential in canonical edge order: both endpoints of an edge see
    # the same delta, so the phase conserves momentum exactly.
    for e in range(edges.shape[0]):
        u = edges[e, 0]
        v = edges[e, 1]
        dx, dy, d2 = _pair_delta(pos[v, 0], pos[v, 1], pos[u, 0], pos[u, 1],
                                 v, u, eps)
        c = np.sqrt(d2) / k
        fx = dx * c
        fy = dy * c
        disp[v, 0] -= fx
        disp[v, 1] -= fy
        disp[u, 0] += fx
        disp[u, 1] += fy


@njit(cache=True)
def _displace_kernel(pos, disp, t):
    for v in range(pos.shape[0]):
        dx = disp[v, 0]
        dy = disp[v, 1]
        d2 = dx * dx + dy * dy
        if d2 > 0.0:
            length = np.sqrt(d2)
            step = length if length < t else t
            s = step / length
            pos[v, 0] += dx * s
            pos[v, 1] += dy * s


def attractive_phase(
    g: Graph, positions, k: float, disp: np.ndarray,
    *, eps: float = MIN_SEPARATION_EPSILON,
) -> None:
    """Accumulate edge attractions into ``disp`` (canonical edge order)."""
    pos = np.asarray(getattr(positions, "positions", positions), dtype=np.float64)
    _attract_kernel(pos, g.edges, k, eps, disp)


def run_layout(
    g: Graph, config: EngineConfig, initial: Layout | None = None
) -> tuple[Layout, TimingReport]:
    """Iterate the spring embedder; returns final layout and phase times."""
    backend = get_backend(config.backend)  # fail before any work
    if g.vertex_count < 1:
        raise ValueError("layout requires at least one vertex")
    if initial is not None:
        if initial.vertex_count != g.vertex_count:
            raise ValueError("initial layout size does not match graph")
        pos = initial.positions.copy()
    else:
        pos = init_layout(g, config.initial_extent, config.seed).positions
    n = g.vertex_count
    edges = g.edges
    disp = np.zeros((n, 2), dtype=np.float64)
    t0 = config.initial_extent / 10.0
    report = TimingReport(backend.name)

    for i in range(config.iterations):
        iter_start = time.perf_counter()
        params = ForceParams.from_k(
            compute_k(pos), temperature=cool(t0, i, config.iterations)
        )
        eps = params.min_separation_epsilon
        disp[:] = 0.0
        times = backend.run(
            pos, params.k, disp,
            eps=eps, deterministic=config.deterministic, threads=config.threads,
        )
        t_att0 = time.perf_counter()
        _attract_kernel(pos, edges, params.k, eps, disp)
        t_att1 = time.perf_counter()
        _displace_kernel(pos, disp, params.temperature)
        t_disp1 = time.perf_counter()
        if not np.isfinite(pos).all():
            raise LayoutDiverged(f"non-finite position after iteration {i}")
        report.build_s.append(times.build_s)
        report.traversal_s.append(times.traversal_s)
        report.attract_s.append(t_att1 - t_att0)
        report.displace_s.append(t_disp1 - t_att1)
        report.total_s.append(t_disp1 - iter_start)

    return Layout(pos), report


def save_positions_csv(layout: Layout, path_or_buf: str | TextIO) -> None:
    """id,x,y rows with full round-trip float precision."""
    buf = io.StringIO()
    buf.write(POSITIONS_CSV_HEADER + "\n")
    for i, (x, y) in enumerate(layout.positions.tolist()):
        buf.write(f"{i},{x!r},{y!r}\n")
    text = buf.getvalue()
    if isinstance(path_or_buf, str):
        with open(path_or_buf, "w") as fh:
            fh.write(text)
    else:
        path_or_buf.write(text)


def load_positions_csv(source: str | TextIO) -> Layout:
    if isinstance(source, str):
        with open(source) as fh:
            lines = fh.read().splitlines()
    else:
        lines = source.read().splitlines()
    if not lines or lines[0] != POSITIONS_CSV_HEADER:
        raise ValueError("missing positions CSV header")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        i, x, y = line.split(",")
        rows.append((float(x), float(y)))
    return Layout(np.asarray(rows, dtype=np.float64))


ALL_BACKENDS = BACKEND_NAMES
