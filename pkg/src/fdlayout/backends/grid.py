"""Uniform-grid repulsion backend.

Cells are squares of side 2k (the cutoff radius), so every neighbor
within the open 2k disc of a vertex lies inside the 3x3 cell block
around its own cell.  Candidates from that block are filtered by the
exact distance predicate, which also makes the result independent of
where the grid origin sits.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from numba import njit, prange, set_num_threads

from .common import (
    DEFAULT_EPS,
    NeighborLists,
    PhaseTimes,
    _accumulate_cutoff,
    as_xy,
    resolve_threads,
)


@dataclass(frozen=True)
class UniformGrid:
    """Bucketed vertex ids over a regular grid of ``cell_size`` squares.

    ``cell_ids[cell_start[c]:cell_start[c+1]]`` holds the ascending vertex
    ids bucketed in cell c = cy * dims_x + cx.
    """

    cell_size: float
    origin_x: float
    origin_y: float
    dims_x: int
    dims_y: int
    cell_start: np.ndarray
    cell_ids: np.ndarray

    def bucket_of(self, x: float, y: float) -> tuple[int, int]:
        cx = int(math.floor((x - self.origin_x) / self.cell_size))
        cy = int(math.floor((y - self.origin_y) / self.cell_size))
        return (
            min(max(cx, 0), self.dims_x - 1),
            min(max(cy, 0), self.dims_y - 1),
        )


def build_grid(positions, cutoff_radius: float, origin=None) -> UniformGrid:
    """Bucket vertices into cells of side ``cutoff_radius``.

    ``origin`` defaults to the layout AABB minimum; passing a different
    origin only re-buckets (queries filter by exact distance).
    """
    if cutoff_radius <= 0:
        raise ValueError("cutoff_radius must be positive")
    px, py = as_xy(positions)
    n = px.shape[0]
    if n == 0:
        raise ValueError("grid requires at least one vertex")
    if origin is None:
        ox, oy = float(px.min()), float(py.min())
    else:
        ox, oy = float(origin[0]), float(origin[1])
    span_x = float(px.max()) - ox
    span_y = float(py.max()) - oy
    nx = max(int(math.ceil(span_x / cutoff_radius)), 1)
    ny = max(int(math.ceil(span_y / cutoff_radius)), 1)
    cx = np.clip(np.floor((px - ox) / cutoff_radius).astype(np.int64), 0, nx - 1)
    cy = np.clip(np.floor((py - oy) / cutoff_radius).astype(np.int64), 0, ny - 1)
    cell = cy * nx + cx
    order = np.argsort(cell, kind="stable")  # ascending ids within a cell
    counts = np.bincount(cell, minlength=nx * ny)
    starts = np.zeros(nx * ny + 1, dtype=np.int64)
    np.cumsum(counts, out=starts[1:])
    return UniformGrid(cutoff_radius, ox, oy, nx, ny, starts, order)


@njit(cache=True, inline="always")
def _collect_block(v, px, py, ox, oy, cell, nx, ny, starts, ids, buf):
    cx = int(np.floor((px[v] - ox) / cell))
    cy = int(np.floor((py[v] - oy) / cell))
    if cx < 0:
        cx = 0
    elif cx > nx - 1:
        cx = nx - 1
    if cy < 0:
        cy = 0
    elif cy > ny - 1:
        cy = ny - 1
    cnt = 0
    y0 = cy - 1 if cy > 0 else 0
    y1 = cy + 1 if cy < ny - 1 else ny - 1
    x0 = cx - 1 if cx > 0 else 0
    x1 = cx + 1 if cx < nx - 1 else nx - 1
    for gy in range(y0, y1 + 1):
        base = gy * nx
        for gx in range(x0, x1 + 1):
            c = base + gx
            for t in range(starts[c], starts[c + 1]):
                u = ids[t]
                if u != v:
                    buf[cnt] = u
                    cnt += 1
    return cnt


@njit(cache=True, inline="always")
def _grid_vertex(
    v, px, py, ox, oy, cell, nx, ny, starts, ids, k2, r2, eps, det, disp, buf
):
    cnt = _collect_block(v, px, py, ox, oy, cell, nx, ny, starts, ids, buf)
    if det:
        buf[:cnt].sort()
    _accumulate_cutoff(px, py, v, buf, cnt, k2, r2, eps, disp)


@njit(cache=True)
def _rep_serial(px, py, ox, oy, cell, nx, ny, starts, ids, k2, r2, eps, det, disp):
    n = px.shape[0]
    buf = np.empty(n, dtype=np.int64)
    for v in range(n):
        _grid_vertex(
            v, px, py, ox, oy, cell, nx, ny, starts, ids, k2, r2, eps, det, disp, buf
        )


@njit(cache=True, parallel=True)
def _rep_parallel(
    px, py, ox, oy, cell, nx, ny, starts, ids, k2, r2, eps, det, disp, nchunks
):
    n = px.shape[0]
    size = (n + nchunks - 1) // nchunks
    bufs = np.empty((nchunks, n), dtype=np.int64)
    for c in prange(nchunks):
        lo = c * size
        hi = min(lo + size, n)
        for v in range(lo, hi):
            _grid_vertex(
                v, px, py, ox, oy, cell, nx, ny, starts, ids, k2, r2, eps, det,
                disp, bufs[c],
            )


@njit(cache=True)
def _neighbor_pass(px, py, ox, oy, cell, nx, ny, starts, ids, r2, offsets, out, fill):
    n = px.shape[0]
    buf = np.empty(n, dtype=np.int64)
    for v in range(n):
        cnt = _collect_block(v, px, py, ox, oy, cell, nx, ny, starts, ids, buf)
        buf[:cnt].sort()
        w = offsets[v]
        for i in range(cnt):
            u = buf[i]
            dx = px[v] - px[u]
            dy = py[v] - py[u]
            if dx * dx + dy * dy < r2:
                if fill:
                    out[w] = u
                w += 1
        if not fill:
            offsets[v + 1] = w - offsets[v]


def repulsive_grid(
    grid: UniformGrid,
    positions,
    k: float,
    disp: np.ndarray,
    *,
    eps: float = DEFAULT_EPS,
    deterministic: bool = True,
    threads: int = 1,
) -> None:
    """Accumulate cutoff repulsion using a pre-built grid."""
    px, py = as_xy(positions)
    k2 = k * k
    r = 2.0 * k
    r2 = r * r
    args = (
        px, py, grid.origin_x, grid.origin_y, grid.cell_size,
        grid.dims_x, grid.dims_y, grid.cell_start, grid.cell_ids,
        k2, r2, eps, deterministic, disp,
    )
    nthreads = resolve_threads(threads)
    if threads != 1 and nthreads > 1:
        set_num_threads(nthreads)
        _rep_parallel(*args, nthreads)
    else:
        _rep_serial(*args)


def repulsive(
    positions,
    k: float,
    disp: np.ndarray,
    *,
    eps: float = DEFAULT_EPS,
    deterministic: bool = True,
    threads: int = 1,
) -> PhaseTimes:
    """Grid backend entry point: build (timed) then query (timed)."""
    t0 = time.perf_counter()
    grid = build_grid(positions, 2.0 * k)
    t1 = time.perf_counter()
    repulsive_grid(
        grid, positions, k, disp, eps=eps, deterministic=deterministic,
        threads=threads,
    )
    t2 = time.perf_counter()
    return PhaseTimes(t1 - t0, t2 - t1)


def neighbors_all(positions, radius: float) -> NeighborLists:
    """Exact open-disc neighbor sets computed through the grid."""
    grid = build_grid(positions, radius)
    px, py = as_xy(positions)
    n = px.shape[0]
    r2 = radius * radius
    args = (
        px, py, grid.origin_x, grid.origin_y, grid.cell_size,
        grid.dims_x, grid.dims_y, grid.cell_start, grid.cell_ids, r2,
    )
    offsets = np.zeros(n + 1, dtype=np.int64)
    _neighbor_pass(*args, offsets, offsets[:0], False)
    np.cumsum(offsets[1:], out=offsets[1:])
    ids = np.empty(int(offsets[-1]), dtype=np.int64)
    _neighbor_pass(*args, offsets, ids, True)
    return NeighborLists(offsets, ids)
