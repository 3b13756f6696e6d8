"""Exact all-pairs repulsion, with and without the 2k cutoff.

The cutoff variant is the reference every accelerated backend must match
bit-for-bit: it visits neighbors in ascending id order by construction.
Parallel mode splits the outer vertex loop across threads; each vertex
still sums its own contributions sequentially, so results are identical
to the serial run.
"""

from __future__ import annotations

import time

import numpy as np
from numba import njit, prange, set_num_threads

from .common import (
    DEFAULT_EPS,
    NeighborLists,
    PhaseTimes,
    _accumulate_cutoff,
    _pair_delta,
    as_xy,
    resolve_threads,
)


@njit(cache=True, inline="always")
def _vertex_all(v, px, py, k2, eps, disp):
    n = px.shape[0]
    xq = px[v]
    yq = py[v]
    ax = 0.0
    ay = 0.0
    for u in range(n):
        if u == v:
            continue
        dx, dy, d2 = _pair_delta(xq, yq, px[u], py[u], v, u, eps)
        c = k2 / d2
        ax += dx * c
        ay += dy * c
    disp[v, 0] = ax
    disp[v, 1] = ay


@njit(cache=True, inline="always")
def _vertex_cutoff(v, px, py, k2, r2, eps, disp):
    n = px.shape[0]
    xq = px[v]
    yq = py[v]
    ax = 0.0
    ay = 0.0
    for u in range(n):
        if u == v:
            continue
        dx, dy, d2 = _pair_delta(xq, yq, px[u], py[u], v, u, eps)
        if d2 >= r2:
            continue
        c = k2 / d2
        ax += dx * c
        ay += dy * c
    disp[v, 0] = ax
    disp[v, 1] = ay


@njit(cache=True)
def _all_serial(px, py, k2, eps, disp):
    for v in range(px.shape[0]):
        _vertex_all(v, px, py, k2, eps, disp)


@njit(cache=True, parallel=True)
def _all_parallel(px, py, k2, eps, disp):
    for v in prange(px.shape[0]):
        _vertex_all(v, px, py, k2, eps, disp)


@njit(cache=True)
def _cutoff_serial(px, py, k2, r2, eps, disp):
    for v in range(px.shape[0]):
        _vertex_cutoff(v, px, py, k2, r2, eps, disp)


@njit(cache=True, parallel=True)
def _cutoff_parallel(px, py, k2, r2, eps, disp):
    for v in prange(px.shape[0]):
        _vertex_cutoff(v, px, py, k2, r2, eps, disp)


@njit(cache=True)
def _brute_neighbor_counts(px, py, r2, counts):
    n = px.shape[0]
    for v in range(n):
        c = 0
        for u in range(n):
            if u == v:
                continue
            dx = px[v] - px[u]
            dy = py[v] - py[u]
            if dx * dx + dy * dy < r2:
                c += 1
        counts[v] = c


@njit(cache=True)
def _brute_neighbor_fill(px, py, r2, offsets, out):
    n = px.shape[0]
    for v in range(n):
        w = offsets[v]
        for u in range(n):
            if u == v:
                continue
            dx = px[v] - px[u]
            dy = py[v] - py[u]
            if dx * dx + dy * dy < r2:
                out[w] = u
                w += 1


def repulsive_naive(
    positions,
    k: float,
    disp: np.ndarray,
    *,
    eps: float = DEFAULT_EPS,
    deterministic: bool = True,
    threads: int = 1,
) -> PhaseTimes:
    """D(v) = sum over u != v of F_rep(p(v)-p(u), k); no cutoff."""
    px, py = as_xy(positions)
    k2 = k * k
    t0 = time.perf_counter()
    nthreads = resolve_threads(threads)
    if threads != 1 and nthreads > 1:
        set_num_threads(nthreads)
        _all_parallel(px, py, k2, eps, disp)
    else:
        _all_serial(px, py, k2, eps, disp)
    return PhaseTimes(0.0, time.perf_counter() - t0)


def repulsive_naive_cutoff(
    positions,
    k: float,
    disp: np.ndarray,
    *,
    eps: float = DEFAULT_EPS,
    deterministic: bool = True,
    threads: int = 1,
) -> PhaseTimes:
    """All-pairs repulsion with contributions zeroed at distance >= 2k."""
    px, py = as_xy(positions)
    k2 = k * k
    r = 2.0 * k
    r2 = r * r
    t0 = time.perf_counter()
    nthreads = resolve_threads(threads)
    if threads != 1 and nthreads > 1:
        set_num_threads(nthreads)
        _cutoff_parallel(px, py, k2, r2, eps, disp)
    else:
        _cutoff_serial(px, py, k2, r2, eps, disp)
    return PhaseTimes(0.0, time.perf_counter() - t0)


def neighbors_all(positions, radius: float) -> NeighborLists:
    """Brute-force open-disc neighbor sets (ascending ids per vertex)."""
    px, py = as_xy(positions)
    n = px.shape[0]
    r2 = radius * radius
    counts = np.empty(n, dtype=np.int64)
    _brute_neighbor_counts(px, py, r2, counts)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    ids = np.empty(int(offsets[-1]), dtype=np.int64)
    _brute_neighbor_fill(px, py, r2, offsets, ids)
    return NeighborLists(offsets, ids)
