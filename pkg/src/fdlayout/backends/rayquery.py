"""Reversed fixed-radius search: discs around all vertices, point probes.

Instead of expanding a disc around each query vertex and gathering the
points inside it, this backend expands a disc of the cutoff radius
around *every* vertex, builds the BVH over those discs, and answers each
vertex's query by asking which discs contain its position.  Because all
discs share one radius, the reported id sets are identical to the
forward gather, and so are the accumulated forces.
"""

from __future__ import annotations

import time

import numpy as np
from numba import njit, prange, set_num_threads

from .common import (
    DEFAULT_EPS,
    STACK_CAPACITY,
    NeighborLists,
    PhaseTimes,
    TraversalStackOverflow,
    _accumulate_cutoff,
    as_xy,
    resolve_threads,
)
from .lbvh import Lbvh, build_lbvh


def build_disc_bvh(positions, cutoff_radius: float) -> Lbvh:
    """BVH over axis-aligned boxes of the radius-``cutoff_radius`` discs."""
    if cutoff_radius <= 0:
        raise ValueError("cutoff_radius must be positive")
    return build_lbvh(positions, radius=cutoff_radius)


@njit(cache=True, inline="always")
def _contains(node, ox, oy, bmin, bmax):
    return (
        bmin[node, 0] <= ox <= bmax[node, 0]
        and bmin[node, 1] <= oy <= bmax[node, 1]
    )


@njit(cache=True, inline="always")
def _query_one(left, right, bmin, bmax, order, px, py, n, ox, oy, self_id, r2,
               buf, stack):
    """Ids of discs whose center lies strictly within r of the origin.

    Returns (count, visited_nodes, max_stack); count is -1 on overflow.
    """
    leaf0 = n - 1
    cnt = 0
    visited = 0
    sp = 0
    max_sp = 0
    node = 0
    if not _contains(0, ox, oy, bmin, bmax):
        return 0, 1, 0
    while True:
        visited += 1
        if node >= leaf0:
            u = order[node - leaf0]
            if u != self_id:
                dx = ox - px[u]
                dy = oy - py[u]
                if dx * dx + dy * dy < r2:
                    buf[cnt] = u
                    cnt += 1
            if sp == 0:
                break
            sp -= 1
            node = stack[sp]
        else:
            lc = left[node]
            rc = right[node]
            hit_l = _contains(lc, ox, oy, bmin, bmax)
            hit_r = _contains(rc, ox, oy, bmin, bmax)
            if hit_l and hit_r:
                if sp >= STACK_CAPACITY:
                    return -1, visited, sp
                stack[sp] = rc
                sp += 1
                if sp > max_sp:
                    max_sp = sp
                node = lc
            elif hit_l:
                node = lc
            elif hit_r:
                node = rc
            else:
                if sp == 0:
                    break
                sp -= 1
                node = stack[sp]
    return cnt, visited, max_sp


@njit(cache=True)
def _query_single(left, right, bmin, bmax, order, px, py, n, ox, oy, self_id,
                  r2, buf):
    stack = np.empty(STACK_CAPACITY, dtype=np.int64)
    return _query_one(left, right, bmin, bmax, order, px, py, n, ox, oy,
                      self_id, r2, buf, stack)


@njit(cache=True, inline="always")
def _rep_vertex(v, left, right, bmin, bmax, order, px, py, n, k2, r2, eps, det,
                disp, buf, stack):
    cnt, _, msp = _query_one(left, right, bmin, bmax, order, px, py, n,
                             px[v], py[v], v, r2, buf, stack)
    if cnt < 0:
        return -1
    if det:
        buf[:cnt].sort()
    _accumulate_cutoff(px, py, v, buf, cnt, k2, r2, eps, disp)
    return msp


@njit(cache=True)
def _rep_serial(left, right, bmin, bmax, order, px, py, k2, r2, eps, det, disp):
    n = px.shape[0]
    buf = np.empty(n, dtype=np.int64)
    stack = np.empty(STACK_CAPACITY, dtype=np.int64)
    max_sp = 0
    for v in range(n):
        msp = _rep_vertex(v, left, right, bmin, bmax, order, px, py, n, k2, r2,
                          eps, det, disp, buf, stack)
        if msp < 0:
            return -1
        if msp > max_sp:
            max_sp = msp
    return max_sp


@njit(cache=True, parallel=True)
def _rep_parallel(left, right, bmin, bmax, order, px, py, k2, r2, eps, det,
                  disp, nchunks):
    n = px.shape[0]
    size = (n + nchunks - 1) // nchunks
    status = np.zeros(nchunks, dtype=np.int64)
    for c in prange(nchunks):
        buf = np.empty(n, dtype=np.int64)
        stack = np.empty(STACK_CAPACITY, dtype=np.int64)
        lo = c * size
        hi = min(lo + size, n)
        worst = 0
        for v in range(lo, hi):
            msp = _rep_vertex(v, left, right, bmin, bmax, order, px, py, n, k2,
                              r2, eps, det, disp, buf, stack)
            if msp < 0:
                worst = -(1 << 32)
                break
            if msp > worst:
                worst = msp
        status[c] = worst
    return status.min() if status.min() < 0 else status.max()


@njit(cache=True)
def _query_all(left, right, bmin, bmax, order, px, py, r2, offsets, out, fill):
    n = px.shape[0]
    buf = np.empty(n, dtype=np.int64)
    stack = np.empty(STACK_CAPACITY, dtype=np.int64)
    max_sp = 0
    for v in range(n):
        cnt, _, msp = _query_one(left, right, bmin, bmax, order, px, py, n,
                                 px[v], py[v], v, r2, buf, stack)
        if cnt < 0:
            return -1
        if msp > max_sp:
            max_sp = msp
        buf[:cnt].sort()
        if fill:
            w = offsets[v]
            for i in range(cnt):
                out[w] = buf[i]
                w += 1
        else:
            offsets[v + 1] = cnt
    return max_sp


def _tree_args(bvh: Lbvh):
    return (bvh.left, bvh.right, bvh.aabb_min, bvh.aabb_max, bvh.order,
            bvh.px, bvh.py)


def point_query(bvh: Lbvh, origin, self_id: int) -> np.ndarray:
    """Ascending ids of discs strictly containing ``origin``.

    ``bvh`` must be a disc tree built with the current cutoff radius;
    pass ``self_id=-1`` to disable self-exclusion.
    """
    if bvh.radius <= 0:
        raise ValueError("point_query requires a disc tree (radius > 0)")
    ox, oy = float(origin[0]), float(origin[1])
    buf = np.empty(bvh.n, dtype=np.int64)
    cnt, _, _ = _query_single(*_tree_args(bvh), bvh.n, ox, oy,
                              np.int64(self_id), bvh.radius * bvh.radius, buf)
    if cnt < 0:
        raise TraversalStackOverflow("point_query exceeded stack capacity")
    res = buf[:cnt]
    res.sort()
    return res.copy()


def query_visited(bvh: Lbvh, origin, self_id: int) -> int:
    """Number of tree nodes processed while answering point_query."""
    ox, oy = float(origin[0]), float(origin[1])
    buf = np.empty(bvh.n, dtype=np.int64)
    cnt, visited, _ = _query_single(*_tree_args(bvh), bvh.n, ox, oy,
                                    np.int64(self_id), bvh.radius * bvh.radius,
                                    buf)
    if cnt < 0:
        raise TraversalStackOverflow("point_query exceeded stack capacity")
    return int(visited)


def neighbors_all(positions, radius: float) -> NeighborLists:
    """Exact open-disc neighbor sets via the reversed disc query."""
    bvh = build_disc_bvh(positions, radius)
    n = bvh.n
    r2 = radius * radius
    offsets = np.zeros(n + 1, dtype=np.int64)
    status = _query_all(*_tree_args(bvh), r2, offsets, offsets[:0], False)
    if status < 0:
        raise TraversalStackOverflow("query pass exceeded stack capacity")
    np.cumsum(offsets[1:], out=offsets[1:])
    ids = np.empty(int(offsets[-1]), dtype=np.int64)
    fill_status = _query_all(*_tree_args(bvh), r2, offsets, ids, True)
    if fill_status < 0:
        raise TraversalStackOverflow("query pass exceeded stack capacity")
    return NeighborLists(offsets, ids, int(max(status, fill_status)))


def repulsive(
    positions,
    k: float,
    disp: np.ndarray,
    *,
    eps: float = DEFAULT_EPS,
    deterministic: bool = True,
    threads: int = 1,
) -> PhaseTimes:
    """Disc-tree backend: build with radius 2k, then per-vertex probes."""
    t0 = time.perf_counter()
    r = 2.0 * k
    bvh = build_disc_bvh(positions, r)
    t1 = time.perf_counter()
    k2 = k * k
    r2 = r * r
    args = (*_tree_args(bvh), k2, r2, eps, deterministic, disp)
    nthreads = resolve_threads(threads)
    if threads != 1 and nthreads > 1:
        set_num_threads(nthreads)
        status = _rep_parallel(*args, nthreads)
    else:
        status = _rep_serial(*args)
    if status < 0:
        raise TraversalStackOverflow("repulsive traversal exceeded stack capacity")
    return PhaseTimes(t1 - t0, time.perf_counter() - t1)
