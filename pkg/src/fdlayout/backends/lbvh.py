"""Linear BVH over 2-d points or fixed-radius discs.

Pipeline: quantize positions to 16 bits per axis inside a slightly
inflated world box, interleave into 32-bit Morton codes, stable-sort
(ties broken by primitive id), build the radix tree over the sorted key
sequence in O(n), then fill node AABBs bottom-up.  Radius queries walk
the tree with a fixed 64-entry stack; overflow is a hard error rather
than a silent wrong answer.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

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

_WORLD_INFLATION = 1e-6  # fraction of each AABB extent added on both sides


@dataclass(frozen=True)
class Aabb:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    @classmethod
    def of_points(cls, positions) -> "Aabb":
        px, py = as_xy(positions)
        return cls(float(px.min()), float(py.min()), float(px.max()), float(py.max()))

    def inflated(self, fraction: float = _WORLD_INFLATION) -> "Aabb":
        dx = (self.max_x - self.min_x) * fraction
        dy = (self.max_y - self.min_y) * fraction
        return Aabb(self.min_x - dx, self.min_y - dy, self.max_x + dx, self.max_y + dy)


def _spread16(v: np.ndarray) -> np.ndarray:
    v = (v | (v << 8)) & np.uint32(0x00FF00FF)
    v = (v | (v << 4)) & np.uint32(0x0F0F0F0F)
    v = (v | (v << 2)) & np.uint32(0x33333333)
    v = (v | (v << 1)) & np.uint32(0x55555555)
    return v


def _quantize(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    span = hi - lo
    if span <= 0.0:
        return np.zeros(values.shape[0], dtype=np.uint32)
    t = (values - lo) / span
    q = np.floor(t * 65535.0).astype(np.int64)
    return np.clip(q, 0, 65535).astype(np.uint32)


def morton_codes(positions, world: Aabb) -> np.ndarray:
    """32-bit Morton codes, x bits at even positions."""
    px, py = as_xy(positions)
    qx = _quantize(px, world.min_x, world.max_x)
    qy = _quantize(py, world.min_y, world.max_y)
    return _spread16(qx) | (_spread16(qy) << np.uint32(1))


def morton_encode(pos, world: Aabb) -> int:
    """Encode a single 2-d point (convenience scalar form)."""
    return int(morton_codes(np.asarray(pos, dtype=np.float64).reshape(1, 2), world)[0])


def morton_decode(code: int) -> tuple[int, int]:
    """Recover the quantized (x, y) cell of a Morton code."""
    x = y = 0
    for bit in range(16):
        x |= ((code >> (2 * bit)) & 1) << bit
        y |= ((code >> (2 * bit + 1)) & 1) << bit
    return x, y


@dataclass
class Lbvh:
    """Radix-tree BVH; node ids 0..n-2 internal, n-1..2n-2 leaves.

    Leaf node (n-1)+j holds the j-th primitive in Morton order, i.e.
    ``order[j]``.  ``radius`` > 0 marks a disc tree whose leaf boxes are
    the primitive squares of half-side ``radius`` (grown by one ulp so
    they contain the exact open disc).
    """

    order: np.ndarray
    codes: np.ndarray
    left: np.ndarray
    right: np.ndarray
    parent: np.ndarray
    aabb_min: np.ndarray
    aabb_max: np.ndarray
    px: np.ndarray
    py: np.ndarray
    radius: float
    world: Aabb

    @property
    def n(self) -> int:
        return self.order.shape[0]

    @property
    def root(self) -> int:
        return 0

    @property
    def points(self) -> np.ndarray:
        return np.stack([self.px, self.py], axis=1)

    def is_leaf(self, node: int) -> bool:
        return node >= self.n - 1

    def primitive_of(self, node: int) -> int:
        return int(self.order[node - (self.n - 1)])


@njit(cache=True, inline="always")
def _clz64(x):
    if x == np.uint64(0):
        return 64
    n = 0
    if (x >> np.uint64(32)) == np.uint64(0):
        n += 32
        x <<= np.uint64(32)
    if (x >> np.uint64(48)) == np.uint64(0):
        n += 16
        x <<= np.uint64(16)
    if (x >> np.uint64(56)) == np.uint64(0):
        n += 8
        x <<= np.uint64(8)
    if (x >> np.uint64(60)) == np.uint64(0):
        n += 4
        x <<= np.uint64(4)
    if (x >> np.uint64(62)) == np.uint64(0):
        n += 2
        x <<= np.uint64(2)
    if (x >> np.uint64(63)) == np.uint64(0):
        n += 1
    return n


@njit(cache=True, inline="always")
def _delta(keys, i, j):
    n = keys.shape[0]
    if j < 0 or j >= n:
        return -1
    return _clz64(keys[i] ^ keys[j])


@njit(cache=True)
def _build_radix_tree(keys, left, right, parent):
    """Karras-style construction over strictly increasing keys."""
    n = keys.shape[0]
    leaf0 = n - 1
    for i in range(n - 1):
        d = 1 if _delta(keys, i, i + 1) > _delta(keys, i, i - 1) else -1
        dmin = _delta(keys, i, i - d)
        lmax = 2
        while _delta(keys, i, i + lmax * d) > dmin:
            lmax <<= 1
        length = 0
        t = lmax >> 1
        while t >= 1:
            if _delta(keys, i, i + (length + t) * d) > dmin:
                length += t
            t >>= 1
        j = i + length * d
        first = i if i < j else j
        last = j if i < j else i
        dnode = _delta(keys, first, last)
        split = first
        step = last - first
        while step > 1:
            step = (step + 1) >> 1
            mid = split + step
            if mid < last and _delta(keys, first, mid) > dnode:
                split = mid
        lchild = leaf0 + split if split == first else split
        rchild = leaf0 + split + 1 if split + 1 == last else split + 1
        left[i] = lchild
        right[i] = rchild
        parent[lchild] = i
        parent[rchild] = i


@njit(cache=True)
def _fill_internal_aabbs(left, right, parent, bmin, bmax, n):
    """Bottom-up merge; each internal node is filled once both children are."""
    pending = np.zeros(n - 1, dtype=np.uint8) if n > 1 else np.zeros(0, dtype=np.uint8)
    leaf0 = n - 1
    for j in range(n):
        node = parent[leaf0 + j]
        while node != -1:
            pending[node] += 1
            if pending[node] == 1:
                break
            lc = left[node]
            rc = right[node]
            bmin[node, 0] = min(bmin[lc, 0], bmin[rc, 0])
            bmin[node, 1] = min(bmin[lc, 1], bmin[rc, 1])
            bmax[node, 0] = max(bmax[lc, 0], bmax[rc, 0])
            bmax[node, 1] = max(bmax[lc, 1], bmax[rc, 1])
            node = parent[node]


def build_lbvh(positions, world: Aabb | None = None, radius: float = 0.0) -> Lbvh:
    """Build over points (radius 0) or discs of the given radius."""
    px, py = as_xy(positions)
    n = px.shape[0]
    if n < 1:
        raise ValueError("build_lbvh requires at least one primitive")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if world is None:
        world = Aabb.of_points(positions).inflated()
    codes = morton_codes(positions, world)
    order = np.argsort(codes, kind="stable").astype(np.int64)
    sorted_codes = codes[order]
    # Unique, strictly increasing keys: code in the high half, original
    # primitive id breaking ties in the low half.
    keys = (sorted_codes.astype(np.uint64) << np.uint64(32)) | order.astype(np.uint64)

    total = 2 * n - 1
    left = np.full(max(n - 1, 0), -1, dtype=np.int64)
    right = np.full(max(n - 1, 0), -1, dtype=np.int64)
    parent = np.full(total, -1, dtype=np.int64)
    bmin = np.empty((total, 2), dtype=np.float64)
    bmax = np.empty((total, 2), dtype=np.float64)
    sx = px[order]
    sy = py[order]
    if radius > 0.0:
        # One ulp outward so the closed box contains the exact open disc.
        bmin[n - 1:, 0] = np.nextafter(sx - radius, -np.inf)
        bmin[n - 1:, 1] = np.nextafter(sy - radius, -np.inf)
        bmax[n - 1:, 0] = np.nextafter(sx + radius, np.inf)
        bmax[n - 1:, 1] = np.nextafter(sy + radius, np.inf)
    else:
        bmin[n - 1:, 0] = sx
        bmin[n - 1:, 1] = sy
        bmax[n - 1:, 0] = sx
        bmax[n - 1:, 1] = sy
    if n > 1:
        _build_radix_tree(keys, left, right, parent)
        _fill_internal_aabbs(left, right, parent, bmin, bmax, n)
    return Lbvh(order, sorted_codes, left, right, parent, bmin, bmax, px, py,
                float(radius), world)


@njit(cache=True, inline="always")
def _aabb_dist2(qx, qy, node, bmin, bmax):
    dx = 0.0
    if qx < bmin[node, 0]:
        dx = bmin[node, 0] - qx
    elif qx > bmax[node, 0]:
        dx = qx - bmax[node, 0]
    dy = 0.0
    if qy < bmin[node, 1]:
        dy = bmin[node, 1] - qy
    elif qy > bmax[node, 1]:
        dy = qy - bmax[node, 1]
    return dx * dx + dy * dy


@njit(cache=True, inline="always")
def _gather_one(left, right, bmin, bmax, order, px, py, n, qx, qy, qid, r2,
                buf, stack):
    """Ids of primitives with |p(u) - q| < r, excluding qid.

    Returns (count, visited_nodes, max_stack); count is -1 on overflow.
    """
    leaf0 = n - 1
    cnt = 0
    visited = 0
    sp = 0
    max_sp = 0
    node = 0
    if _aabb_dist2(qx, qy, 0, bmin, bmax) >= r2:
        return 0, 1, 0
    while True:
        visited += 1
        if node >= leaf0:
            u = order[node - leaf0]
            if u != qid:
                dx = qx - px[u]
                dy = qy - py[u]
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
            hit_l = _aabb_dist2(qx, qy, lc, bmin, bmax) < r2
            hit_r = _aabb_dist2(qx, qy, rc, bmin, bmax) < r2
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
def _gather_single(left, right, bmin, bmax, order, px, py, n, qx, qy, qid, r2, buf):
    stack = np.empty(STACK_CAPACITY, dtype=np.int64)
    return _gather_one(left, right, bmin, bmax, order, px, py, n, qx, qy, qid,
                       r2, buf, stack)


@njit(cache=True, inline="always")
def _rep_vertex(v, left, right, bmin, bmax, order, px, py, n, k2, r2, eps, det,
                disp, buf, stack):
    cnt, _, msp = _gather_one(left, right, bmin, bmax, order, px, py, n,
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
def _gather_all(left, right, bmin, bmax, order, px, py, r2, offsets, out, fill):
    n = px.shape[0]
    buf = np.empty(n, dtype=np.int64)
    stack = np.empty(STACK_CAPACITY, dtype=np.int64)
    max_sp = 0
    for v in range(n):
        cnt, _, msp = _gather_one(left, right, bmin, bmax, order, px, py, n,
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


def radius_gather(bvh: Lbvh, q: int, r: float) -> np.ndarray:
    """Ascending ids of primitives strictly inside radius r of p(q)."""
    n = bvh.n
    buf = np.empty(n, dtype=np.int64)
    cnt, _, _ = _gather_single(*_tree_args(bvh), n, bvh.px[q], bvh.py[q],
                               np.int64(q), r * r, buf)
    if cnt < 0:
        raise TraversalStackOverflow("radius_gather exceeded stack capacity")
    res = buf[:cnt]
    res.sort()
    return res.copy()


def gather_visited(bvh: Lbvh, q: int, r: float) -> int:
    """Number of tree nodes processed while answering radius_gather(q, r)."""
    buf = np.empty(bvh.n, dtype=np.int64)
    cnt, visited, _ = _gather_single(*_tree_args(bvh), bvh.n, bvh.px[q],
                                     bvh.py[q], np.int64(q), r * r, buf)
    if cnt < 0:
        raise TraversalStackOverflow("radius_gather exceeded stack capacity")
    return int(visited)


def neighbors_all(positions, radius: float, bvh: Lbvh | None = None) -> NeighborLists:
    """Exact open-disc neighbor sets via point-tree radius gathers."""
    if bvh is None:
        bvh = build_lbvh(positions)
    n = bvh.n
    r2 = radius * radius
    offsets = np.zeros(n + 1, dtype=np.int64)
    status = _gather_all(*_tree_args(bvh), r2, offsets, offsets[:0], False)
    if status < 0:
        raise TraversalStackOverflow("gather pass exceeded stack capacity")
    np.cumsum(offsets[1:], out=offsets[1:])
    ids = np.empty(int(offsets[-1]), dtype=np.int64)
    fill_status = _gather_all(*_tree_args(bvh), r2, offsets, ids, True)
    if fill_status < 0:
        raise TraversalStackOverflow("gather pass exceeded stack capacity")
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
    """Point-tree backend: build (timed), then per-vertex 2k gathers."""
    t0 = time.perf_counter()
    bvh = build_lbvh(positions)
    t1 = time.perf_counter()
    px, py = bvh.px, bvh.py
    k2 = k * k
    r = 2.0 * k
    r2 = r * r
    args = (bvh.left, bvh.right, bvh.aabb_min, bvh.aabb_max, bvh.order, px, py,
            k2, r2, eps, deterministic, disp)
    nthreads = resolve_threads(threads)
    if threads != 1 and nthreads > 1:
        set_num_threads(nthreads)
        status = _rep_parallel(*args, nthreads)
    else:
        status = _rep_serial(*args)
    if status < 0:
        raise TraversalStackOverflow("repulsive traversal exceeded stack capacity")
    return PhaseTimes(t1 - t0, time.perf_counter() - t1)


def validate_lbvh(bvh: Lbvh) -> None:
    """Check structural invariants; raises ValueError on any violation."""
    n = bvh.n
    if bvh.left.shape[0] != max(n - 1, 0) or bvh.right.shape[0] != max(n - 1, 0):
        raise ValueError("internal node count must be n - 1")
    if not np.array_equal(np.sort(bvh.order), np.arange(n)):
        raise ValueError("leaf/primitive mapping is not a bijection")
    if n == 1:
        return
    total = 2 * n - 1
    children = np.concatenate([bvh.left, bvh.right])
    if children.min() < 1 or children.max() >= total:
        raise ValueError("child reference out of range")
    refs = np.bincount(children, minlength=total)
    if refs[0] != 0 or not (refs[1:] == 1).all():
        raise ValueError("every non-root node must have exactly one parent")
    parents = np.arange(n - 1)
    if (
        (bvh.aabb_min[bvh.left] < bvh.aabb_min[parents]).any()
        or (bvh.aabb_min[bvh.right] < bvh.aabb_min[parents]).any()
        or (bvh.aabb_max[bvh.left] > bvh.aabb_max[parents]).any()
        or (bvh.aabb_max[bvh.right] > bvh.aabb_max[parents]).any()
    ):
        raise ValueError("parent AABB does not contain child AABB")
    # Level-order expansion from the root; in-degree one plus full coverage
    # rules out cycles and unreachable subtrees.
    visited = np.zeros(total, dtype=bool)
    frontier = np.array([0], dtype=np.int64)
    reached = 0
    while frontier.size:
        if visited[frontier].any():
            raise ValueError("node reachable more than once")
        visited[frontier] = True
        reached += frontier.size
        internal = frontier[frontier < n - 1]
        frontier = np.concatenate([bvh.left[internal], bvh.right[internal]])
    if reached != total:
        raise ValueError("some nodes unreachable from root")
