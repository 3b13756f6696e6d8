"""Shared compiled force path used by every repulsive backend.

All backends compute per-pair contributions with the exact same inlined
arithmetic (`_pair_delta` + coefficient k^2/d^2) and sum them per vertex
in ascending neighbor-id order when deterministic mode is on.  Backends
therefore differ only in how they produce candidate neighbor ids, and
their dispersion buffers agree bit-for-bit.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

import numpy as np
from numba import njit

from ..forces import MIN_SEPARATION_EPSILON

# Traversal stacks are fixed at 64 entries; overflow is a hard error.
# Radix trees over <= 2^20 primitives stay well below this bound.
STACK_CAPACITY = 64

_U64_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_U64_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_U64_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 2.0 / 9007199254740992.0


@dataclass(frozen=True)
class PhaseTimes:
    """Wall-clock split of one repulsive phase."""

    build_s: float
    traversal_s: float


@dataclass(frozen=True)
class NeighborLists:
    """CSR neighbor sets: ids[offsets[v]:offsets[v+1]] ascending per v."""

    offsets: np.ndarray
    ids: np.ndarray
    max_stack: int = 0

    def of(self, v: int) -> np.ndarray:
        return self.ids[self.offsets[v]:self.offsets[v + 1]]


class TraversalStackOverflow(RuntimeError):
    """Tree traversal exceeded STACK_CAPACITY; result would be wrong."""


def as_xy(positions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split an (n, 2) position array into contiguous x and y arrays."""
    pos = np.asarray(getattr(positions, "positions", positions), dtype=np.float64)
    pos = pos.reshape(-1, 2)
    return np.ascontiguousarray(pos[:, 0]), np.ascontiguousarray(pos[:, 1])


@njit(cache=True, inline="always")
def _mix64(x):
    x = x + _U64_GOLDEN
    x = (x ^ (x >> np.uint64(30))) * _U64_MIX1
    x = (x ^ (x >> np.uint64(27))) * _U64_MIX2
    return x ^ (x >> np.uint64(31))


@njit(cache=True, inline="always")
def _pair_direction(u, v):
    a, b = (u, v) if u <= v else (v, u)
    h1 = _mix64((np.uint64(a) << np.uint64(32)) ^ np.uint64(b))
    h2 = _mix64(h1)
    x = (h1 >> np.uint64(11)) * _INV_2_53 - 1.0
    y = (h2 >> np.uint64(11)) * _INV_2_53 - 1.0
    norm = np.sqrt(x * x + y * y)
    if norm == 0.0:
        return 1.0, 0.0
    return x / norm, y / norm


@njit(cache=True)
def _pair_direction_kernel(u, v):
    return _pair_direction(u, v)


def pair_direction_compiled(u: int, v: int) -> tuple[float, float]:
    """Compiled twin of forces.pair_direction (exposed for parity tests)."""
    return _pair_direction_kernel(np.int64(u), np.int64(v))


@njit(cache=True, inline="always")
def _pair_delta(xq, yq, xu, yu, q, u, eps):
    """Delta p(q)-p(u) with the coincident-pair jitter substitution."""
    dx = xq - xu
    dy = yq - yu
    d2 = dx * dx + dy * dy
    if d2 < eps * eps:
        ux, uy = _pair_direction(q, u)
        s = eps if q > u else -eps
        dx = s * ux
        dy = s * uy
        d2 = dx * dx + dy * dy
    return dx, dy, d2


@njit(cache=True, inline="always")
def _accumulate_cutoff(px, py, v, ids, cnt, k2, r2, eps, disp):
    """Sum cutoff repulsion over candidate ids (in the order given)."""
    xq = px[v]
    yq = py[v]
    ax = 0.0
    ay = 0.0
    for i in range(cnt):
        u = ids[i]
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


def resolve_threads(threads: int) -> int:
    """Map the CLI convention (0 = auto) onto usable numba threads."""
    import numba

    limit = numba.config.NUMBA_NUM_THREADS
    if threads <= 0:
        return limit
    return min(threads, limit)


DEFAULT_EPS = MIN_SEPARATION_EPSILON
