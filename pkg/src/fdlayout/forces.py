"""Spring-embedder force formulas and per-iteration parameters.

Reference scalar implementations; the compiled backend kernels use the
same expression order so results agree bit-for-bit where contracts
require it.  Conventions pinned here and mirrored by every backend:

- repulsion  F_rep(d, k)  = d * (k*k) / |d|^2          (magnitude k^2/|d|)
- cutoff     F_rep_cutoff = F_rep if |d| < 2k else 0   (strict inequality,
             tested as |d|^2 < (2k)*(2k))
- attraction F_att(d, k)  = d * |d| / k                (magnitude |d|^2/k)
- pairs closer than MIN_SEPARATION_EPSILON are nudged apart along a
  deterministic pseudo-random direction keyed on the vertex-id pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MIN_SEPARATION_EPSILON = 1e-9

# AABB extents are clamped below by one layout unit before computing the
# area, so k stays positive for degenerate (collinear/coincident) layouts.
MIN_AABB_EXTENT = 1.0


@dataclass(frozen=True)
class ForceParams:
    """Per-iteration force constants; cutoff_radius is pinned to 2k."""

    k: float
    cutoff_radius: float
    temperature: float
    min_separation_epsilon: float = MIN_SEPARATION_EPSILON

    def __post_init__(self) -> None:
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.cutoff_radius != 2.0 * self.k:
            raise ValueError("cutoff_radius must equal 2*k exactly")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        if self.min_separation_epsilon <= 0:
            raise ValueError("min_separation_epsilon must be positive")

    @classmethod
    def from_k(cls, k: float, temperature: float) -> "ForceParams":
        return cls(k=k, cutoff_radius=2.0 * k, temperature=temperature)


def compute_k(positions: np.ndarray) -> float:
    """Ideal edge length sqrt(A/n), A the area of the layout AABB.

    Each AABB extent is clamped below by MIN_AABB_EXTENT, so a single
    vertex or a collinear layout still yields a positive k.
    """
    pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    n = pos.shape[0]
    if n < 1:
        raise ValueError("compute_k requires at least one vertex")
    lo = pos.min(axis=0)
    hi = pos.max(axis=0)
    w = max(float(hi[0] - lo[0]), MIN_AABB_EXTENT)
    h = max(float(hi[1] - lo[1]), MIN_AABB_EXTENT)
    return math.sqrt((w * h) / n)


def _require_separated(d2: float) -> None:
    if d2 < MIN_SEPARATION_EPSILON * MIN_SEPARATION_EPSILON:
        raise ValueError(
            "|delta| below min separation; substitute jitter_delta first"
        )


def f_rep(delta: np.ndarray, k: float) -> np.ndarray:
    """Repulsive force on the vertex at the head of ``delta``."""
    dx, dy = float(delta[0]), float(delta[1])
    d2 = dx * dx + dy * dy
    _require_separated(d2)
    c = (k * k) / d2
    return np.array([dx * c, dy * c])


def f_rep_cutoff(delta: np.ndarray, k: float) -> np.ndarray:
    """Repulsion zeroed at and beyond distance 2k (strict inside test)."""
    dx, dy = float(delta[0]), float(delta[1])
    d2 = dx * dx + dy * dy
    _require_separated(d2)
    r = 2.0 * k
    if d2 >= r * r:
        return np.zeros(2)
    c = (k * k) / d2
    return np.array([dx * c, dy * c])


def f_att(delta: np.ndarray, k: float) -> np.ndarray:
    """Attractive force along ``delta`` with magnitude |delta|^2 / k."""
    if k <= 0:
        raise ValueError("k must be positive")
    dx, dy = float(delta[0]), float(delta[1])
    d2 = dx * dx + dy * dy
    _require_separated(d2)
    c = math.sqrt(d2) / k
    return np.array([dx * c, dy * c])


def cool(t0: float, iteration: int, total: int) -> float:
    """Linear cooling schedule t(i) = t0 * (1 - i/total)."""
    if not 0 <= iteration < total:
        raise ValueError("iteration must lie in [0, total)")
    return t0 * (1.0 - iteration / total)


def displace(positions: np.ndarray, disp: np.ndarray, t: float) -> None:
    """Move each vertex along its dispersion, capped at distance t.

    In-place; vertices with zero dispersion stay put.  No frame clamping.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    dx = disp[:, 0]
    dy = disp[:, 1]
    length = np.sqrt(dx * dx + dy * dy)
    moving = length > 0.0
    scale = np.zeros_like(length)
    scale[moving] = np.minimum(length[moving], t) / length[moving]
    positions[:, 0] += dx * scale
    positions[:, 1] += dy * scale


def _mix64(x: int) -> int:
    # splitmix64 finalizer; all arithmetic modulo 2^64.
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def pair_direction(u: int, v: int) -> tuple[float, float]:
    """Deterministic pseudo-random unit vector keyed on the id pair.

    Symmetric in (u, v); avoids trig so interpreted and compiled callers
    produce identical bits (only +,-,*,/ and sqrt are used).
    """
    a, b = (u, v) if u <= v else (v, u)
    h1 = _mix64((a << 32) ^ b)
    h2 = _mix64(h1)
    x = (h1 >> 11) * (2.0 / 9007199254740992.0) - 1.0
    y = (h2 >> 11) * (2.0 / 9007199254740992.0) - 1.0
    norm = math.sqrt(x * x + y * y)
    if norm == 0.0:
        return 1.0, 0.0
    return x / norm, y / norm


def jitter_delta(
    q: int, other: int, eps: float = MIN_SEPARATION_EPSILON
) -> tuple[float, float]:
    """Substitute separation vector p(q) - p(other) for a coincident pair.

    The direction is keyed on the unordered id pair; the sign flips with
    orientation so the substitution stays pairwise antisymmetric and
    coincident vertices are pushed apart rather than in lockstep.
    """
    ux, uy = pair_direction(q, other)
    s = eps if q > other else -eps
    return s * ux, s * uy
