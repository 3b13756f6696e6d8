"""Repulsive-phase backend registry.

Every backend computes the same dispersion (bit-for-bit in deterministic
mode); they differ in how candidate neighbors are found:

- ``naive``        exact all-pairs, no cutoff
- ``naive-cutoff`` exact all-pairs with the 2k cutoff (the reference)
- ``grid``         uniform cells of side 2k, 3x3 block candidates
- ``lbvh``         BVH over points, per-vertex radius gather
- ``rayquery``     BVH over radius-2k discs, per-vertex containment probe
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import grid as _grid
from . import lbvh as _lbvh
from . import naive as _naive
from . import rayquery as _rayquery
from .common import NeighborLists, PhaseTimes, TraversalStackOverflow


class UnknownBackendError(ValueError):
    pass


@dataclass(frozen=True)
class RepulsiveBackend:
    """A repulsive phase plus the matching exact neighbor-set query."""

    name: str
    run: Callable[..., PhaseTimes]
    neighbors: Callable[[np.ndarray, float], NeighborLists]


def _naive_run(positions, k, disp, **kw) -> PhaseTimes:
    return _naive.repulsive_naive(positions, k, disp, **kw)


def _naive_cutoff_run(positions, k, disp, **kw) -> PhaseTimes:
    return _naive.repulsive_naive_cutoff(positions, k, disp, **kw)


BACKENDS: dict[str, RepulsiveBackend] = {
    "naive": RepulsiveBackend("naive", _naive_run, _naive.neighbors_all),
    "naive-cutoff": RepulsiveBackend(
        "naive-cutoff", _naive_cutoff_run, _naive.neighbors_all
    ),
    "grid": RepulsiveBackend("grid", _grid.repulsive, _grid.neighbors_all),
    "lbvh": RepulsiveBackend("lbvh", _lbvh.repulsive, _lbvh.neighbors_all),
    "rayquery": RepulsiveBackend(
        "rayquery", _rayquery.repulsive, _rayquery.neighbors_all
    ),
}

BACKEND_NAMES = tuple(BACKENDS)


def get_backend(name: str) -> RepulsiveBackend:
    try:
        return BACKENDS[name]
    except KeyError:
        raise UnknownBackendError(
            f"unknown backend {name!r}; expected one of {', '.join(BACKENDS)}"
        ) from None


__all__ = [
    "BACKENDS",
    "BACKEND_NAMES",
    "NeighborLists",
    "PhaseTimes",
    "RepulsiveBackend",
    "TraversalStackOverflow",
    "UnknownBackendError",
    "get_backend",
]
