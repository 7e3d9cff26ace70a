"""Oriented distance and Gerstewitz scalarizing functions.

Closed forms:

* oriented distance to the half-line ``[0, inf)``: ``-s``;
* oriented distance to the orthant ``R_+^l``: ``|min(y, 0)|`` outside,
  ``-min_i y_i`` inside;
* oriented distance to a sector: distance to the nearest boundary ray,
  signed by membership;
* Gerstewitz function of the orthant with direction ``q < 0``:
  ``max_i y_i / q_i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cones import SectorCone, _check_base
from .errors import DimensionMismatchError, RangeError
from .sphere import TangentVector

# d_A for A empty; never produced by the supported sets
EMPTY_SET_DISTANCE = float("inf")


@dataclass(frozen=True, eq=False)
class OrthantParams:
    """Direction ``q`` (every component < 0) for the Gerstewitz function of R_+^l."""

    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(-1)
        if q.size == 0 or np.any(~(q < 0.0)):
            raise RangeError(f"Gerstewitz direction must be strictly negative, got {q!r}")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def dimension(self) -> int:
        return int(self.q.size)


def oriented_distance_halfline(s):
    """Oriented distance to ``R_+`` (works elementwise on arrays)."""
    return -np.asarray(s, dtype=float) if np.ndim(s) else -float(s)


def oriented_distance_orthant(y) -> np.ndarray | float:
    """Oriented distance to ``R_+^l``; ``y`` is an l-vector or an (N, l) array."""
    y = np.asarray(y, dtype=float)
    neg = np.minimum(y, 0.0)
    outside = np.linalg.norm(neg, axis=-1)
    inside = np.min(y, axis=-1)
    out = np.where(outside > 0.0, outside, -np.maximum(inside, 0.0))
    return float(out) if out.ndim == 0 else out


def _ray_distance(vecs: np.ndarray, ray: np.ndarray) -> np.ndarray:
    t = np.maximum(vecs @ ray, 0.0)
    return np.linalg.norm(vecs - t[:, None] * ray[None, :], axis=1)


def oriented_distance_sector_many(cone: SectorCone, vecs: np.ndarray) -> np.ndarray:
    """Row-wise oriented distance to the sector; rows are ambient tangent vectors."""
    vecs = np.atleast_2d(vecs)
    ang = cone.angles(vecs)
    inside = (ang >= 0.0) & (ang <= cone.aperture)
    # Both d_A (outside) and d_{A^c} (inside) equal the distance to the boundary rays.
    to_boundary = np.minimum(_ray_distance(vecs, cone.gen_a.vec), _ray_distance(vecs, cone.gen_b.vec))
    return np.where(inside, -to_boundary, to_boundary)


def oriented_distance_sector(cone: SectorCone, v: TangentVector) -> float:
    _check_base(cone, v)
    return float(oriented_distance_sector_many(cone, v.vec)[0])


def gerstewitz(v, params: OrthantParams):
    """``min{t : v in t q + R_+^l}`` = ``max_i v_i / q_i``.

    ``v`` may be an l-vector or an (N, l) array.
    """
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != params.dimension:
        raise DimensionMismatchError(f"expected {params.dimension} components, got {v.shape[-1]}")
    out = np.max(v / params.q, axis=-1)
    return float(out) if out.ndim == 0 else out
