"""Cone-ordered optimization problems on a spherical patch and their image.

An instance minimizes ``f: M -> M`` over ``K = {x in M : g(x) >= 0}`` with
respect to the cone ``C_p`` carried to every point by parallel transport.
``y`` is efficient when no feasible ``x`` has
``log_{f(y)} f(x) in C_{f(y)} \\ {0}``.

The continuum ``M`` is replaced by the deterministic patch grid of
:func:`sgop.sphere.sample_patch`; every decision here is exact relative to
that grid and the configured tolerances.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cones import SectorCone, contains_strict_many, transport_cone
from .config import Resolution, ScalarizationSettings, SearchGrid, Tolerances
from .errors import (
    BaseMismatchError,
    EmptyFeasibleRegionError,
    InfeasibleError,
    PreconditionError,
    RangeError,
)
from .sphere import (
    Patch,
    SpherePoint,
    TangentVector,
    distance_many,
    exp_map_many,
    log_map_many,
    sample_patch_array,
)


# -- objective and constraint families ---------------------------------------


def rotation_matrix(axis, angle: float) -> np.ndarray:
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + math.sin(angle) * kx + (1.0 - math.cos(angle)) * (kx @ kx)


@dataclass(frozen=True, eq=False)
class ObjectiveSpec:
    """One of the registered objective families.

    * ``identity``: ``f(x) = x``
    * ``rotation``: ``f(x) = R x`` for the rotation by ``angle`` about ``axis``
    * ``pull``: ``f(x) = exp_x(t log_x anchor)``, a step of fraction ``t``
      toward ``anchor``
    """

    family: str = "identity"
    axis: Optional[np.ndarray] = None
    angle: float = 0.0
    anchor: Optional[SpherePoint] = None
    t: float = 0.0

    def __post_init__(self):
        if self.family == "rotation":
            axis = np.asarray(self.axis, dtype=float).reshape(3)
            if not np.linalg.norm(axis) > 0.0:
                raise ValueError("rotation axis must be nonzero")
            object.__setattr__(self, "axis", axis)
        elif self.family == "pull":
            if self.anchor is None:
                raise ValueError("pull objective needs an anchor")
            if not 0.0 <= self.t <= 1.0:
                raise ValueError("pull fraction t must lie in [0, 1]")
        elif self.family != "identity":
            raise ValueError(f"unknown objective family {self.family!r}")

    def apply(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(xs)
        if self.family == "identity":
            return xs.copy()
        if self.family == "rotation":
            out = xs @ rotation_matrix(self.axis, self.angle).T
            return out / np.linalg.norm(out, axis=1)[:, None]
        a = self.anchor.coords
        out = np.empty_like(xs)
        for i, x in enumerate(xs):
            out[i] = exp_map_many(x, self.t * log_map_many(x, a[None, :]))[0]
        return out


@dataclass(frozen=True, eq=False)
class BallConstraint:
    """``g(x) = r - d(x, center)``: nonnegative on the closed geodesic ball."""

    center: SpherePoint
    r: float

    def evaluate(self, xs: np.ndarray) -> np.ndarray:
        return self.r - distance_many(self.center.coords, xs)


@dataclass(frozen=True, eq=False)
class AffineConstraint:
    """``g(x) = <n, x> - b``."""

    n: np.ndarray
    b: float

    def __post_init__(self):
        object.__setattr__(self, "n", np.asarray(self.n, dtype=float).reshape(3))

    def evaluate(self, xs: np.ndarray) -> np.ndarray:
        return np.atleast_2d(xs) @ self.n - self.b


@dataclass(frozen=True)
class ConstraintSpec:
    terms: tuple

    def __post_init__(self):
        if len(self.terms) < 1:
            raise ValueError("at least one constraint term is required")

    @property
    def size(self) -> int:
        return len(self.terms)

    def evaluate(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(xs)
        return np.column_stack([t.evaluate(xs) for t in self.terms])


# -- the instance ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GopInstance:
    """A problem instance plus the analysis settings that travel with it.

    ``config`` keeps the normalized document the instance was built from, so
    reports can embed it and reproduce the instance bit for bit.
    """

    patch: Patch
    ref_point: SpherePoint
    ref_cone: SectorCone
    objective: ObjectiveSpec
    constraints: ConstraintSpec
    tolerances: Tolerances = field(default_factory=Tolerances)
    resolution: Resolution = field(default_factory=Resolution)
    search: SearchGrid = field(default_factory=SearchGrid)
    scalarization: ScalarizationSettings = field(default_factory=ScalarizationSettings)
    name: str = ""
    config: Optional[dict] = None

    def __post_init__(self):
        if not self.patch.contains(self.ref_point):
            raise RangeError("reference point lies outside the patch")
        if not self.ref_cone.base.isclose(self.ref_point):
            raise BaseMismatchError("reference cone must be based at the reference point")
        object.__setattr__(self, "_cone_cache", {})

    @property
    def n_constraints(self) -> int:
        return self.constraints.size

    def cone_at(self, point: SpherePoint) -> SectorCone:
        """``C_point``: the reference cone transported to ``point``."""
        cache = self._cone_cache
        key = point.coords.tobytes()
        if key not in cache:
            cache[key] = transport_cone(self.ref_cone, point, self.tolerances.antipodal)
        return cache[key]

    def check_in_patch(self, x: SpherePoint):
        if not self.patch.contains(x):
            raise RangeError(f"{x!r} lies outside the patch")

    def samples(self, resolution: Optional[Resolution] = None) -> np.ndarray:
        res = resolution or self.resolution
        return sample_patch_array(self.patch, res.radial, res.angular)


def evaluate_objective(inst: GopInstance, x: SpherePoint) -> SpherePoint:
    inst.check_in_patch(x)
    return SpherePoint(inst.objective.apply(x.coords)[0])


def evaluate_constraints(inst: GopInstance, x: SpherePoint) -> np.ndarray:
    inst.check_in_patch(x)
    return inst.constraints.evaluate(x.coords)[0]


def is_feasible(inst: GopInstance, x: SpherePoint) -> bool:
    return bool(np.all(evaluate_constraints(inst, x) >= -inst.tolerances.feas))


def require_feasible(inst: GopInstance, y: SpherePoint):
    if not is_feasible(inst, y):
        raise InfeasibleError(f"{y!r} violates the constraints")


# -- image space ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ImagePoint:
    """``(u, v)`` in ``T_{f(y)} M x R^l``; ``source`` is the x it came from, if any."""

    u: TangentVector
    v: np.ndarray
    source: Optional[SpherePoint] = None

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float).reshape(-1))


class ImageCloud(Sequence):
    """Image of the patch grid under ``M_y(x) = (log_{f(y)} f(x), g(x))``.

    Stored column-wise: ``sources`` (N, 3), ``u`` (N, 3) and ``v`` (N, l);
    indexing yields :class:`ImagePoint` objects.
    """

    def __init__(self, y: SpherePoint, fy: SpherePoint, sources: np.ndarray, u: np.ndarray, v: np.ndarray,
                 resolution: Resolution):
        self.y = y
        self.fy = fy
        self.sources = sources
        self.u = u
        self.v = v
        self.resolution = resolution

    def __len__(self):
        return self.sources.shape[0]

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return ImagePoint(TangentVector(self.fy, self.u[i]), self.v[i], SpherePoint(self.sources[i]))

    def feasible_mask(self, tol: float) -> np.ndarray:
        return np.all(self.v >= -tol, axis=1)


def image_map(inst: GopInstance, y: SpherePoint, x: SpherePoint) -> ImagePoint:
    fy = evaluate_objective(inst, y)
    fx = evaluate_objective(inst, x)
    u = log_map_many(fy.coords, fx.coords[None, :], inst.tolerances.antipodal)[0]
    return ImagePoint(TangentVector(fy, u), evaluate_constraints(inst, x), x)


def image_cloud(inst: GopInstance, y: SpherePoint, resolution: Optional[Resolution] = None) -> ImageCloud:
    """Images of every patch sample, in sample order."""
    inst.check_in_patch(y)
    res = resolution or inst.resolution
    xs = inst.samples(res)
    fy = SpherePoint(inst.objective.apply(y.coords)[0])
    fx = inst.objective.apply(xs)
    u = log_map_many(fy.coords, fx, inst.tolerances.antipodal)
    v = inst.constraints.evaluate(xs)
    return ImageCloud(y, fy, xs, u, v, res)


def in_H(inst: GopInstance, y: SpherePoint, pt: ImagePoint) -> bool:
    """``u in C_{f(y)} \\ {0}`` and ``v >= 0`` (both within tolerance)."""
    cone = inst.cone_at(pt.u.base)
    fy = evaluate_objective(inst, y)
    if not fy.isclose(pt.u.base):
        raise BaseMismatchError("image point is not based at f(y)")
    tol = inst.tolerances
    return bool(contains_strict_many(cone, pt.u.vec, tol.mem)[0] and np.all(pt.v >= -tol.feas))


def in_H_many(inst: GopInstance, cloud: ImageCloud, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    cone = inst.cone_at(cloud.fy)
    tol = inst.tolerances
    return contains_strict_many(cone, u, tol.mem) & np.all(np.atleast_2d(v) >= -tol.feas, axis=1)


def in_extended_image(inst: GopInstance, y: SpherePoint, pt: ImagePoint, cloud: ImageCloud) -> bool:
    """Membership of ``pt`` in the extended image ``K - cl H`` over the cloud.

    True iff some cloud element ``(u_x, v_x)`` has ``u_x - pt.u`` in the closed
    cone and ``pt.v <= v_x`` componentwise.
    """
    if not cloud.fy.isclose(pt.u.base):
        raise BaseMismatchError("image point and cloud have different base points")
    return bool(_extended_membership(inst, cloud, pt.u.vec[None, :], pt.v[None, :])[0])


def _extended_membership(inst: GopInstance, cloud: ImageCloud, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    cone = inst.cone_at(cloud.fy)
    tol = inst.tolerances
    # coefficients are linear, so coeff(u_x - u) = coeff(u_x) - coeff(u)
    cc = cone.coefficients(cloud.u)
    pc = cone.coefficients(us)
    out = np.zeros(us.shape[0], dtype=bool)
    for start in range(0, us.shape[0], 256):
        stop = min(start + 256, us.shape[0])
        diff = cc[None, :, :] - pc[start:stop, None, :]
        cone_ok = np.all(diff >= -tol.mem, axis=2)
        v_ok = np.all(vs[start:stop, None, :] <= cloud.v[None, :, :] + tol.feas, axis=2)
        out[start:stop] = np.any(cone_ok & v_ok, axis=1)
    return out


def extended_image_probes(inst: GopInstance, cloud: ImageCloud, scales=(1e-3, 1e-1)) -> tuple[np.ndarray, np.ndarray]:
    """Candidate points of ``H`` used to test ``H`` against the extended image.

    One probe per cloud element, ``(u_x, max(v_x, 0))``, plus short rays along
    both generators and the bisector with ``v = 0``.
    """
    cone = inst.cone_at(cloud.fy)
    l = cloud.v.shape[1]
    us = [cloud.u]
    vs = [np.maximum(cloud.v, 0.0)]
    dirs = np.array([cone.gen_a.vec, cone.gen_b.vec, cone.bisector.vec])
    for s in scales:
        us.append(s * dirs)
        vs.append(np.zeros((3, l)))
    return np.vstack(us), np.vstack(vs)


@dataclass(frozen=True)
class EfficiencyReport:
    efficient: bool
    witness: Optional[SpherePoint] = None
    witness_index: Optional[int] = None


@dataclass(frozen=True)
class DisjointReport:
    disjoint: bool
    witness: Optional[ImagePoint] = None
    witness_index: Optional[int] = None


def brute_force_efficient(inst: GopInstance, y: SpherePoint, resolution: Optional[Resolution] = None,
                          cloud: Optional[ImageCloud] = None) -> EfficiencyReport:
    """Direct check of the efficiency definition over the patch grid.

    The witness, when present, is the first feasible sample ``x`` (in grid
    order) whose image direction lies in ``C_{f(y)} \\ {0}``.
    """
    require_feasible(inst, y)
    cloud = cloud if cloud is not None else image_cloud(inst, y, resolution)
    tol = inst.tolerances
    cone = inst.cone_at(cloud.fy)
    for i in range(len(cloud)):
        if not np.all(cloud.v[i] >= -tol.feas):
            continue
        if contains_strict_many(cone, cloud.u[i], tol.mem)[0]:
            return EfficiencyReport(False, SpherePoint(cloud.sources[i]), i)
    return EfficiencyReport(True)


def check_disjoint_H_K(inst: GopInstance, y: SpherePoint, resolution: Optional[Resolution] = None,
                       cloud: Optional[ImageCloud] = None) -> DisjointReport:
    """Whether no element of the sampled image lies in ``H``."""
    require_feasible(inst, y)
    cloud = cloud if cloud is not None else image_cloud(inst, y, resolution)
    if not np.any(cloud.feasible_mask(inst.tolerances.feas)):
        raise EmptyFeasibleRegionError("no feasible sample in the patch grid")
    hits = np.flatnonzero(in_H_many(inst, cloud, cloud.u, cloud.v))
    if hits.size:
        i = int(hits[0])
        return DisjointReport(False, cloud[i], i)
    return DisjointReport(True)


def check_disjoint_H_extended(inst: GopInstance, y: SpherePoint, resolution: Optional[Resolution] = None,
                              cloud: Optional[ImageCloud] = None) -> DisjointReport:
    """Whether no probe point of ``H`` lies in the extended image of the cloud.

    The witness carries no ``source``; it is a probe, not a cloud element.
    """
    require_feasible(inst, y)
    cloud = cloud if cloud is not None else image_cloud(inst, y, resolution)
    us, vs = extended_image_probes(inst, cloud)
    in_h = in_H_many(inst, cloud, us, vs)
    idx = np.flatnonzero(in_h)
    if idx.size:
        inside = _extended_membership(inst, cloud, us[idx], vs[idx])
        hits = idx[inside]
        if hits.size:
            i = int(hits[0])
            return DisjointReport(False, ImagePoint(TangentVector(cloud.fy, us[i]), vs[i]), i)
    return DisjointReport(True)


def efficiency_decisions(inst: GopInstance, y: SpherePoint, resolution: Optional[Resolution] = None) -> dict:
    """The three equivalent characterizations of efficiency, computed independently."""
    cloud = image_cloud(inst, y, resolution)
    return {
        "efficient": brute_force_efficient(inst, y, cloud=cloud).efficient,
        "extended_disjoint": check_disjoint_H_extended(inst, y, cloud=cloud).disjoint,
        "image_disjoint": check_disjoint_H_K(inst, y, cloud=cloud).disjoint,
    }


def grid_point(inst: GopInstance, ring: int, spoke: int, resolution: Optional[Resolution] = None) -> SpherePoint:
    """The grid sample on ring ``ring`` (0 = center) and spoke ``spoke``."""
    res = resolution or inst.resolution
    if ring == 0:
        return inst.patch.center
    if not (1 <= ring <= res.radial and 0 <= spoke < res.angular):
        raise PreconditionError(f"grid index ({ring}, {spoke}) outside resolution {res}")
    return SpherePoint(inst.samples(res)[1 + (ring - 1) * res.angular + spoke])
