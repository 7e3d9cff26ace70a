"""Scalarization of the cone-ordered problem by a weighted quasi-minimum.

The efficiency test counts ``x`` as better than ``y`` when
``log_{f(y)} f(x) in C_{f(y)} \\ {0}``, so the scalar problem is posed with the
reflected cone ``D = -C_{f(y)}``:

* ``G(y) = {x : -log_{f(y)} f(x) in D}``, the points at least as good as ``y``;
* ``G_p(y) = {x : <p, log_{f(y)} f(x)> <= 0}`` with ``p`` in ``int D*``;
* the quasi-minimum problem minimizes ``<p, log_{f(y)} f(x)>`` over ``K`` and
  ``G(y)``.

With this orientation a minimizer is efficient in exactly the sense that
:func:`sgop.problem.brute_force_efficient` checks.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cones import SectorCone, contains_many, pick_interior_polar, reflect_cone
from .config import Resolution
from .errors import EmptyFeasibleRegionError, InfeasibleError, PreconditionError, StabilityWarning
from .problem import (
    GopInstance,
    brute_force_efficient,
    evaluate_objective,
    image_cloud,
    is_feasible,
)
from .sphere import SpherePoint, TangentVector, log_map, log_map_many, parallel_transport


def improvement_cone(inst: GopInstance, fy: SpherePoint) -> SectorCone:
    """``D = -C_{f(y)}``, the cone the scalar problem is posed with."""
    return reflect_cone(inst.cone_at(fy))


def _log_fx(inst: GopInstance, y: SpherePoint, x: SpherePoint) -> TangentVector:
    return log_map(evaluate_objective(inst, y), evaluate_objective(inst, x), inst.tolerances.antipodal)


def in_G(inst: GopInstance, y: SpherePoint, x: SpherePoint, tol: float = 1e-9) -> bool:
    """``-log_{f(y)} f(x) in D`` (closed), i.e. ``x`` is at least as good as ``y``."""
    u = _log_fx(inst, y, x)
    return bool(contains_many(improvement_cone(inst, u.base), -u.vec, tol)[0])


def in_Gp(inst: GopInstance, y: SpherePoint, x: SpherePoint, p_vector: TangentVector, tol: float = 1e-9) -> bool:
    u = _log_fx(inst, y, x)
    if not p_vector.base.isclose(u.base):
        raise PreconditionError("p must be a tangent vector at f(y)")
    return bool(0.0 >= float(p_vector.vec @ u.vec) - tol)


def default_p(inst: GopInstance, fy: SpherePoint) -> TangentVector:
    """Unit bisector of ``D*``, a canonical interior point."""
    return pick_interior_polar(improvement_cone(inst, fy))


def check_p_interior(inst: GopInstance, p_vector: TangentVector, tol: float = 1e-9):
    d = improvement_cone(inst, p_vector.base)
    if not (p_vector.dot(d.gen_a) > tol and p_vector.dot(d.gen_b) > tol):
        raise PreconditionError("p must lie in the interior of the dual of the improvement cone")


def p_at(inst: GopInstance, fy: SpherePoint, p: Optional[Sequence[float]] = None) -> TangentVector:
    """The scalarizing vector at ``f(y)``.

    ``p = None`` picks the default; an explicit ambient vector is read at the
    reference point and parallel-transported to ``f(y)``.
    """
    if p is None:
        return default_p(inst, fy)
    at_ref = TangentVector.project(inst.ref_point, p)
    vec = parallel_transport(at_ref, fy, inst.tolerances.antipodal)
    check_p_interior(inst, vec)
    return vec


def check_C_function(inst: GopInstance, y: SpherePoint, sample_pairs, alpha_grid, tol: float = 1e-9) -> bool:
    """Cone-convexity of ``F(x) = log_{f(y)} f(x)`` on the sampled chords.

    For each pair and ``alpha`` the defect
    ``(1 - alpha) F(x') + alpha F(x'') - log_{f(y)}(m)`` must lie in ``D``,
    where ``m`` is the chord combination ``(1 - alpha) f(x') + alpha f(x'')``
    renormalized to the sphere.
    """
    fy = evaluate_objective(inst, y)
    d = improvement_cone(inst, fy)
    for x1, x2 in sample_pairs:
        f1 = evaluate_objective(inst, x1).coords
        f2 = evaluate_objective(inst, x2).coords
        F = log_map_many(fy.coords, np.vstack([f1, f2]), inst.tolerances.antipodal)
        for a in alpha_grid:
            chord = (1.0 - a) * f1 + a * f2
            norm = float(np.linalg.norm(chord))
            if norm < 1e-12:
                raise PreconditionError("chord passes through the origin")
            lm = log_map_many(fy.coords, (chord / norm)[None, :], inst.tolerances.antipodal)[0]
            defect = (1.0 - a) * F[0] + a * F[1] - lm
            if not contains_many(d, defect, tol)[0]:
                return False
    return True


@dataclass(frozen=True)
class QuasiMinResult:
    x_best: SpherePoint
    value: float
    feasible_count: int
    index: int

    def as_dict(self) -> dict:
        return {
            "x_best": self.x_best.coords.tolist(),
            "value": self.value,
            "feasible_count": self.feasible_count,
            "index": self.index,
        }


def _candidates(inst: GopInstance, y: SpherePoint, resolution: Optional[Resolution]):
    cloud = image_cloud(inst, y, resolution)
    d = improvement_cone(inst, cloud.fy)
    tol = inst.tolerances
    mask = cloud.feasible_mask(tol.feas) & contains_many(d, -cloud.u, tol.mem)
    return cloud, mask


def solve_quasi_min(inst: GopInstance, y: SpherePoint, p_vector: TangentVector,
                    resolution: Optional[Resolution] = None, tol: Optional[float] = None) -> QuasiMinResult:
    """Exhaustive grid minimization of ``<p, log_{f(y)} f(x)>`` over ``K`` and ``G(y)``.

    Ties go to the first sample in grid order.
    """
    cloud, mask = _candidates(inst, y, resolution)
    if not p_vector.base.isclose(cloud.fy):
        raise PreconditionError("p must be a tangent vector at f(y)")
    check_p_interior(inst, p_vector, 0.0 if tol is None else tol)
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        raise EmptyFeasibleRegionError("no grid sample lies in K and G(y)")
    values = cloud.u[idx] @ p_vector.vec
    k = int(np.argmin(values))
    i = int(idx[k])
    return QuasiMinResult(SpherePoint(cloud.sources[i]), float(values[k]), int(idx.size), i)


@dataclass
class ScalarizationResult:
    x_star: SpherePoint
    certified: bool
    stable: bool
    trace: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "x_star": self.x_star.coords.tolist(),
            "certified": self.certified,
            "stable": self.stable,
            "trace": self.trace,
            "warnings": self.warnings,
        }


def solve_gop_via_scalarization(inst: GopInstance, y0: SpherePoint, p: Optional[Sequence[float]] = None,
                                resolution: Optional[Resolution] = None, tol: Optional[float] = None,
                                max_rounds: Optional[int] = None) -> ScalarizationResult:
    """Solve the quasi-minimum problem at ``y0``, then re-solve at the answer.

    A solution ``x0`` is stable when the re-solve at ``y = x0`` cannot improve
    on ``0`` by more than ``tol``. If it can (a grid artifact), a
    :class:`StabilityWarning` is recorded and the improved point is taken,
    for at most ``max_rounds`` re-solves. ``certified`` is the brute-force
    efficiency of the final point.
    """
    settings = inst.scalarization
    p = settings.p if p is None else p
    tol = settings.tol if tol is None else tol
    max_rounds = settings.max_rounds if max_rounds is None else max_rounds
    if not is_feasible(inst, y0):
        raise InfeasibleError(f"start point {y0!r} violates the constraints")

    def solve(y):
        fy = evaluate_objective(inst, y)
        pv = p_at(inst, fy, p)
        res = solve_quasi_min(inst, y, pv, resolution)
        trace.append({"y": y.coords.tolist(), "p": pv.vec.tolist(), **res.as_dict()})
        return res

    trace: list = []
    notes: list = []
    x0 = solve(y0).x_best
    stable_first = None
    for _ in range(max_rounds):
        again = solve(x0)
        ok = again.value >= -tol
        if stable_first is None:
            stable_first = ok
        if ok:
            break
        msg = f"re-solve at {x0!r} improved by {-again.value:.3e}; grid artifact"
        notes.append(msg)
        warnings.warn(msg, StabilityWarning, stacklevel=2)
        x0 = again.x_best
    certified = brute_force_efficient(inst, x0, resolution).efficient
    return ScalarizationResult(x0, certified, bool(stable_first), trace, notes)


def check_nesting(inst: GopInstance, y0: SpherePoint, x0: SpherePoint, samples: np.ndarray,
                  tol: float = 1e-9) -> bool:
    """Every sampled member of ``G(x0)`` also belongs to ``G(y0)``."""
    if not in_G(inst, y0, x0, tol):
        raise PreconditionError("x0 must belong to G(y0)")
    samples = np.atleast_2d(samples)
    fs = inst.objective.apply(samples)
    f_x0 = evaluate_objective(inst, x0)
    f_y0 = evaluate_objective(inst, y0)
    at_x0 = contains_many(improvement_cone(inst, f_x0), -log_map_many(f_x0.coords, fs), tol)
    at_y0 = contains_many(improvement_cone(inst, f_y0), -log_map_many(f_y0.coords, fs), tol)
    return bool(np.all(at_y0[at_x0]))


def quasi_min_decisions(inst: GopInstance, y: SpherePoint, p_vector: Optional[TangentVector] = None,
                        resolution: Optional[Resolution] = None) -> dict:
    """Three independent readings of "``y`` solves the quasi-minimum problem at ``y``".

    * ``minimal``: the scalar minimum over ``K`` and ``G(y)`` is ``0`` (within tol);
    * ``system_impossible``: no sample has ``<p, u> < 0``, ``-u in D`` and ``g >= 0``;
    * ``efficient``: brute-force efficiency of ``y``.
    """
    cloud = image_cloud(inst, y, resolution)
    pv = p_vector if p_vector is not None else default_p(inst, cloud.fy)
    tol = inst.tolerances
    minimal = solve_quasi_min(inst, y, pv, resolution).value >= -tol.cert
    d = improvement_cone(inst, cloud.fy)
    feasible = np.all(cloud.v >= -tol.feas, axis=1)
    better = cloud.u @ pv.vec < -tol.cert
    in_d = contains_many(d, -cloud.u, tol.mem)
    system_impossible = not bool(np.any(feasible & better & in_d))
    efficient = brute_force_efficient(inst, y, cloud=cloud).efficient
    return {"minimal": bool(minimal), "system_impossible": system_impossible, "efficient": efficient}
