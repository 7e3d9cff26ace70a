"""Weak separation functions on the image space and the optimality tests built on them.

Two families separate ``H = (C_{f(y)} \\ {0}) x R_+^l`` from the image:

* linear: ``omega1(u, v; theta, lam) = <theta, u> + <lam, v>`` with
  ``theta`` in the polar cone minus the origin and ``lam >= 0``;
* nonlinear: ``omega2(u, v; phi, gamma) = -Delta_{R+}(<phi, u>) - xi_gamma(v)``
  with ``phi`` in the polar cone and ``gamma < 0`` componentwise (the
  Gerstewitz term is dropped when ``gamma`` is the zero vector).

A parameter choice whose maximum over the image is ``<= 0`` certifies
efficiency of ``y``. Search grids only use directions from the interior of
the polar cone: on its boundary ``<theta, u>`` can vanish on ``H``, and the
certificate would no longer exclude ``H``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cones import SectorCone, contains_many, polar_cone
from .config import Resolution, SearchGrid
from .errors import BaseMismatchError, DimensionMismatchError, PreconditionError, RangeError
from .problem import (
    GopInstance,
    ImageCloud,
    ImagePoint,
    evaluate_objective,
    image_map,
    require_feasible,
)
from .scalar import OrthantParams, gerstewitz, oriented_distance_halfline
from .sphere import SpherePoint, TangentVector


@dataclass(frozen=True, eq=False)
class LinearSepParams:
    theta: TangentVector
    lam: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float).reshape(-1)
        if np.any(lam < 0.0):
            raise RangeError("lambda must be componentwise nonnegative")
        if self.theta.norm == 0.0:
            raise RangeError("theta must be nonzero")
        object.__setattr__(self, "lam", lam)

    def as_dict(self) -> dict:
        return {"theta": self.theta.vec.tolist(), "lambda": self.lam.tolist()}


@dataclass(frozen=True, eq=False)
class NonlinearSepParams:
    """``gamma`` is either strictly negative or exactly the zero vector."""

    phi: TangentVector
    gamma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float).reshape(-1)
        if not (np.all(g < 0.0) or np.all(g == 0.0)):
            raise RangeError("gamma must lie in -int R_+^l or be the zero vector")
        object.__setattr__(self, "gamma", g)

    @property
    def gamma_is_zero(self) -> bool:
        return bool(np.all(self.gamma == 0.0))

    def as_dict(self) -> dict:
        return {"phi": self.phi.vec.tolist(), "gamma": self.gamma.tolist()}


@dataclass(frozen=True)
class SeparationCertificate:
    kind: str
    params: object
    max_omega_over_cloud: float
    resolution: Resolution

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params.as_dict(),
            "max_omega_over_cloud": self.max_omega_over_cloud,
            "resolution": self.resolution.as_dict(),
        }


def in_polar(cone: SectorCone, w: TangentVector, tol: float = 1e-9) -> bool:
    return bool(contains_many(polar_cone(cone), w.vec, tol)[0])


def polar_directions(cone: SectorCone, n: int) -> np.ndarray:
    """``n`` unit vectors at the midpoints of equal sub-arcs of the polar sector."""
    polar = polar_cone(cone)
    ap = polar.aperture
    return np.array([polar.direction((k + 0.5) * ap / n).vec for k in range(n)])


# -- the two families -------------------------------------------------------------


def _check_pt(pt: ImagePoint, base: SpherePoint, l: int):
    if not pt.u.base.isclose(base):
        raise BaseMismatchError("parameter and image point live in different tangent planes")
    if pt.v.size != l:
        raise DimensionMismatchError(f"expected {l} constraint values, got {pt.v.size}")


def omega1(pt: ImagePoint, params: LinearSepParams) -> float:
    _check_pt(pt, params.theta.base, params.lam.size)
    return float(params.theta.vec @ pt.u.vec + params.lam @ pt.v)


def omega_tilde(s):
    """``-Delta_{R+}(s)``, the tangent part of ``omega2`` as a function of ``<phi, u>``."""
    return -oriented_distance_halfline(s)


def omega_underline(v, gamma: np.ndarray):
    """Constraint part of ``omega2``: ``-xi_gamma(v)``, or 0 when ``gamma`` is zero."""
    v = np.asarray(v, dtype=float)
    if np.all(gamma == 0.0):
        return np.zeros(v.shape[:-1]) if v.ndim > 1 else 0.0
    return -gerstewitz(v, OrthantParams(gamma))


def omega2(pt: ImagePoint, params: NonlinearSepParams) -> float:
    _check_pt(pt, params.phi.base, params.gamma.size)
    return float(omega_tilde(float(params.phi.vec @ pt.u.vec)) + omega_underline(pt.v, params.gamma))


# -- constructive separators -------------------------------------------------------


def _separating_direction(cone: SectorCone, u: np.ndarray, tol: float) -> np.ndarray:
    """A unit polar vector with ``<theta, u> <= 0`` for ``u`` outside the cone.

    Uses the normal of the generator opposite to the negative coefficient:
    if ``u = alpha a + beta b`` with ``beta < 0`` the inward normal of ``a``
    gives ``<n_a, u> = beta sin(aperture) < 0`` (symmetrically for alpha).
    """
    polar = polar_cone(cone)
    n_b, n_a = polar.gen_a.vec, polar.gen_b.vec  # n_a is orthogonal to gen_a
    alpha, beta = cone.coefficients(u)[0]
    if beta < -tol or alpha < -tol:
        return n_a if beta <= alpha else n_b
    # u is (numerically) the apex: every polar direction gives ~0
    return n_a if float(n_a @ u) <= float(n_b @ u) else n_b


def _not_in_H(cone: SectorCone, pt: ImagePoint, tol_mem: float, tol_feas: float) -> tuple[bool, bool]:
    u_in = bool(contains_many(cone, pt.u.vec, tol_mem)[0]) and pt.u.norm > tol_mem
    v_in = bool(np.all(pt.v >= -tol_feas))
    if u_in and v_in:
        raise PreconditionError("image point lies in H; no separating parameter exists")
    return u_in, v_in


def find_separator_omega1(pt: ImagePoint, cone: SectorCone, tol_mem: float = 1e-9,
                          tol_feas: float = 1e-9) -> LinearSepParams:
    """Parameters with ``omega1(pt) <= 0`` for a point outside ``H``."""
    if not cone.base.isclose(pt.u.base):
        raise BaseMismatchError("cone and image point have different base points")
    u_in, _ = _not_in_H(cone, pt, tol_mem, tol_feas)
    base = cone.base
    l = pt.v.size
    if not u_in:
        theta = _separating_direction(cone, pt.u.vec, tol_mem)
        return LinearSepParams(TangentVector(base, theta), np.zeros(l))
    # u in C \ {0} but some v_i < 0: weight that constraint, shrink theta
    i0 = int(np.argmin(pt.v))
    lam = np.zeros(l)
    lam[i0] = 1.0
    theta = polar_cone(cone).bisector.vec
    tu = float(theta @ pt.u.vec)
    alpha = 1.0 if tu <= 0.0 else 0.5 * (-lam[i0] * pt.v[i0]) / tu
    return LinearSepParams(TangentVector(base, alpha * theta), lam)


def find_separator_omega2(pt: ImagePoint, cone: SectorCone, tol_mem: float = 1e-9,
                          tol_feas: float = 1e-9) -> NonlinearSepParams:
    """Parameters with ``omega2(pt) <= 0`` for a point outside ``H``.

    If some constraint value is negative, ``phi = 0`` and ``gamma = -1`` make
    the Gerstewitz term ``min_i v_i < 0``; otherwise ``u`` is outside
    ``C \\ {0}`` and a separating polar direction with ``gamma = 0`` works.
    """
    if not cone.base.isclose(pt.u.base):
        raise BaseMismatchError("cone and image point have different base points")
    _, v_in = _not_in_H(cone, pt, tol_mem, tol_feas)
    l = pt.v.size
    if not v_in:
        return NonlinearSepParams(TangentVector.zero(cone.base), -np.ones(l))
    phi = _separating_direction(cone, pt.u.vec, tol_mem)
    return NonlinearSepParams(TangentVector(cone.base, phi), np.zeros(l))


# -- grid scans -------------------------------------------------------------------------


def _row_max(direction_part: np.ndarray, param_part: np.ndarray, workers: int = 1) -> np.ndarray:
    """``out[i, j] = max_n (direction_part[i, n] + param_part[j, n])``."""
    def block(i):
        return np.max(direction_part[i][None, :] + param_part, axis=1)

    n = direction_part.shape[0]
    if workers > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(block, range(n)))  # map preserves order
    else:
        rows = [block(i) for i in range(n)]
    return np.array(rows).reshape(n, param_part.shape[0])


def _linear_table(inst: GopInstance, cloud: ImageCloud, thetas: np.ndarray, lams: np.ndarray,
                  workers: int = 1) -> np.ndarray:
    return _row_max(thetas @ cloud.u.T, lams @ cloud.v.T, workers)


def _nonlinear_table(inst: GopInstance, cloud: ImageCloud, phis: np.ndarray, gammas: np.ndarray,
                     workers: int = 1) -> np.ndarray:
    tangent = omega_tilde(phis @ cloud.u.T)
    under = np.array([omega_underline(cloud.v, g) for g in gammas]).reshape(len(gammas), len(cloud))
    return _row_max(tangent, under, workers)


def certificate_search(inst: GopInstance, y: SpherePoint, kind: str, cloud: ImageCloud,
                       grid: Optional[SearchGrid] = None, workers: int = 1) -> Optional[SeparationCertificate]:
    """First grid parameter whose separation function is ``<= tol_cert`` on the whole cloud.

    Parameters are visited direction-major; ``None`` when no grid point works.
    """
    require_feasible(inst, y)
    grid = grid or inst.search
    cone = inst.cone_at(cloud.fy)
    dirs = polar_directions(cone, grid.n_angle)
    l = inst.n_constraints
    if kind == "linear":
        params = grid.lambdas(l)
        table = _linear_table(inst, cloud, dirs, params, workers)
    elif kind == "nonlinear":
        params = grid.gammas(l)
        table = _nonlinear_table(inst, cloud, dirs, params, workers)
    else:
        raise ValueError(f"unknown separation family {kind!r}")
    hits = np.argwhere(table <= inst.tolerances.cert)
    if hits.size == 0:
        return None
    i, j = (int(k) for k in hits[0])  # argwhere is row-major: direction-major order
    d = TangentVector(cloud.fy, dirs[i])
    p = LinearSepParams(d, params[j]) if kind == "linear" else NonlinearSepParams(d, params[j])
    return SeparationCertificate(kind, p, float(table[i, j]), cloud.resolution)


# -- Lagrangians, saddle points, duality ---------------------------------------------


def lagrangian1(inst: GopInstance, y: SpherePoint, x: SpherePoint, params: LinearSepParams) -> float:
    return -omega1(image_map(inst, y, x), params)


def lagrangian2(inst: GopInstance, y: SpherePoint, x: SpherePoint, params: NonlinearSepParams) -> float:
    return -omega2(image_map(inst, y, x), params)


def _check_linear_params(inst: GopInstance, y: SpherePoint, theta: TangentVector, lam: np.ndarray):
    fy = evaluate_objective(inst, y)
    if not theta.base.isclose(fy):
        raise BaseMismatchError("theta must be a tangent vector at f(y)")
    if theta.norm <= inst.tolerances.mem or not in_polar(inst.cone_at(fy), theta, inst.tolerances.mem):
        raise PreconditionError("theta must lie in the polar cone minus the origin")
    if lam.size != inst.n_constraints or np.any(lam < 0.0):
        raise PreconditionError("lambda must be a nonnegative vector with one entry per constraint")


def is_saddle_point1(inst: GopInstance, y: SpherePoint, theta_bar: TangentVector, lam_bar, cloud: ImageCloud,
                     lam_grid: Optional[np.ndarray] = None, tol: Optional[float] = None) -> bool:
    """Generalized saddle point test for ``L1``.

    Left inequality ``L1(y; theta, lam) <= L1(y; theta, lam_bar)`` over
    ``lam_grid``; right inequality ``L1(y; theta, lam_bar) <= L1(x; theta, lam_bar)``
    over the cloud sources.
    """
    require_feasible(inst, y)
    lam_bar = np.asarray(lam_bar, dtype=float).reshape(-1)
    _check_linear_params(inst, y, theta_bar, lam_bar)
    tol = inst.tolerances.cert if tol is None else tol
    lam_grid = inst.search.lambdas(inst.n_constraints) if lam_grid is None else np.atleast_2d(lam_grid)
    at_y = lagrangian1(inst, y, y, LinearSepParams(theta_bar, lam_bar))
    left = all(lagrangian1(inst, y, y, LinearSepParams(theta_bar, lam)) <= at_y + tol for lam in lam_grid)
    if not left:
        return False
    at_x = -(cloud.u @ theta_bar.vec + cloud.v @ lam_bar)
    return bool(np.all(at_y <= at_x + tol))


def is_saddle_point2(inst: GopInstance, y: SpherePoint, phi_bar: TangentVector, gamma_bar, cloud: ImageCloud,
                     gamma_grid: Optional[np.ndarray] = None, tol: Optional[float] = None) -> bool:
    """Generalized saddle point test for ``L2``, with ``gamma_grid`` for the left inequality."""
    require_feasible(inst, y)
    fy = evaluate_objective(inst, y)
    if not phi_bar.base.isclose(fy):
        raise BaseMismatchError("phi must be a tangent vector at f(y)")
    if not in_polar(inst.cone_at(fy), phi_bar, inst.tolerances.mem):
        raise PreconditionError("phi must lie in the polar cone")
    bar = NonlinearSepParams(phi_bar, gamma_bar)
    if bar.gamma.size != inst.n_constraints:
        raise PreconditionError("gamma needs one entry per constraint")
    tol = inst.tolerances.cert if tol is None else tol
    gamma_grid = inst.search.gammas(inst.n_constraints) if gamma_grid is None else np.atleast_2d(gamma_grid)
    at_y = lagrangian2(inst, y, y, bar)
    left = all(lagrangian2(inst, y, y, NonlinearSepParams(phi_bar, g)) <= at_y + tol for g in gamma_grid)
    if not left:
        return False
    at_x = -(omega_tilde(cloud.u @ phi_bar.vec) + omega_underline(cloud.v, bar.gamma))
    return bool(np.all(at_y <= at_x + tol))


def holds_linear_condition(inst: GopInstance, cloud: ImageCloud, params: LinearSepParams,
                           tol: Optional[float] = None) -> bool:
    """``omega1(M_y(x)) <= 0`` for every cloud source ``x`` (within ``tol``)."""
    tol = inst.tolerances.cert if tol is None else tol
    return bool(dual_value(inst, cloud.y, params, cloud) <= tol)


def holds_nonlinear_condition(inst: GopInstance, cloud: ImageCloud, params: NonlinearSepParams,
                              tol: Optional[float] = None) -> bool:
    tol = inst.tolerances.cert if tol is None else tol
    vals = omega_tilde(cloud.u @ params.phi.vec) + omega_underline(cloud.v, params.gamma)
    return bool(np.max(vals) <= tol)


def dual_value(inst: GopInstance, y: SpherePoint, params: LinearSepParams, cloud: ImageCloud) -> float:
    """``max`` of ``omega1`` over the image cloud."""
    if not params.theta.base.isclose(cloud.fy):
        raise BaseMismatchError("theta must be a tangent vector at f(y)")
    if params.lam.size != cloud.v.shape[1]:
        raise DimensionMismatchError("lambda length does not match the constraints")
    return float(np.max(cloud.u @ params.theta.vec + cloud.v @ params.lam))


@dataclass(frozen=True)
class GapReport:
    omega: float
    argmin: LinearSepParams
    fixed_lambda: bool

    def as_dict(self) -> dict:
        return {"omega": self.omega, "argmin": self.argmin.as_dict(), "fixed_lambda": self.fixed_lambda}


def duality_gap(inst: GopInstance, y: SpherePoint, cloud: ImageCloud, theta_grid: Optional[np.ndarray] = None,
                lam_grid: Optional[np.ndarray] = None, fix_lambda=None, workers: int = 1) -> GapReport:
    """Image duality gap: ``min`` over the grid of the dual value.

    ``theta_grid`` rows must be unit polar vectors at ``f(y)`` (default: the
    search-grid directions). With ``fix_lambda`` the minimum runs over theta
    only, at that multiplier.
    """
    require_feasible(inst, y)
    cone = inst.cone_at(cloud.fy)
    thetas = polar_directions(cone, inst.search.n_angle) if theta_grid is None else np.atleast_2d(theta_grid)
    if not np.allclose(np.linalg.norm(thetas, axis=1), 1.0, atol=1e-12):
        raise PreconditionError("theta grid entries must have unit norm")
    l = inst.n_constraints
    if fix_lambda is not None:
        lams = np.asarray(fix_lambda, dtype=float).reshape(1, l)
    else:
        lams = inst.search.lambdas(l) if lam_grid is None else np.atleast_2d(lam_grid)
    if thetas.size == 0 or lams.size == 0:
        raise PreconditionError("parameter grids must be nonempty")
    table = _linear_table(inst, cloud, thetas, lams, workers)
    flat = int(np.argmin(table))  # first index wins on ties
    i, j = divmod(flat, table.shape[1])
    params = LinearSepParams(TangentVector(cloud.fy, thetas[i]), lams[j])
    return GapReport(float(table[i, j]), params, fix_lambda is not None)

