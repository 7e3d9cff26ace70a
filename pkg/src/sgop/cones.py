"""Sector cones in tangent planes and the cone order they induce.

In a 2-dimensional tangent plane every pointed closed convex cone with
nonempty interior is a sector spanned by two unit rays. Working in the
oriented frame ``(a, n x a)`` with ``n`` the base point, the sector is the
angular interval ``[0, aperture]``, which makes membership, polar cones and
signed distances closed-form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BaseMismatchError, DegenerateError
from .sphere import (
    SpherePoint,
    TangentVector,
    TAU_ANTIPODAL,
    _check_same_base,
    log_map,
    parallel_transport,
    tangent_frame,
)

TAU_MEM = 1e-9
MIN_APERTURE = 1e-9


@dataclass(frozen=True, eq=False)
class SectorCone:
    """``{alpha * gen_a + beta * gen_b : alpha, beta >= 0}`` in T_base.

    Generators are normalized on construction. The aperture must lie strictly
    inside ``(0, pi)``; anything else raises :class:`DegenerateError`.
    """

    base: SpherePoint
    gen_a: TangentVector
    gen_b: TangentVector

    def __post_init__(self):
        _check_same_base(self.base, self.gen_a.base)
        _check_same_base(self.base, self.gen_b.base)
        if self.gen_a.norm == 0.0 or self.gen_b.norm == 0.0:
            raise DegenerateError("cone generators must be nonzero")
        a = TangentVector.project(self.base, self.gen_a.vec).normalized()
        b = TangentVector.project(self.base, self.gen_b.vec).normalized()
        object.__setattr__(self, "gen_a", a)
        object.__setattr__(self, "gen_b", b)
        ap = self.aperture
        if not (MIN_APERTURE < ap < math.pi - MIN_APERTURE):
            raise DegenerateError(f"aperture {ap!r} is not in (0, pi)")

    @classmethod
    def from_vectors(cls, base: SpherePoint, a, b) -> "SectorCone":
        """Build from two ambient 3-vectors, projecting them onto T_base."""
        return cls(base, TangentVector.project(base, a), TangentVector.project(base, b))

    @classmethod
    def from_angles(cls, base: SpherePoint, start: float, aperture: float, frame=None) -> "SectorCone":
        e1, e2 = frame if frame is not None else tangent_frame(base)
        a = math.cos(start) * e1 + math.sin(start) * e2
        b = math.cos(start + aperture) * e1 + math.sin(start + aperture) * e2
        return cls.from_vectors(base, a, b)

    @property
    def aperture(self) -> float:
        a, b = self.gen_a.vec, self.gen_b.vec
        return math.atan2(float(np.linalg.norm(np.cross(a, b))), float(a @ b))

    @property
    def frame(self) -> tuple[np.ndarray, np.ndarray]:
        """Orthonormal ``(e1, e2)`` with ``e1 = gen_a`` and ``gen_b`` in the upper half."""
        e1 = self.gen_a.vec
        e2 = np.cross(self.base.coords, e1)
        if float(e2 @ self.gen_b.vec) < 0.0:
            e2 = -e2
        return e1, e2

    def direction(self, angle: float) -> TangentVector:
        """Unit tangent vector at ``angle`` measured from gen_a toward gen_b."""
        e1, e2 = self.frame
        return TangentVector(self.base, math.cos(angle) * e1 + math.sin(angle) * e2)

    @property
    def bisector(self) -> TangentVector:
        return self.direction(0.5 * self.aperture)

    def coefficients(self, vecs: np.ndarray) -> np.ndarray:
        """Coordinates (alpha, beta) of each row of ``vecs`` in the generator basis."""
        vecs = np.atleast_2d(vecs)
        a, b = self.gen_a.vec, self.gen_b.vec
        c = float(a @ b)
        va, vb = vecs @ a, vecs @ b
        det = 1.0 - c * c
        return np.column_stack([(va - c * vb) / det, (vb - c * va) / det])

    def angles(self, vecs: np.ndarray) -> np.ndarray:
        """Angle in ``(-pi, pi]`` of each row, measured from gen_a toward gen_b."""
        e1, e2 = self.frame
        vecs = np.atleast_2d(vecs)
        return np.arctan2(vecs @ e2, vecs @ e1)

    def __repr__(self):
        return f"SectorCone(base={self.base!r}, aperture={self.aperture:.6g})"


def _check_base(cone: SectorCone, v: TangentVector):
    if not cone.base.isclose(v.base):
        raise BaseMismatchError(f"vector based at {v.base!r}, cone at {cone.base!r}")


def contains_many(cone: SectorCone, vecs: np.ndarray, tol: float = TAU_MEM) -> np.ndarray:
    return np.all(cone.coefficients(vecs) >= -tol, axis=1)


def contains_strict_many(cone: SectorCone, vecs: np.ndarray, tol: float = TAU_MEM) -> np.ndarray:
    vecs = np.atleast_2d(vecs)
    return contains_many(cone, vecs, tol) & (np.linalg.norm(vecs, axis=1) > tol)


def cone_contains(cone: SectorCone, v: TangentVector, tol: float = TAU_MEM) -> bool:
    """Closed-cone membership: both generator coefficients are ``>= -tol``."""
    _check_base(cone, v)
    return bool(contains_many(cone, v.vec, tol)[0])


def cone_contains_strict(cone: SectorCone, v: TangentVector, tol: float = TAU_MEM) -> bool:
    """Membership in ``cone \\ {0}``: as :func:`cone_contains`, and ``|v| > tol``."""
    _check_base(cone, v)
    return bool(contains_strict_many(cone, v.vec, tol)[0])


def polar_cone(cone: SectorCone) -> SectorCone:
    """The polar (dual) cone ``{a : <a, b> >= 0 for all b in cone}``.

    For the sector ``[0, ap]`` this is ``[ap - pi/2, pi/2]``: same bisector,
    complementary aperture ``pi - ap``.
    """
    ap = cone.aperture
    if ap >= math.pi - MIN_APERTURE:
        raise DegenerateError("a half-plane cone has a polar with empty interior")
    return SectorCone(cone.base, cone.direction(ap - 0.5 * math.pi), cone.direction(0.5 * math.pi))


def transport_cone(cone: SectorCone, to: SpherePoint, tau_antipodal: float = TAU_ANTIPODAL) -> SectorCone:
    """Parallel-transport both generators of ``cone`` to the tangent plane at ``to``."""
    return SectorCone(
        to,
        parallel_transport(cone.gen_a, to, tau_antipodal),
        parallel_transport(cone.gen_b, to, tau_antipodal),
    )


def reflect_cone(cone: SectorCone) -> SectorCone:
    """The opposite cone ``-cone``."""
    return SectorCone(cone.base, -cone.gen_a, -cone.gen_b)


def cone_order_lt(y: SpherePoint, x: SpherePoint, cone_at_x: SectorCone, tol: float = TAU_MEM) -> bool:
    """``y <_C x``: the geodesic direction from x to y lies in ``C_x \\ {0}``."""
    if not cone_at_x.base.isclose(x):
        raise BaseMismatchError("cone must be based at x")
    return cone_contains_strict(cone_at_x, log_map(x, y), tol)


def tilde_cone_contains(cone: SectorCone, m: SpherePoint, tol: float = TAU_MEM) -> bool:
    """Membership of ``m`` in ``exp_base(cone)``, restricted to the injectivity region."""
    return cone_contains(cone, log_map(cone.base, m), tol)


def pick_interior_polar(cone: SectorCone) -> TangentVector:
    """Unit bisector of the polar cone, a canonical point of its interior."""
    return polar_cone(cone).bisector


def cones_equal(c1: SectorCone, c2: SectorCone, tol: float = 1e-9) -> bool:
    """Set equality of two sectors (generator order ignored)."""
    if not c1.base.isclose(c2.base, tol):
        return False
    g1 = (c1.gen_a.vec, c1.gen_b.vec)
    g2 = (c2.gen_a.vec, c2.gen_b.vec)

    def close(u, v):
        return float(np.max(np.abs(u - v))) <= tol

    return (close(g1[0], g2[0]) and close(g1[1], g2[1])) or (close(g1[0], g2[1]) and close(g1[1], g2[0]))
