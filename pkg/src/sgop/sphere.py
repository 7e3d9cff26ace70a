"""Closed-form geometry of the unit 2-sphere.

Points are unit 3-vectors; tangent vectors are 3-vectors orthogonal to their
base point. All maps here are exact trigonometric formulas, evaluated with
``atan2`` where an ``arccos`` would lose precision near 0 and pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AntipodalError, BaseMismatchError, PreconditionError, RangeError

TAU_UNIT = 1e-12
TAU_ANTIPODAL = 1e-9
MAX_PATCH_RADIUS = math.pi / 2 - 1e-6


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """A point of the unit sphere in R^3.

    The constructor renormalizes its input and rejects near-zero vectors.
    """

    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(3)
        n = float(np.linalg.norm(c))
        if not np.isfinite(n) or n < 1e-6:
            raise ValueError(f"cannot normalize {c!r} onto the sphere")
        object.__setattr__(self, "coords", _readonly(c / n))

    def __eq__(self, other):
        if not isinstance(other, SpherePoint):
            return NotImplemented
        return bool(np.array_equal(self.coords, other.coords))

    def __hash__(self):
        return hash(self.coords.tobytes())

    def __neg__(self) -> "SpherePoint":
        return SpherePoint(-self.coords)

    def isclose(self, other: "SpherePoint", tol: float = 1e-9) -> bool:
        return bool(np.max(np.abs(self.coords - other.coords)) <= tol)

    def __repr__(self):
        x, y, z = self.coords
        return f"SpherePoint({x:.6g}, {y:.6g}, {z:.6g})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A vector ``vec`` in the tangent plane at ``base``.

    ``vec`` must be orthogonal to ``base`` up to ``TAU_UNIT`` (relative to
    ``max(1, |vec|)``); the residual normal component is then removed.
    Use :meth:`project` for arbitrary ambient input.
    """

    base: SpherePoint
    vec: np.ndarray

    def __post_init__(self):
        v = np.array(self.vec, dtype=float).reshape(3)
        b = self.base.coords
        off = float(b @ v)
        if abs(off) > TAU_UNIT * max(1.0, float(np.linalg.norm(v))):
            raise ValueError(f"vector is not tangent at base (<base, vec> = {off:.3e})")
        object.__setattr__(self, "vec", _readonly(v - off * b))

    @classmethod
    def project(cls, base: SpherePoint, vec) -> "TangentVector":
        """Orthogonal projection of an ambient vector onto T_base."""
        v = np.asarray(vec, dtype=float).reshape(3)
        return cls(base, v - (base.coords @ v) * base.coords)

    @classmethod
    def zero(cls, base: SpherePoint) -> "TangentVector":
        return cls(base, np.zeros(3))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def __add__(self, other: "TangentVector") -> "TangentVector":
        _check_same_base(self.base, other.base)
        return TangentVector(self.base, self.vec + other.vec)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        _check_same_base(self.base, other.base)
        return TangentVector(self.base, self.vec - other.vec)

    def __mul__(self, s: float) -> "TangentVector":
        return TangentVector(self.base, float(s) * self.vec)

    __rmul__ = __mul__

    def __neg__(self) -> "TangentVector":
        return TangentVector(self.base, -self.vec)

    def dot(self, other: "TangentVector") -> float:
        _check_same_base(self.base, other.base)
        return float(self.vec @ other.vec)

    def normalized(self) -> "TangentVector":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero tangent vector")
        return TangentVector(self.base, self.vec / n)

    def __repr__(self):
        return f"TangentVector(base={self.base!r}, vec={np.array2string(self.vec, precision=6)})"


def _check_same_base(a: SpherePoint, b: SpherePoint, tol: float = 1e-9):
    if not a.isclose(b, tol):
        raise BaseMismatchError(f"base points differ: {a!r} vs {b!r}")


@dataclass(frozen=True)
class Patch:
    """Closed geodesic ball ``{x : d(center, x) <= radius}`` with radius < pi/2."""

    center: SpherePoint
    radius: float

    def __post_init__(self):
        r = float(self.radius)
        if not (0.0 < r <= MAX_PATCH_RADIUS):
            raise RangeError(f"patch radius must lie in (0, pi/2 - 1e-6], got {r!r}")
        object.__setattr__(self, "radius", r)

    def contains(self, x: SpherePoint, tol: float = 1e-9) -> bool:
        return distance(self.center, x) <= self.radius + tol


# -- scalar kernels -----------------------------------------------------------


def _angle(a: np.ndarray, b: np.ndarray) -> float:
    # atan2 form of arccos<a,b>; accurate at both ends of [0, pi]
    return math.atan2(float(np.linalg.norm(np.cross(a, b))), float(a @ b))


def distance(p: SpherePoint, q: SpherePoint) -> float:
    """Intrinsic (great-circle) distance in radians, in ``[0, pi]``."""
    return _angle(p.coords, q.coords)


def exp_map(v: TangentVector) -> SpherePoint:
    """Exponential map ``exp_base(v)``; requires ``|v| < pi``."""
    n = v.norm
    if n >= math.pi:
        raise RangeError(f"|v| = {n!r} is outside the injectivity range [0, pi)")
    if n == 0.0:
        return v.base
    return SpherePoint(math.cos(n) * v.base.coords + math.sin(n) * (v.vec / n))


def log_map(p: SpherePoint, q: SpherePoint, tau_antipodal: float = TAU_ANTIPODAL) -> TangentVector:
    """Inverse exponential map at ``p``: the initial velocity of the geodesic to ``q``.

    Raises:
        AntipodalError: if ``d(p, q) >= pi - tau_antipodal``.
    """
    if np.array_equal(p.coords, q.coords):
        return TangentVector.zero(p)
    w = q.coords - (p.coords @ q.coords) * p.coords
    s = float(np.linalg.norm(w))
    theta = math.atan2(s, float(p.coords @ q.coords))
    if theta >= math.pi - tau_antipodal:
        raise AntipodalError(f"points are antipodal within {tau_antipodal}: {p!r}, {q!r}")
    if s == 0.0:
        return TangentVector.zero(p)
    return TangentVector(p, (theta / s) * w)


def geodesic_point(x: SpherePoint, y: SpherePoint, t: float) -> SpherePoint:
    """Point at arc length ``t`` on the minimal unit-speed geodesic from x to y."""
    d = distance(x, y)
    if d >= math.pi - TAU_ANTIPODAL:
        raise AntipodalError(f"no unique minimal geodesic between {x!r} and {y!r}")
    if not (-1e-12 <= t <= d + 1e-12):
        raise RangeError(f"t = {t!r} outside [0, {d!r}]")
    t = min(max(t, 0.0), d)
    if d == 0.0:
        return x
    c = float(x.coords @ y.coords)
    s = math.sin(d)
    return SpherePoint((math.cos(t) - c * math.sin(t) / s) * x.coords + (math.sin(t) / s) * y.coords)


def parallel_transport(v: TangentVector, to: SpherePoint, tau_antipodal: float = TAU_ANTIPODAL) -> TangentVector:
    """Parallel transport of ``v`` along the minimal geodesic from ``v.base`` to ``to``.

    The component of ``v`` normal to the geodesic plane is fixed; the
    component along the unit direction ``e`` rotates into
    ``cos(d) e - sin(d) p``.
    """
    log = log_map(v.base, to, tau_antipodal)
    d = log.norm
    if d == 0.0:
        return TangentVector(to, v.vec)
    e = log.vec / d
    p = v.base.coords
    along = float(v.vec @ e)
    out = v.vec - along * e + along * (math.cos(d) * e - math.sin(d) * p)
    return TangentVector.project(to, out)


def tangent_frame(p: SpherePoint) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal basis (e1, e2) of T_p with e1 x e2 = p."""
    c = p.coords
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(c)))] = 1.0
    e1 = np.cross(c, axis)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(c, e1)
    return e1, e2


def sample_patch(patch: Patch, radial_steps: int, angular_steps: int) -> list[SpherePoint]:
    """Deterministic polar grid over the patch: the center, then ring by ring.

    Ring ``i`` (1-based) sits at geodesic radius ``radius * i / radial_steps``
    and carries ``angular_steps`` points at angles ``2 pi j / angular_steps``.
    """
    return [SpherePoint(row) for row in sample_patch_array(patch, radial_steps, angular_steps)]


def sample_patch_array(patch: Patch, radial_steps: int, angular_steps: int) -> np.ndarray:
    if radial_steps < 1 or angular_steps < 3:
        raise PreconditionError("need radial_steps >= 1 and angular_steps >= 3")
    c = patch.center.coords
    e1, e2 = tangent_frame(patch.center)
    rows = [c.copy()]
    for i in range(1, radial_steps + 1):
        r = patch.radius * i / radial_steps
        for j in range(angular_steps):
            a = 2.0 * math.pi * j / angular_steps
            direction = math.cos(a) * e1 + math.sin(a) * e2
            pt = math.cos(r) * c + math.sin(r) * direction
            rows.append(pt / np.linalg.norm(pt))
    return np.array(rows)


# -- batched kernels (rows are points / vectors) --------------------------------


def log_map_many(p: np.ndarray, qs: np.ndarray, tau_antipodal: float = TAU_ANTIPODAL) -> np.ndarray:
    """Row-wise ``log_p(q)`` for an (N, 3) array of sphere points."""
    qs = np.atleast_2d(qs)
    c = qs @ p
    w = qs - c[:, None] * p[None, :]
    s = np.linalg.norm(w, axis=1)
    theta = np.arctan2(s, c)
    if np.any(theta >= math.pi - tau_antipodal):
        raise AntipodalError("batch contains a point antipodal to the base")
    scale = np.divide(theta, s, out=np.zeros_like(s), where=s > 0.0)
    scale[np.all(qs == p[None, :], axis=1)] = 0.0  # exact zero at the base point
    return scale[:, None] * w


def exp_map_many(p: np.ndarray, vs: np.ndarray) -> np.ndarray:
    vs = np.atleast_2d(vs)
    n = np.linalg.norm(vs, axis=1)
    unit = np.divide(vs, n[:, None], out=np.zeros_like(vs), where=n[:, None] > 0.0)
    out = np.cos(n)[:, None] * p[None, :] + np.sin(n)[:, None] * unit
    return out / np.linalg.norm(out, axis=1)[:, None]


def distance_many(p: np.ndarray, qs: np.ndarray) -> np.ndarray:
    qs = np.atleast_2d(qs)
    return np.arctan2(np.linalg.norm(np.cross(qs, p[None, :]), axis=1), qs @ p)
