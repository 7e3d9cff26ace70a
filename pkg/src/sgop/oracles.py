"""Slow reference implementations used to cross-check the closed forms.

Each oracle evaluates a definition directly (numerical integration,
bisection, dense enumeration) and shares no code path with the fast
implementation it checks.
"""

from __future__ import annotations

import math

import numpy as np


def rk4_transport(base: np.ndarray, vec: np.ndarray, to: np.ndarray, steps: int = 1000) -> np.ndarray:
    """Integrate ``V' = -<V, g'> g`` along the unit-speed great circle from ``base`` to ``to``.

    This is the parallel-transport equation on the unit sphere: the covariant
    derivative ``V' - <V', g> g`` vanishes and ``<V, g> = 0`` is preserved.
    """
    p = np.asarray(base, dtype=float)
    q = np.asarray(to, dtype=float)
    w = q - (p @ q) * p
    s = np.linalg.norm(w)
    d = math.atan2(s, p @ q)
    v = np.asarray(vec, dtype=float).copy()
    if s == 0.0:
        return v
    e = w / s

    def curve(t):
        return math.cos(t) * p + math.sin(t) * e, -math.sin(t) * p + math.cos(t) * e

    def rhs(t, vv):
        g, dg = curve(t)
        return -(vv @ dg) * g

    h = d / steps
    t = 0.0
    for _ in range(steps):
        k1 = rhs(t, v)
        k2 = rhs(t + h / 2, v + h / 2 * k1)
        k3 = rhs(t + h / 2, v + h / 2 * k2)
        k4 = rhs(t + h, v + h * k3)
        v = v + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return v


def bisection_gerstewitz(v, q, lo: float = -1e6, hi: float = 1e6, iters: int = 200) -> float:
    """``min{t : v - t q >= 0}`` by bisection on the feasibility predicate.

    Feasibility is monotone in ``t`` because ``-q > 0``.
    """
    v = np.asarray(v, dtype=float)
    q = np.asarray(q, dtype=float)

    def feasible(t):
        return bool(np.all(v - t * q >= 0.0))

    if not feasible(hi) or feasible(lo):
        raise ValueError("bracket does not contain the minimum")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _ray_dist(y: np.ndarray, angles: np.ndarray) -> np.ndarray:
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    t = np.maximum(dirs @ y, 0.0)
    return np.linalg.norm(y[None, :] - t[:, None] * dirs, axis=1)


def sector_oriented_distance_2d(y2: np.ndarray, aperture: float, n: int = 4001) -> float:
    """Oriented distance to the planar sector ``[0, aperture]`` by dense ray enumeration.

    Both sets are unions of rays from the origin; the distance to each set
    is the minimum distance over ``n`` rays spanning it (endpoints included).
    """
    y2 = np.asarray(y2, dtype=float)
    inside = np.linspace(0.0, aperture, n)
    outside = np.linspace(aperture, 2.0 * math.pi, n)
    ang = math.atan2(y2[1], y2[0]) % (2.0 * math.pi)
    in_set = ang <= aperture
    d_in = 0.0 if in_set else float(np.min(_ray_dist(y2, inside)))
    d_out = float(np.min(_ray_dist(y2, outside))) if in_set else 0.0
    return d_in - d_out


def orthant_oriented_distance(y) -> float:
    """Oriented distance to ``R_+^l`` from projections onto the set and onto each excluded face."""
    y = np.asarray(y, dtype=float)
    d_in = float(np.linalg.norm(y - np.clip(y, 0.0, None)))
    if d_in > 0.0:
        return d_in
    # nearest point of the complement: push one coordinate to 0 (the closed complement's boundary)
    dists = []
    for i in range(y.size):
        z = y.copy()
        z[i] = min(z[i], 0.0)
        dists.append(float(np.linalg.norm(y - z)))
    return -min(dists)


def flat_efficient(points2: np.ndarray, values2: np.ndarray, feasible: np.ndarray, y_index: int,
                   gen_a2: np.ndarray, gen_b2: np.ndarray, tol: float) -> bool:
    """Efficiency in the plane: no feasible ``x`` with ``F(x) - F(y)`` in the cone minus the origin.

    Membership is decided by solving the 2x2 system for the generator
    coefficients with ``numpy.linalg.solve``.
    """
    basis = np.column_stack([gen_a2, gen_b2])
    fy = values2[y_index]
    for i in range(points2.shape[0]):
        if not feasible[i]:
            continue
        w = values2[i] - fy
        if np.linalg.norm(w) <= tol:
            continue
        coef = np.linalg.solve(basis, w)
        if np.all(coef >= -tol):
            return False
    return True
