"""Plain configuration records shared by the analysis modules."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    mem: float = 1e-9
    feas: float = 1e-9
    antipodal: float = 1e-9
    cert: float = 1e-9

    def as_dict(self) -> dict:
        return {"mem": self.mem, "feas": self.feas, "antipodal": self.antipodal, "cert": self.cert}


@dataclass(frozen=True)
class Resolution:
    radial: int = 20
    angular: int = 36

    def scaled(self, factor: int) -> "Resolution":
        return Resolution(self.radial * factor, self.angular * factor)

    def as_dict(self) -> dict:
        return {"radial": self.radial, "angular": self.angular}


@dataclass(frozen=True)
class SearchGrid:
    """Parameter grids for separator and certificate search.

    Directions (theta / phi) are ``n_angle`` unit vectors at the midpoints of
    ``n_angle`` equal sub-arcs of the polar sector, so they all lie in its
    interior. Multipliers are products of ``lambda_levels`` over the
    constraints, times each of ``lambda_scales``; Gerstewitz directions are
    products of ``gamma_levels`` plus the zero vector.
    """

    n_angle: int = 64
    lambda_levels: tuple = (0.0, 0.25, 0.5, 1.0)
    lambda_scales: tuple = (1.0, 10.0)
    gamma_levels: tuple = (-0.25, -1.0, -4.0)

    def __post_init__(self):
        if self.n_angle < 1:
            raise ValueError("n_angle must be >= 1")
        if any(g >= 0.0 for g in self.gamma_levels):
            raise ValueError("gamma levels must be negative")
        if any(lv < 0.0 for lv in self.lambda_levels) or any(s <= 0.0 for s in self.lambda_scales):
            raise ValueError("lambda levels must be >= 0 and scales > 0")

    def lambdas(self, l: int) -> np.ndarray:
        seen, rows = set(), []
        for s in self.lambda_scales:
            for combo in product(self.lambda_levels, repeat=l):
                row = tuple(float(s) * float(c) for c in combo)
                if row not in seen:
                    seen.add(row)
                    rows.append(row)
        return np.array(rows, dtype=float).reshape(-1, l)

    def gammas(self, l: int) -> np.ndarray:
        rows = [tuple(float(c) for c in combo) for combo in product(self.gamma_levels, repeat=l)]
        rows.append((0.0,) * l)
        return np.array(rows, dtype=float).reshape(-1, l)

    def as_dict(self) -> dict:
        return {
            "n_angle": self.n_angle,
            "lambda_levels": list(self.lambda_levels),
            "lambda_scales": list(self.lambda_scales),
            "gamma_levels": list(self.gamma_levels),
        }


@dataclass(frozen=True)
class ScalarizationSettings:
    """``p`` is ``None`` for the automatic interior-polar choice, else an ambient 3-vector at the reference point."""

    p: tuple | None = None
    y0: object = "ref"
    tol: float = 1e-9
    max_rounds: int = 10

    def as_dict(self) -> dict:
        return {
            "p": "auto" if self.p is None else list(self.p),
            "y0": self.y0 if isinstance(self.y0, (str, dict)) else list(self.y0),
            "tol": self.tol,
            "max_rounds": self.max_rounds,
        }

