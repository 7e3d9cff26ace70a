"""Seeded random instances for property batteries."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .errors import InstanceError
from .instance_io import build, normalize
from .problem import GopInstance
from .sphere import SpherePoint, tangent_frame


def random_unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_point_in_cap(rng: np.random.Generator, center: np.ndarray, radius: float) -> np.ndarray:
    e1, e2 = tangent_frame(SpherePoint(center))
    r = radius * math.sqrt(rng.uniform())
    a = rng.uniform(0.0, 2.0 * math.pi)
    p = math.cos(r) * center + math.sin(r) * (math.cos(a) * e1 + math.sin(a) * e2)
    return p / np.linalg.norm(p)


def random_config(rng: np.random.Generator, family: Optional[str] = None, radius: Optional[float] = None,
                  n_constraints: Optional[int] = None, resolution=(20, 36), ref_at_center: bool = False) -> dict:
    """A raw instance document with randomized geometry.

    Patch radius in [0.2, 1.0], cone aperture in [0.3, 2.5], rotation angles
    up to 0.5, one or two constraints.
    """
    center = random_unit(rng)
    radius = float(rng.uniform(0.2, 1.0)) if radius is None else radius
    ref = center if ref_at_center else random_point_in_cap(rng, center, 0.5 * radius)
    e1, e2 = tangent_frame(SpherePoint(ref))
    start = rng.uniform(0.0, 2.0 * math.pi)
    aperture = rng.uniform(0.3, 2.5)
    gen_a = math.cos(start) * e1 + math.sin(start) * e2
    gen_b = math.cos(start + aperture) * e1 + math.sin(start + aperture) * e2

    family = family or str(rng.choice(["identity", "rotation", "pull"]))
    if family == "identity":
        objective = {"family": "identity", "params": {}}
    elif family == "rotation":
        objective = {"family": "rotation",
                     "params": {"axis": random_unit(rng).tolist(), "angle": float(rng.uniform(-0.5, 0.5))}}
    else:
        anchor = random_point_in_cap(rng, center, radius)
        objective = {"family": "pull", "params": {"anchor": anchor.tolist(), "t": float(rng.uniform(0.0, 1.0))}}

    count = int(rng.integers(1, 3)) if n_constraints is None else n_constraints
    constraints = []
    for _ in range(count):
        if rng.uniform() < 0.6:
            constraints.append({"kind": "ball", "center": random_point_in_cap(rng, center, 0.7 * radius).tolist(),
                                "r": float(rng.uniform(0.25, 0.8) * radius)})
        else:
            n = random_unit(rng)
            # offset chosen so the half-space keeps part of the patch
            shift = rng.uniform(-0.6, 0.3) * math.sin(radius)
            constraints.append({"kind": "affine", "n": n.tolist(), "b": float(n @ center + shift)})
    return {
        "schema": 1,
        "name": "random",
        "patch": {"center": center.tolist(), "radius": radius},
        "ref_point": ref.tolist(),
        "cone": {"base_tangent_a": gen_a.tolist(), "base_tangent_b": gen_b.tolist()},
        "objective": objective,
        "constraints": constraints,
        "resolution": {"radial": resolution[0], "angular": resolution[1]},
    }


def _feasible_count(inst: GopInstance) -> int:
    return int(np.sum(np.all(inst.constraints.evaluate(inst.samples()) >= -inst.tolerances.feas, axis=1)))


def random_instance(rng: np.random.Generator, attempts: int = 50, min_feasible: int = 1, **kwargs) -> GopInstance:
    """First random document that validates and has ``min_feasible`` feasible grid samples."""
    last = None
    for _ in range(attempts):
        try:
            inst = build(normalize(random_config(rng, **kwargs)))
        except InstanceError as exc:
            last = exc
            continue
        if _feasible_count(inst) >= min_feasible:
            return inst
        last = f"fewer than {min_feasible} feasible samples"
    raise RuntimeError(f"could not generate a valid instance: {last}")


def random_feasible_points(rng: np.random.Generator, inst: GopInstance, k: int) -> list[SpherePoint]:
    """Up to ``k`` distinct feasible grid samples, drawn without replacement."""
    xs = inst.samples()
    ok = np.flatnonzero(np.all(inst.constraints.evaluate(xs) >= -inst.tolerances.feas, axis=1))
    pick = rng.choice(ok, size=min(k, ok.size), replace=False)
    return [SpherePoint(xs[i]) for i in sorted(pick)]
