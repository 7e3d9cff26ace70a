"""Instance documents: JSON parsing, validation, normalization and digests.

A document looks like::

    {
      "schema": 1,
      "name": "ball-edge",
      "patch": {"center": [0, 0, 1], "radius": 0.6},
      "ref_point": [0, 0, 1],
      "cone": {"base_tangent_a": [1, 0, 0], "base_tangent_b": [0, 1, 0]},
      "objective": {"family": "rotation", "params": {"axis": [0, 0, 1], "angle": 0.2}},
      "constraints": [{"kind": "ball", "center": [0.1, 0, 0.99], "r": 0.3}],
      "tolerances": {"mem": 1e-9, "feas": 1e-9, "antipodal": 1e-9, "cert": 1e-9},
      "resolution": {"radial": 20, "angular": 36},
      "search": {"n_angle": 64, "lambda_levels": [0, 0.25, 0.5, 1],
                 "lambda_scales": [1, 10], "gamma_levels": [-0.25, -1, -4]},
      "scalarization": {"p": "auto", "y0": "ref", "tol": 1e-9, "max_rounds": 10},
      "y": "ref"
    }

Only ``patch``, ``cone``, ``objective`` and ``constraints`` are required.
Angles are radians, vectors are three numbers. ``ref_point`` defaults to the
patch center; the cone generators must be tangent there. Points (``y``,
``scalarization.y0``) are ``"ref"``, ``"center"``, a 3-vector, or
``{"grid": [ring, spoke]}`` addressing a sample of the default grid.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .cones import SectorCone
from .config import Resolution, ScalarizationSettings, SearchGrid, Tolerances
from .errors import DegenerateError, InstanceError, SgopError
from .problem import (
    AffineConstraint,
    BallConstraint,
    ConstraintSpec,
    GopInstance,
    ObjectiveSpec,
    grid_point,
)
from .sphere import Patch, SpherePoint, TangentVector

SCHEMA_VERSION = 1
TANGENT_TOL = 1e-9

_TOP_KEYS = {"schema", "name", "patch", "ref_point", "cone", "objective", "constraints", "tolerances",
             "resolution", "search", "scalarization", "y"}


def _num(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceError(field, f"expected a number, got {value!r}")
    x = float(value)
    if not math.isfinite(x):
        raise InstanceError(field, "must be finite")
    return x


def _int(value, field: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceError(field, f"expected an integer, got {value!r}")
    if value < minimum:
        raise InstanceError(field, f"must be >= {minimum}")
    return value


def _vec3(value, field: str) -> list[float]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise InstanceError(field, "expected a list of 3 numbers")
    return [_num(c, f"{field}[{i}]") for i, c in enumerate(value)]


def _section(doc: dict, key: str, required: bool = True) -> dict:
    if key not in doc:
        if required:
            raise InstanceError(key, "missing required section")
        return {}
    if not isinstance(doc[key], dict):
        raise InstanceError(key, "expected an object")
    return doc[key]


def _unknown(section: dict, allowed: set, prefix: str):
    for k in section:
        if k not in allowed:
            raise InstanceError(f"{prefix}{k}", "unknown field")


def _point_spec(value, field: str):
    """Normalized form of a point reference."""
    if isinstance(value, str):
        if value not in ("ref", "center"):
            raise InstanceError(field, f"unknown point token {value!r}")
        return value
    if isinstance(value, dict):
        _unknown(value, {"grid"}, f"{field}.")
        g = value.get("grid")
        if not isinstance(g, (list, tuple)) or len(g) != 2:
            raise InstanceError(f"{field}.grid", "expected [ring, spoke]")
        return {"grid": [_int(g[0], f"{field}.grid[0]", 0), _int(g[1], f"{field}.grid[1]", 0)]}
    return _vec3(value, field)


def normalize(doc: Any) -> dict:
    """Validate a raw document and return it with every default filled in."""
    if not isinstance(doc, dict):
        raise InstanceError("<root>", "expected a JSON object")
    _unknown(doc, _TOP_KEYS, "")
    schema = doc.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise InstanceError("schema", f"unsupported schema version {schema!r}")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise InstanceError("name", "expected a string")

    patch = _section(doc, "patch")
    _unknown(patch, {"center", "radius"}, "patch.")
    if "center" not in patch or "radius" not in patch:
        raise InstanceError("patch", "needs center and radius")
    out: dict = {"schema": SCHEMA_VERSION, "name": name}
    out["patch"] = {"center": _vec3(patch["center"], "patch.center"), "radius": _num(patch["radius"], "patch.radius")}
    out["ref_point"] = _vec3(doc["ref_point"], "ref_point") if "ref_point" in doc else list(out["patch"]["center"])

    cone = _section(doc, "cone")
    _unknown(cone, {"base_tangent_a", "base_tangent_b"}, "cone.")
    for k in ("base_tangent_a", "base_tangent_b"):
        if k not in cone:
            raise InstanceError(f"cone.{k}", "missing generator")
    out["cone"] = {k: _vec3(cone[k], f"cone.{k}") for k in ("base_tangent_a", "base_tangent_b")}

    obj = _section(doc, "objective")
    _unknown(obj, {"family", "params"}, "objective.")
    family = obj.get("family")
    params = obj.get("params", {})
    if not isinstance(params, dict):
        raise InstanceError("objective.params", "expected an object")
    if family == "identity":
        _unknown(params, set(), "objective.params.")
        nparams: dict = {}
    elif family == "rotation":
        _unknown(params, {"axis", "angle"}, "objective.params.")
        if "axis" not in params or "angle" not in params:
            raise InstanceError("objective.params", "rotation needs axis and angle")
        nparams = {"axis": _vec3(params["axis"], "objective.params.axis"),
                   "angle": _num(params["angle"], "objective.params.angle")}
    elif family == "pull":
        _unknown(params, {"anchor", "t"}, "objective.params.")
        if "anchor" not in params or "t" not in params:
            raise InstanceError("objective.params", "pull needs anchor and t")
        nparams = {"anchor": _vec3(params["anchor"], "objective.params.anchor"),
                   "t": _num(params["t"], "objective.params.t")}
    else:
        raise InstanceError("objective.family", f"unknown family {family!r}")
    out["objective"] = {"family": family, "params": nparams}

    cons = doc.get("constraints")
    if not isinstance(cons, list) or not cons:
        raise InstanceError("constraints", "expected a nonempty list")
    ncons = []
    for i, c in enumerate(cons):
        f = f"constraints[{i}]"
        if not isinstance(c, dict):
            raise InstanceError(f, "expected an object")
        kind = c.get("kind")
        if kind == "ball":
            _unknown(c, {"kind", "center", "r"}, f"{f}.")
            if "center" not in c or "r" not in c:
                raise InstanceError(f, "ball needs center and r")
            ncons.append({"kind": "ball", "center": _vec3(c["center"], f"{f}.center"), "r": _num(c["r"], f"{f}.r")})
        elif kind == "affine":
            _unknown(c, {"kind", "n", "b"}, f"{f}.")
            if "n" not in c or "b" not in c:
                raise InstanceError(f, "affine needs n and b")
            ncons.append({"kind": "affine", "n": _vec3(c["n"], f"{f}.n"), "b": _num(c["b"], f"{f}.b")})
        else:
            raise InstanceError(f"{f}.kind", f"unknown constraint kind {kind!r}")
    out["constraints"] = ncons

    tol = _section(doc, "tolerances", required=False)
    defaults = Tolerances().as_dict()
    _unknown(tol, set(defaults), "tolerances.")
    out["tolerances"] = {k: _num(tol.get(k, v), f"tolerances.{k}") for k, v in defaults.items()}
    for k, v in out["tolerances"].items():
        if v < 0.0:
            raise InstanceError(f"tolerances.{k}", "must be >= 0")

    res = _section(doc, "resolution", required=False)
    _unknown(res, {"radial", "angular"}, "resolution.")
    out["resolution"] = {"radial": _int(res.get("radial", Resolution.radial), "resolution.radial", 1),
                         "angular": _int(res.get("angular", Resolution.angular), "resolution.angular", 3)}

    search = _section(doc, "search", required=False)
    sd = SearchGrid().as_dict()
    _unknown(search, set(sd), "search.")
    ns = {"n_angle": _int(search.get("n_angle", sd["n_angle"]), "search.n_angle", 1)}
    for k in ("lambda_levels", "lambda_scales", "gamma_levels"):
        vals = search.get(k, sd[k])
        if not isinstance(vals, list) or not vals:
            raise InstanceError(f"search.{k}", "expected a nonempty list of numbers")
        ns[k] = [_num(v, f"search.{k}[{i}]") for i, v in enumerate(vals)]
    if any(g >= 0.0 for g in ns["gamma_levels"]):
        raise InstanceError("search.gamma_levels", "levels must be negative")
    if any(v < 0.0 for v in ns["lambda_levels"]):
        raise InstanceError("search.lambda_levels", "levels must be >= 0")
    if any(v <= 0.0 for v in ns["lambda_scales"]):
        raise InstanceError("search.lambda_scales", "scales must be > 0")
    out["search"] = ns

    sc = _section(doc, "scalarization", required=False)
    _unknown(sc, {"p", "y0", "tol", "max_rounds"}, "scalarization.")
    p = sc.get("p", "auto")
    out["scalarization"] = {
        "p": "auto" if p == "auto" else _vec3(p, "scalarization.p"),
        "y0": _point_spec(sc.get("y0", "ref"), "scalarization.y0"),
        "tol": _num(sc.get("tol", 1e-9), "scalarization.tol"),
        "max_rounds": _int(sc.get("max_rounds", 10), "scalarization.max_rounds", 1),
    }
    out["y"] = _point_spec(doc.get("y", "ref"), "y")
    return out


def build(config: dict) -> GopInstance:
    """Instance from a normalized document; raises :class:`InstanceError` on semantic problems."""
    def guard(field, fn, *args):
        try:
            return fn(*args)
        except InstanceError:
            raise
        except (SgopError, ValueError) as exc:
            raise InstanceError(field, str(exc)) from exc

    center = guard("patch.center", SpherePoint, config["patch"]["center"])
    patch = guard("patch.radius", Patch, center, config["patch"]["radius"])
    ref = guard("ref_point", SpherePoint, config["ref_point"])
    if not patch.contains(ref):
        raise InstanceError("ref_point", "lies outside the patch")
    gens = []
    for k in ("base_tangent_a", "base_tangent_b"):
        raw = np.asarray(config["cone"][k])
        n = float(np.linalg.norm(raw))
        if n == 0.0:
            raise InstanceError(f"cone.{k}", "generator must be nonzero")
        if abs(float(ref.coords @ raw)) > TANGENT_TOL * max(1.0, n):
            raise InstanceError(f"cone.{k}", "generator is not tangent at the reference point")
        gens.append(TangentVector.project(ref, raw))
    try:
        cone = SectorCone(ref, gens[0], gens[1])
    except DegenerateError as exc:
        raise InstanceError("cone", str(exc)) from exc

    o = config["objective"]
    prm = o["params"]
    if o["family"] == "rotation":
        if np.linalg.norm(prm["axis"]) == 0.0:
            raise InstanceError("objective.params.axis", "must be nonzero")
        objective = ObjectiveSpec("rotation", axis=np.asarray(prm["axis"]), angle=prm["angle"])
    elif o["family"] == "pull":
        anchor = guard("objective.params.anchor", SpherePoint, prm["anchor"])
        if not patch.contains(anchor):
            raise InstanceError("objective.params.anchor", "anchor lies outside the patch")
        if not 0.0 <= prm["t"] <= 1.0:
            raise InstanceError("objective.params.t", "must lie in [0, 1]")
        objective = ObjectiveSpec("pull", anchor=anchor, t=prm["t"])
    else:
        objective = ObjectiveSpec("identity")

    terms = []
    for i, c in enumerate(config["constraints"]):
        if c["kind"] == "ball":
            terms.append(BallConstraint(guard(f"constraints[{i}].center", SpherePoint, c["center"]), c["r"]))
        else:
            terms.append(AffineConstraint(np.asarray(c["n"]), c["b"]))

    t = config["tolerances"]
    s = config["search"]
    sc = config["scalarization"]
    inst = GopInstance(
        patch=patch,
        ref_point=ref,
        ref_cone=cone,
        objective=objective,
        constraints=ConstraintSpec(tuple(terms)),
        tolerances=Tolerances(**t),
        resolution=Resolution(**config["resolution"]),
        search=SearchGrid(s["n_angle"], tuple(s["lambda_levels"]), tuple(s["lambda_scales"]),
                          tuple(s["gamma_levels"])),
        scalarization=ScalarizationSettings(None if sc["p"] == "auto" else tuple(sc["p"]), sc["y0"], sc["tol"],
                                            sc["max_rounds"]),
        name=config["name"],
        config=config,
    )
    xs = inst.samples()
    if not np.any(np.all(inst.constraints.evaluate(xs) >= -inst.tolerances.feas, axis=1)):
        raise InstanceError("constraints", "no feasible sample at the default resolution")
    return inst


def loads(text: str) -> GopInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError("<document>", f"invalid JSON: {exc}") from exc
    return build(normalize(doc))


def load(path) -> GopInstance:
    return loads(Path(path).read_text())


def dumps(inst: GopInstance) -> str:
    return json.dumps(inst.config, indent=2, sort_keys=True) + "\n"


def canonical(config: dict) -> str:
    return json.dumps(config, sort_keys=True, separators=(",", ":"))


def digest(inst_or_config) -> str:
    """sha256 of the canonical normalized document."""
    config = inst_or_config.config if isinstance(inst_or_config, GopInstance) else inst_or_config
    return hashlib.sha256(canonical(config).encode()).hexdigest()


def resolve_point(inst: GopInstance, spec) -> SpherePoint:
    """A point from a normalized point reference (see module docstring)."""
    if isinstance(spec, str):
        if spec == "ref":
            return inst.ref_point
        if spec == "center":
            return inst.patch.center
        raise InstanceError("y", f"unknown point token {spec!r}")
    if isinstance(spec, dict):
        ring, spoke = spec["grid"]
        try:
            return grid_point(inst, ring, spoke)
        except SgopError as exc:
            raise InstanceError("y.grid", str(exc)) from exc
    return SpherePoint(spec)


def parse_point_arg(text: str):
    """Point reference from command-line text: ``ref``, ``center``, ``x,y,z`` or ``grid:i,j``."""
    text = text.strip()
    if text in ("ref", "center"):
        return text
    if text.startswith("grid:"):
        parts = text[5:].split(",")
        if len(parts) != 2:
            raise InstanceError("--y", "grid reference needs two indices, e.g. grid:3,5")
        try:
            return {"grid": [int(parts[0]), int(parts[1])]}
        except ValueError as exc:
            raise InstanceError("--y", f"bad grid indices {text!r}") from exc
    parts = text.split(",")
    if len(parts) != 3:
        raise InstanceError("--y", f"expected 'ref' or three comma-separated numbers, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise InstanceError("--y", f"bad coordinates {text!r}") from exc


def with_overrides(inst: GopInstance, **sections) -> GopInstance:
    """A copy of ``inst`` with whole config sections (or fields within them) replaced."""
    config = json.loads(json.dumps(inst.config))
    for key, value in sections.items():
        if isinstance(value, dict) and isinstance(config.get(key), dict):
            config[key].update(value)
        else:
            config[key] = value
    return build(normalize(config))
