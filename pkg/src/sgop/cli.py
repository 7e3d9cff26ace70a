"""Command-line front end: ``sgop <command> [instance] [flags]``.

Exit codes: 0 success, 1 failed verification, 2 usage or input error,
3 not efficient, 4 no certificate, 5 scalarization result not certified.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import instance_io
from .cones import polar_cone
from .config import Resolution
from .errors import InstanceError, SgopError
from .problem import brute_force_efficient, check_disjoint_H_K, image_cloud
from .report import build_report, dumps
from .scalarization import solve_gop_via_scalarization
from .separation import (
    LinearSepParams,
    NonlinearSepParams,
    certificate_search,
    duality_gap,
    holds_linear_condition,
    holds_nonlinear_condition,
    is_saddle_point1,
    is_saddle_point2,
)
from .sphere import TangentVector
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NOT_EFFICIENT = 3
EXIT_NO_CERTIFICATE = 4
EXIT_UNCERTIFIED = 5


class UsageError(Exception):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")


def _floats(text: str, field: str, count=None) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(field, f"expected comma-separated numbers, got {text!r}") from exc
    if count is not None and len(vals) != count:
        raise UsageError(field, f"expected {count} numbers, got {len(vals)}")
    return vals


def _resolution(text: str) -> dict:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError("--resolution", "expected R,A")
    try:
        return {"radial": int(parts[0]), "angular": int(parts[1])}
    except ValueError as exc:
        raise UsageError("--resolution", f"bad value {text!r}") from exc


def _threads(args) -> int:
    value = args.threads if args.threads is not None else os.environ.get("SGOP_THREADS", "1")
    try:
        n = int(value)
    except ValueError as exc:
        raise UsageError("--threads", f"expected an integer, got {value!r}") from exc
    if n < 1:
        raise UsageError("--threads", "must be >= 1")
    return n


def _load(args):
    """Instance with command-line overrides applied, plus the digest of the file as written."""
    inst = instance_io.load(args.instance)
    file_digest = instance_io.digest(inst)
    overrides: dict = {}
    if args.resolution:
        overrides["resolution"] = _resolution(args.resolution)
        # grid references address the file's own grid; pin them before the grid changes
        for key, spec in (("y", inst.config["y"]), ("y0", inst.config["scalarization"]["y0"])):
            if isinstance(spec, dict):
                coords = _vec(instance_io.resolve_point(inst, spec).coords)
                if key == "y":
                    overrides["y"] = coords
                else:
                    overrides["scalarization"] = {"y0": coords}
    tol = {k: v for k, v in (("mem", args.tol_mem), ("feas", args.tol_feas), ("cert", args.tol_cert)) if v is not None}
    if tol:
        overrides["tolerances"] = tol
    if getattr(args, "n_angle", None) is not None:
        overrides["search"] = {"n_angle": args.n_angle}
    if args.y is not None:
        overrides["y"] = instance_io.parse_point_arg(args.y)
    if overrides:
        inst = instance_io.with_overrides(inst, **overrides)
    return inst, file_digest


def _y(inst):
    return instance_io.resolve_point(inst, inst.config["y"])


def _vec(v) -> list:
    return [float(c) for c in np.asarray(v).reshape(-1)]


# -- commands ----------------------------------------------------------------------------


def cmd_check_efficiency(args):
    inst, fd = _load(args)
    y = _y(inst)
    cloud = image_cloud(inst, y)
    eff = brute_force_efficient(inst, y, cloud=cloud)
    disjoint = check_disjoint_H_K(inst, y, cloud=cloud)
    result = {
        "y": _vec(y.coords),
        "efficient": eff.efficient,
        "image_disjoint_from_H": disjoint.disjoint,
        "witness": None if eff.witness is None else _vec(eff.witness.coords),
        "witness_index": eff.witness_index,
    }
    code = EXIT_OK if eff.efficient else EXIT_NOT_EFFICIENT
    return inst, fd, result, code


def cmd_separate(args):
    inst, fd = _load(args)
    y = _y(inst)
    cloud = image_cloud(inst, y)
    cert = certificate_search(inst, y, args.family, cloud, workers=_threads(args))
    result = {"y": _vec(y.coords), "family": args.family, "certificate": None if cert is None else cert.as_dict()}
    return inst, fd, result, EXIT_OK if cert is not None else EXIT_NO_CERTIFICATE


def cmd_saddle(args):
    inst, fd = _load(args)
    y = _y(inst)
    cloud = image_cloud(inst, y)
    fy = cloud.fy
    l = inst.n_constraints
    polar = polar_cone(inst.cone_at(fy))
    found = certificate_search(inst, y, args.family, cloud, workers=_threads(args))
    if args.family == "linear":
        if args.theta:
            theta = TangentVector.project(fy, _floats(args.theta, "--theta", 3))
        else:
            theta = found.params.theta if found else polar.bisector
        lam = np.array(_floats(args.lam, "--lambda", l)) if args.lam else (found.params.lam if found else np.zeros(l))
        params = LinearSepParams(theta, lam)
        saddle = is_saddle_point1(inst, y, theta, lam, cloud)
        condition = holds_linear_condition(inst, cloud, params)
        complementary = float(lam @ inst.constraints.evaluate(y.coords)[0])
    else:
        if args.phi:
            phi = TangentVector.project(fy, _floats(args.phi, "--phi", 3))
        else:
            phi = found.params.phi if found else polar.bisector
        gamma = np.array(_floats(args.gamma, "--gamma", l)) if args.gamma else (
            found.params.gamma if found else -np.ones(l))
        params = NonlinearSepParams(phi, gamma)
        saddle = is_saddle_point2(inst, y, phi, gamma, cloud)
        condition = holds_nonlinear_condition(inst, cloud, params)
        complementary = None
    result = {
        "y": _vec(y.coords),
        "family": args.family,
        "params": params.as_dict(),
        "saddle_point": saddle,
        "separation_condition": condition,
    }
    if complementary is not None:
        result["lambda_dot_g_y"] = complementary
    return inst, fd, result, EXIT_OK


def cmd_gap(args):
    inst, fd = _load(args)
    y = _y(inst)
    cloud = image_cloud(inst, y)
    fix = None
    if args.gap_fix_lambda is not None:
        fix = np.zeros(inst.n_constraints) if args.gap_fix_lambda == "" else np.array(
            _floats(args.gap_fix_lambda, "--gap-fix-lambda", inst.n_constraints))
        if np.any(fix < 0):
            raise UsageError("--gap-fix-lambda", "multipliers must be >= 0")
    gap = duality_gap(inst, y, cloud, fix_lambda=fix, workers=_threads(args))
    result = {"y": _vec(y.coords), **gap.as_dict(), "zero_gap": gap.omega <= inst.tolerances.cert}
    return inst, fd, result, EXIT_OK


def cmd_scalarize(args):
    inst, fd = _load(args)
    y0 = instance_io.resolve_point(inst, inst.config["scalarization"]["y0"] if args.y is None else inst.config["y"])
    res = solve_gop_via_scalarization(inst, y0)
    result = {"y0": _vec(y0.coords), **res.as_dict(), "chord_projection": "renormalize"}
    return inst, fd, result, EXIT_OK if res.certified else EXIT_UNCERTIFIED


def cmd_sample(args):
    inst, fd = _load(args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    fmt = "%.17g"
    if args.what == "patch":
        xs = inst.samples()
        res: Resolution = inst.resolution
        w.writerow(["index", "ring", "spoke", "x", "y", "z"])
        for i, x in enumerate(xs):
            ring, spoke = (0, 0) if i == 0 else (1 + (i - 1) // res.angular, (i - 1) % res.angular)
            w.writerow([i, ring, spoke, *(fmt % c for c in x)])
    else:
        y = _y(inst)
        cloud = image_cloud(inst, y)
        l = cloud.v.shape[1]
        w.writerow(["index", "x", "y", "z", "u1", "u2", "u3", *(f"v{i + 1}" for i in range(l))])
        for i in range(len(cloud)):
            w.writerow([i, *(fmt % c for c in cloud.sources[i]), *(fmt % c for c in cloud.u[i]),
                        *(fmt % c for c in cloud.v[i])])
    return inst, fd, buf.getvalue(), EXIT_OK


def cmd_verify(args):
    checks = run_suite(args.suite, args.seed, args.scale)
    failed = [c for c in checks if not c.passed]
    result = {"suite": args.suite, "seed": args.seed, "scale": args.scale, "passed": not failed,
              "checks": [c.as_dict() for c in checks]}
    if failed:
        result["reproduction"] = {"command": f"sgop verify --suite {args.suite} --seed {args.seed} "
                                             f"--scale {args.scale}", "first_failure": failed[0].as_dict()}
    return None, None, result, EXIT_OK if not failed else EXIT_VERIFY_FAILED


COMMANDS = {
    "check-efficiency": cmd_check_efficiency,
    "separate": cmd_separate,
    "saddle": cmd_saddle,
    "gap": cmd_gap,
    "scalarize": cmd_scalarize,
    "sample": cmd_sample,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgop", description="Cone-ordered optimization on a spherical patch.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("instance", help="instance JSON file")
            p.add_argument("--y", help="candidate point: ref, center, x,y,z or grid:ring,spoke")
            p.add_argument("--resolution", help="patch grid as R,A")
            p.add_argument("--tol-mem", type=float)
            p.add_argument("--tol-feas", type=float)
            p.add_argument("--tol-cert", type=float)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", help="worker threads (default: SGOP_THREADS or 1)")
        p.add_argument("--out", help="write the output here instead of stdout")

    p = sub.add_parser("check-efficiency", help="brute-force efficiency and image disjointness")
    common(p)
    p.add_argument("--format", choices=["json", "text"], default="json")
    helps = {"separate": "search for a separation certificate", "saddle": "test a Lagrangian saddle point"}
    for name in ("separate", "saddle"):
        p = sub.add_parser(name, help=helps[name])
        common(p)
        p.add_argument("--family", choices=["linear", "nonlinear"], default="linear")
        p.add_argument("--n-angle", type=int)
        p.add_argument("--format", choices=["json", "text"], default="json")
        if name == "saddle":
            p.add_argument("--theta", help="theta at f(y) as x,y,z")
            p.add_argument("--lambda", dest="lam", help="lambda as comma-separated values")
            p.add_argument("--phi", help="phi at f(y) as x,y,z")
            p.add_argument("--gamma", help="gamma as comma-separated values")
    p = sub.add_parser("gap", help="image duality gap")
    common(p)
    p.add_argument("--n-angle", type=int)
    p.add_argument("--gap-fix-lambda", nargs="?", const="", default=None,
                   help="fix lambda (comma-separated; bare flag means zero)")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p = sub.add_parser("scalarize", help="solve via the scalar quasi-minimum problem")
    common(p)
    p.add_argument("--format", choices=["json", "text"], default="json")
    p = sub.add_parser("sample", help="dump the patch grid or image cloud")
    common(p)
    p.add_argument("--what", choices=["patch", "image"], default="patch")
    p.add_argument("--format", choices=["csv"], default="csv")
    p = sub.add_parser("verify", help="run property batteries")
    common(p, instance=False)
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.add_argument("--scale", type=float, default=1.0, help="multiply battery sizes")
    p.add_argument("--format", choices=["json", "text"], default="json")
    return parser


def _text(report: dict) -> str:
    lines = [f"command: {report['command']}", f"exit_code: {report['exit_code']}"]
    result = report["result"]
    if report["command"] == "verify":
        for c in result["checks"]:
            lines.append(f"{'PASS' if c['passed'] else 'FAIL'} {c['suite']}/{c['name']} "
                         f"cases={c['cases']} worst={c['worst']:.3g}")
    else:
        for k, v in result.items():
            lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        inst, fd, result, code = COMMANDS[args.command](args)
    except (InstanceError, UsageError, SgopError, ValueError) as exc:
        print(f"sgop: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"sgop: error: instance: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "sample":
        text = result
    else:
        elapsed = round((time.perf_counter() - start) * 1000.0, 3)
        report = build_report(args.command, result, code, inst, fd, getattr(args, "instance", None), elapsed,
                              extra={"seed": args.seed})
        text = _text(report) if args.format == "text" else dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
