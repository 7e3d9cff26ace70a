"""Acceptance criteria, one test each, at the stated sizes and tolerances.

Every test prints exactly one ``PASS``/``FAIL`` line to the terminal.
"""

import json
import re

import numpy as np
import pytest

from conftest import FIXTURES
from sgop import cli
from sgop.instance_io import load, resolve_point
from sgop.problem import brute_force_efficient, image_cloud
from sgop.scalarization import solve_gop_via_scalarization
from sgop.separation import (
    LinearSepParams,
    NonlinearSepParams,
    certificate_search,
    duality_gap,
    holds_linear_condition,
    holds_nonlinear_condition,
    is_saddle_point1,
    is_saddle_point2,
    polar_directions,
)
from sgop.sphere import TangentVector
from sgop.verify import (
    check_containments,
    check_equivalence,
    check_exp_log,
    check_separators,
    check_transport_isometry,
    check_transport_ode,
    run_delta,
    run_gerstewitz,
)


@pytest.fixture
def announce(capsys):
    def emit(criterion, passed, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")
        return passed

    return emit


def rng_for(criterion):
    return np.random.default_rng([2026, criterion])


def summarize(checks):
    failed = [c for c in checks if not c.passed]
    worst = "; ".join(f"{c.name} worst={c.worst:.3g} (tol {c.tolerance:g}, n={c.cases})" for c in failed[:3])
    return not failed, worst or f"{len(checks)} checks, {sum(c.cases for c in checks)} cases"


def fixture_setups():
    out = []
    for path in FIXTURES:
        inst = load(path)
        y = resolve_point(inst, inst.config["y"])
        out.append((path.stem, inst, y, image_cloud(inst, y)))
    return out


def test_criterion_01_geometry_round_trip(announce):
    roundtrip, norm = check_exp_log(rng_for(1), n=10_000)
    assert roundtrip.tolerance == 1e-9 and norm.tolerance == 1e-12
    ok = roundtrip.passed and norm.passed
    detail = f"exp/log worst {roundtrip.worst:.2e}, |log|=d worst {norm.worst:.2e} over {roundtrip.cases} pairs"
    assert announce(1, ok, detail)


def test_criterion_02_transport_vs_ode(announce):
    rng = rng_for(2)
    ode = check_transport_ode(rng, n=100)
    iso = [c for c in check_transport_isometry(rng, n=100) if c.name == "transport_isometry"][0]
    assert ode.tolerance == 1e-6 and iso.tolerance == 1e-9
    ok = ode.passed and iso.passed
    assert announce(2, ok, f"RK4 worst {ode.worst:.2e} (n={ode.cases}), isometry worst {iso.worst:.2e}")


def test_criterion_03_oriented_distance_lemma(announce):
    checks = run_delta(rng_for(3), scale=1.0)
    geometries = {c.name.split(":")[0] for c in checks}
    assert len(geometries) == 7  # scalar, orthant and five sectors
    assert all(c.cases >= 1000 for c in checks)
    ok, detail = summarize(checks)
    assert announce(3, ok, f"{len(geometries)} geometries: {detail}")


def test_criterion_04_gerstewitz_lemma(announce):
    checks = run_gerstewitz(rng_for(4), scale=1.0)
    by_name = {c.name: c for c in checks}
    oracle, levels = by_name["matches_bisection"], by_name["level_sets"]
    assert oracle.cases == 10_000 and oracle.tolerance == 1e-10
    ok, detail = summarize(checks)
    assert announce(4, ok, f"bisection worst {oracle.worst:.2e} on {oracle.cases}; "
                           f"level sets {levels.cases} cases; {detail}")


def test_criterion_05_efficiency_equivalence(announce):
    check = check_equivalence(rng_for(5), n_instances=50, n_y=5)
    assert check.cases == 250
    assert announce(5, check.passed, f"{check.cases} (instance, y) cases, {int(check.worst)} disagreements")


def test_criterion_06_separator_construction(announce):
    checks = check_separators(rng_for(6), n=1000)
    assert all(c.cases == 1000 and c.tolerance == 1e-12 for c in checks)
    ok = all(c.passed for c in checks)
    assert announce(6, ok, "; ".join(f"{c.name} worst {c.worst:.2e}" for c in checks))


def test_criterion_07_certificate_soundness(announce):
    setups = fixture_setups()
    assert len(setups) >= 10
    false_certs, issued = [], 0
    for name, inst, y, cloud in setups:
        efficient = brute_force_efficient(inst, y, cloud=cloud).efficient
        for kind in ("linear", "nonlinear"):
            if certificate_search(inst, y, kind, cloud) is not None:
                issued += 1
                if not efficient:
                    false_certs.append((name, kind))
    ok = not false_certs and issued > 0
    assert announce(7, ok, f"{issued} certificates over {len(setups)} fixtures, false: {false_certs}")


def _saddle_cases(inst, y, cloud, family, stride):
    """(saddle, condition) for every grid parameter at the given direction stride."""
    cone = inst.cone_at(cloud.fy)
    dirs = polar_directions(cone, inst.search.n_angle)[::stride]
    l = inst.n_constraints
    out = []
    for d in dirs:
        t = TangentVector(cloud.fy, d)
        if family == "linear":
            for lam in inst.search.lambdas(l):
                out.append((is_saddle_point1(inst, y, t, lam, cloud),
                            holds_linear_condition(inst, cloud, LinearSepParams(t, lam)), lam))
        else:
            for gamma in inst.search.gammas(l):
                out.append((is_saddle_point2(inst, y, t, gamma, cloud),
                            holds_nonlinear_condition(inst, cloud, NonlinearSepParams(t, gamma)), gamma))
    return out


def test_criterion_08_saddle_equivalence(announce):
    setups = fixture_setups()
    lines, ok = [], True
    for family in ("linear", "nonlinear"):
        holds, fails, mismatches, forced_false = set(), set(), [], set()
        for name, inst, y, cloud in setups:
            g_y = inst.constraints.evaluate(y.coords)[0]
            for saddle, cond, mult in _saddle_cases(inst, y, cloud, family, stride=4):
                if saddle != cond:
                    mismatches.append((name, mult.tolist()))
                (holds if saddle else fails).add(name)
                if family == "linear" and float(mult @ g_y) > 0 and not saddle:
                    forced_false.add(name)
        fam_ok = not mismatches and len(holds) >= 3 and len(fails) >= 3
        if family == "linear":
            fam_ok = fam_ok and len(forced_false) >= 3
        ok = ok and fam_ok
        forced = f", forced false by <lambda, g(y)> > 0 on {len(forced_false)}" if family == "linear" else ""
        lines.append(f"{family}: saddle&condition on {len(holds)} fixtures, neither on {len(fails)}{forced}, "
                     f"mismatches {len(mismatches)}")
    assert announce(8, ok, "; ".join(lines))


def test_criterion_09_zero_gap_equivalence(announce):
    setups = fixture_setups()
    bad, zero = [], 0
    for name, inst, y, cloud in setups:
        gap = duality_gap(inst, y, cloud)
        cert = certificate_search(inst, y, "linear", cloud)
        zero += gap.omega <= 1e-9
        if (gap.omega <= 1e-9) != (cert is not None):
            bad.append((name, gap.omega))
    ok = not bad and 0 < zero < len(setups)
    assert announce(9, ok, f"{zero} zero-gap / {len(setups) - zero} positive-gap fixtures, mismatches {bad}")


def test_criterion_10_scalarization(announce):
    contain = check_containments(rng_for(10), n_instances=50, n_y=10)
    uncertified, unstable = [], []
    for name, inst, _, _ in fixture_setups():
        y0 = resolve_point(inst, inst.config["scalarization"]["y0"])
        res = solve_gop_via_scalarization(inst, y0, tol=1e-9)
        if not res.certified:
            uncertified.append(name)
        if not res.stable:
            unstable.append(name)
    ok = contain.passed and not uncertified and not unstable
    assert announce(10, ok, f"containments on {contain.cases} samples ({int(contain.worst)} bad); "
                            f"uncertified {uncertified}; unstable {unstable}")


COMMANDS = [
    ["check-efficiency"],
    ["separate"],
    ["separate", "--family", "nonlinear"],
    ["saddle"],
    ["saddle", "--family", "nonlinear"],
    ["gap"],
    ["gap", "--gap-fix-lambda"],
    ["scalarize"],
    ["sample", "--what", "patch"],
    ["sample", "--what", "image"],
]
TIMING = re.compile(r',\n  "timing_ms": [^\n]*')


def _payload(capsys, argv):
    cli.main(argv)
    out, _ = capsys.readouterr()
    return TIMING.sub("", out)


def test_criterion_11_cli_determinism(announce, capsys):
    differing, runs = [], 0
    for path in FIXTURES:
        for cmd in COMMANDS:
            argv = [cmd[0], str(path), *cmd[1:], "--seed", "11"]
            first, second = _payload(capsys, argv), _payload(capsys, argv)
            runs += 1
            if first != second or not first:
                differing.append(" ".join(argv))
            if cmd[0] != "sample":
                assert "timing_ms" not in first and json.loads(first)["seed"] == 11
    assert announce(11, not differing, f"{runs} command/fixture pairs run twice, differing: {differing[:3]}")

