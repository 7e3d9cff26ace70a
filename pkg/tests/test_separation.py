import math

import numpy as np
import pytest

from conftest import fixture, make_instance
from sgop.cones import SectorCone, contains_many, polar_cone
from sgop.config import SearchGrid
from sgop.errors import InfeasibleError, PreconditionError, RangeError
from sgop.instance_io import resolve_point
from sgop.problem import ImagePoint, brute_force_efficient, grid_point, image_cloud
from sgop.scalar import oriented_distance_halfline
from sgop.separation import (
    LinearSepParams,
    NonlinearSepParams,
    certificate_search,
    dual_value,
    duality_gap,
    find_separator_omega1,
    find_separator_omega2,
    holds_linear_condition,
    holds_nonlinear_condition,
    is_saddle_point1,
    is_saddle_point2,
    lagrangian1,
    lagrangian2,
    omega1,
    omega2,
    omega_tilde,
    polar_directions,
)
from sgop.sphere import SpherePoint, TangentVector

Z = SpherePoint([0, 0, 1])
CONE = SectorCone.from_angles(Z, 0.2, 1.0)


def pt(u, v):
    return ImagePoint(TangentVector(Z, u), v)


def fixture_setup(name):
    inst = fixture(name)
    y = resolve_point(inst, inst.config["y"])
    return inst, y, image_cloud(inst, y)


def test_param_validation():
    with pytest.raises(RangeError):
        LinearSepParams(CONE.bisector, [-1.0])
    with pytest.raises(RangeError):
        LinearSepParams(TangentVector.zero(Z), [1.0])
    with pytest.raises(RangeError):
        NonlinearSepParams(CONE.bisector, [-1.0, 0.0])
    assert NonlinearSepParams(TangentVector.zero(Z), [0.0, 0.0]).gamma_is_zero


def test_omega1_examples():
    theta = polar_cone(CONE).bisector
    assert omega1(pt(np.zeros(3), [2.0]), LinearSepParams(theta, [0.0])) == 0.0
    u = 0.7 * CONE.bisector.vec
    assert omega1(pt(u, [0.0]), LinearSepParams(CONE.bisector, [0.0])) == pytest.approx(0.7)
    assert omega1(pt(CONE.gen_a.vec, [0.0]), LinearSepParams(theta, [1.0])) > 0


def test_omega2_examples(rng):
    zero = NonlinearSepParams(TangentVector.zero(Z), [0.0, 0.0])
    for _ in range(20):
        assert omega2(pt(TangentVector.project(Z, rng.normal(size=3)).vec, rng.normal(size=2)), zero) == 0.0
    p = NonlinearSepParams(TangentVector.zero(Z), [-1.0, -1.0])
    assert omega2(pt(np.zeros(3), [2.0, 3.0]), p) == 2.0
    theta = polar_cone(CONE).bisector
    assert omega2(pt(CONE.gen_b.vec, [0.0, 0.5]), NonlinearSepParams(theta, [-1.0, -2.0])) >= 0


def test_omega_tilde_matches_oriented_distance():
    for s in (-3.0, -0.1, 0.0, 0.4, 2.0):
        assert omega_tilde(s) == -oriented_distance_halfline(s) == s


def test_separator_omega1_examples():
    p = find_separator_omega1(pt(np.zeros(3), [1.0]), CONE)
    assert np.array_equal(p.lam, [0.0]) and omega1(pt(np.zeros(3), [1.0]), p) == 0.0
    # u just outside gen_a, on the side away from gen_b
    u = CONE.direction(-0.3).vec
    p = find_separator_omega1(pt(u, [0.5]), CONE)
    assert float(p.theta.vec @ u) <= 0 and omega1(pt(u, [0.5]), p) <= 0
    x = pt(CONE.bisector.vec, [1.0, -1.0])
    p = find_separator_omega1(x, CONE)
    assert omega1(x, p) < 0


def test_separator_omega2_examples():
    x = pt(CONE.bisector.vec, [-1.0, 2.0])
    p = find_separator_omega2(x, CONE)
    assert p.phi.norm == 0 and omega2(x, p) == -1.0
    assert omega2(pt(np.zeros(3), [1.0, 1.0]), find_separator_omega2(pt(np.zeros(3), [1.0, 1.0]), CONE)) == 0.0
    u = -CONE.bisector.vec
    p = find_separator_omega2(pt(u, [1.0, 1.0]), CONE)
    assert omega2(pt(u, [1.0, 1.0]), p) < 0


def test_separator_rejects_points_of_H():
    with pytest.raises(PreconditionError):
        find_separator_omega1(pt(CONE.bisector.vec, [0.0]), CONE)
    with pytest.raises(PreconditionError):
        find_separator_omega2(pt(CONE.bisector.vec, [0.0]), CONE)


def test_separators_on_random_points(rng):
    for _ in range(300):
        cone = SectorCone.from_angles(Z, rng.uniform(0, 6), rng.uniform(0.3, 2.5))
        u = TangentVector.project(Z, rng.normal(size=3)).vec
        v = rng.normal(size=2)
        x = pt(u, v)
        in_h = contains_many(cone, u)[0] and np.linalg.norm(u) > 1e-9 and np.all(v >= 0)
        if in_h:
            continue
        assert omega1(x, find_separator_omega1(x, cone)) <= 1e-12
        assert omega2(x, find_separator_omega2(x, cone)) <= 1e-12


def test_polar_directions_are_interior():
    dirs = polar_directions(CONE, 9)
    p = polar_cone(CONE)
    assert np.all(p.coefficients(dirs) > 0)
    assert np.allclose(dirs[4], p.bisector.vec, atol=1e-12)


def test_certificate_found_on_engineered_instance():
    inst, y, cloud = fixture_setup("ball_edge_efficient")
    cert = certificate_search(inst, y, "linear", cloud)
    assert cert is not None and cert.max_omega_over_cloud <= 1e-9
    assert brute_force_efficient(inst, y).efficient
    nl = certificate_search(inst, y, "nonlinear", cloud)
    assert nl is not None and not nl.params.gamma_is_zero


def test_no_certificate_when_not_efficient():
    inst, y, cloud = fixture_setup("ball_center_dominated")
    assert certificate_search(inst, y, "linear", cloud) is None
    assert certificate_search(inst, y, "nonlinear", cloud) is None


def test_single_direction_grid_hits_bisector():
    inst, y, cloud = fixture_setup("ball_edge_efficient")
    cert = certificate_search(inst, y, "linear", cloud, SearchGrid(n_angle=1))
    assert cert is not None
    assert np.allclose(cert.params.theta.vec, polar_cone(inst.cone_at(cloud.fy)).bisector.vec, atol=1e-12)


def test_threads_do_not_change_results():
    inst, y, cloud = fixture_setup("two_constraints_edge")
    a = certificate_search(inst, y, "linear", cloud, workers=1)
    b = certificate_search(inst, y, "linear", cloud, workers=4)
    assert a.as_dict() == b.as_dict()
    assert duality_gap(inst, y, cloud, workers=1).as_dict() == duality_gap(inst, y, cloud, workers=3).as_dict()


def test_lagrangian_examples(rng):
    inst, y, cloud = fixture_setup("ball_edge_efficient")
    fy = cloud.fy
    theta = polar_cone(inst.cone_at(fy)).bisector
    lam = np.array([0.7])
    g_y = inst.constraints.evaluate(y.coords)[0]
    assert lagrangian1(inst, y, y, LinearSepParams(theta, lam)) == pytest.approx(-(lam @ g_y), abs=1e-15)
    zero2 = NonlinearSepParams(TangentVector.zero(fy), [0.0])
    assert lagrangian2(inst, y, y, zero2) == 0.0
    assert lagrangian2(inst, y, y, NonlinearSepParams(theta, [-1.0])) <= 0.0
    for i in rng.choice(len(cloud), 50, replace=False):
        x = SpherePoint(cloud.sources[i])
        p1 = LinearSepParams(theta, lam)
        p2 = NonlinearSepParams(theta, [-0.5])
        assert lagrangian1(inst, y, x, p1) == pytest.approx(-omega1(cloud[i], p1), abs=1e-15)
        assert lagrangian2(inst, y, x, p2) == pytest.approx(-omega2(cloud[i], p2), abs=1e-15)


def test_saddle_examples_linear():
    inst, y, cloud = fixture_setup("ball_edge_efficient")
    cert = certificate_search(inst, y, "linear", cloud)
    assert float(cert.params.lam @ inst.constraints.evaluate(y.coords)[0]) == pytest.approx(0, abs=1e-12)
    assert holds_linear_condition(inst, cloud, cert.params)
    assert is_saddle_point1(inst, y, cert.params.theta, cert.params.lam, cloud)

    inst, y, cloud = fixture_setup("ball_center_dominated")
    theta = polar_cone(inst.cone_at(cloud.fy)).bisector
    assert inst.constraints.evaluate(y.coords)[0][0] > 0
    assert not is_saddle_point1(inst, y, theta, [1.0], cloud)

    inst, y, cloud = fixture_setup("rim_singleton")
    theta = polar_cone(inst.cone_at(cloud.fy)).bisector
    assert cloud.feasible_mask(1e-9).sum() == 1
    assert is_saddle_point1(inst, y, theta, [0.0], cloud)


def test_saddle_examples_nonlinear():
    inst, y, cloud = fixture_setup("ball_edge_efficient")
    cert = certificate_search(inst, y, "nonlinear", cloud)
    assert holds_nonlinear_condition(inst, cloud, cert.params)
    assert is_saddle_point2(inst, y, cert.params.phi, cert.params.gamma, cloud)

    inst, y, cloud = fixture_setup("patch_edge_efficient")
    phi = polar_cone(inst.cone_at(cloud.fy)).bisector
    zero = np.zeros(1)
    # with gamma = 0 the left family compares omega_underline values only
    assert is_saddle_point2(inst, y, phi, zero, cloud) == holds_nonlinear_condition(
        inst, cloud, NonlinearSepParams(phi, zero))

    inst = make_instance()
    outside = grid_point(inst, 8, 0)
    bad = make_instance(y=[float(c) for c in outside.coords])
    with pytest.raises(InfeasibleError):
        is_saddle_point2(bad, outside, TangentVector.zero(outside), [-1.0], image_cloud(bad, outside))


def test_saddle_rejects_theta_outside_polar():
    inst, y, cloud = fixture_setup("ball_edge_efficient")
    minus = -polar_cone(inst.cone_at(cloud.fy)).bisector
    with pytest.raises(PreconditionError):
        is_saddle_point1(inst, y, minus, [0.0], cloud)


def test_dual_value_examples():
    inst, y, cloud = fixture_setup("patch_edge_efficient")
    cert = certificate_search(inst, y, "linear", cloud)
    assert np.all(cert.params.lam == 0)
    assert dual_value(inst, y, cert.params, cloud) == 0.0
    for name in ("ball_center_dominated", "two_constraints_edge", "pull_half_edge"):
        inst, y, cloud = fixture_setup(name)
        theta = polar_cone(inst.cone_at(cloud.fy)).bisector
        lam = np.full(inst.n_constraints, 0.5)
        assert dual_value(inst, y, LinearSepParams(theta, lam), cloud) >= -1e-12
    inst, y, cloud = fixture_setup("rim_singleton")
    theta = polar_cone(inst.cone_at(cloud.fy)).bisector
    single = image_cloud(inst, y)
    keep = np.flatnonzero(np.all(single.sources == y.coords, axis=1))
    single.sources, single.u, single.v = single.sources[keep], single.u[keep], single.v[keep]
    g_y = inst.constraints.evaluate(y.coords)[0]
    assert dual_value(inst, y, LinearSepParams(theta, [2.0]), single) == pytest.approx(2.0 * g_y[0], abs=1e-15)


def test_duality_gap_examples():
    inst, y, cloud = fixture_setup("ball_edge_efficient")
    gap = duality_gap(inst, y, cloud)
    assert gap.omega <= inst.tolerances.cert
    assert gap.as_dict() == duality_gap(inst, y, cloud).as_dict()
    inst, y, cloud = fixture_setup("ball_center_dominated")
    assert duality_gap(inst, y, cloud).omega > 0.1
    fixed = duality_gap(inst, y, cloud, fix_lambda=np.zeros(1))
    assert fixed.fixed_lambda and fixed.omega >= duality_gap(inst, y, cloud).omega


def test_unknown_family():
    inst, y, cloud = fixture_setup("ball_edge_efficient")
    with pytest.raises(ValueError):
        certificate_search(inst, y, "quadratic", cloud)


def test_angle_grid_spacing():
    dirs = polar_directions(CONE, 4)
    p = polar_cone(CONE)
    angles = np.sort(p.angles(dirs))
    assert np.allclose(np.diff(angles), p.aperture / 4)
    assert angles[0] == pytest.approx(p.aperture / 8)
    assert math.isclose(float(np.linalg.norm(dirs[0])), 1.0)
