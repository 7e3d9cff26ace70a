import math

import numpy as np
import pytest

from conftest import make_instance
from sgop.config import Resolution
from sgop.errors import EmptyFeasibleRegionError, InfeasibleError, InstanceError, RangeError
from sgop.generate import random_feasible_points, random_instance
from sgop.problem import (
    ImagePoint,
    brute_force_efficient,
    check_disjoint_H_K,
    efficiency_decisions,
    evaluate_constraints,
    evaluate_objective,
    grid_point,
    image_cloud,
    image_map,
    in_extended_image,
    in_H,
    is_feasible,
)
from sgop.sphere import SpherePoint, TangentVector, distance, exp_map, log_map

Z = SpherePoint([0, 0, 1])


def test_objective_families():
    x = SpherePoint([0.1, 0.2, 1])
    assert evaluate_objective(make_instance(), x).isclose(x, 1e-15)
    rot0 = make_instance(objective={"family": "rotation", "params": {"axis": [0, 0, 1], "angle": 0.0}})
    assert evaluate_objective(rot0, x).isclose(x, 1e-15)
    anchor = [0.2, -0.1, 1]
    pull1 = make_instance(objective={"family": "pull", "params": {"anchor": anchor, "t": 1.0}})
    assert evaluate_objective(pull1, x).isclose(SpherePoint(anchor), 1e-12)


def test_rotation_about_z():
    inst = make_instance(objective={"family": "rotation", "params": {"axis": [0, 0, 1], "angle": math.pi / 2}})
    x = SpherePoint([math.sin(0.3), 0, math.cos(0.3)])
    assert np.allclose(evaluate_objective(inst, x).coords, [0, math.sin(0.3), math.cos(0.3)], atol=1e-12)


def test_constraint_examples():
    x = SpherePoint([0.1, 0, 1])
    ball = make_instance(constraints=[{"kind": "ball", "center": x.coords.tolist(), "r": 0.5}])
    assert evaluate_constraints(ball, x)[0] == pytest.approx(0.5, abs=1e-15)
    edge = exp_map(TangentVector(Z, [0.3, 0, 0]))
    assert evaluate_constraints(make_instance(), edge)[0] == pytest.approx(0.0, abs=1e-12)
    aff = make_instance(constraints=[{"kind": "affine", "n": [0, 0, 1], "b": 0.0}])
    assert evaluate_constraints(aff, Z)[0] == 1.0


def test_feasibility():
    inst = make_instance()
    assert is_feasible(inst, Z)
    assert not is_feasible(inst, exp_map(TangentVector(Z, [0.4, 0, 0])))
    assert is_feasible(inst, exp_map(TangentVector(Z, [0.3, 0, 0])))
    with pytest.raises(RangeError):
        is_feasible(inst, SpherePoint([1, 0, 0]))


def test_image_map_examples():
    inst = make_instance()
    y, x = Z, SpherePoint([0.1, 0.1, 1])
    pt = image_map(inst, y, y)
    assert np.array_equal(pt.u.vec, np.zeros(3)) and pt.v[0] == pytest.approx(0.3)
    pt = image_map(inst, y, x)
    assert np.allclose(pt.u.vec, log_map(y, x).vec, atol=1e-15)
    assert pt.u.norm == pytest.approx(distance(y, x), abs=1e-12)


def test_in_H_examples():
    inst = make_instance()
    c = inst.cone_at(Z)
    assert not in_H(inst, Z, ImagePoint(TangentVector.zero(Z), [5.0]))
    assert in_H(inst, Z, ImagePoint(c.gen_a, [0.0]))
    assert not in_H(inst, Z, ImagePoint(c.bisector, [-1.0]))


def test_image_cloud_counting_and_determinism():
    inst = make_instance()
    cloud = image_cloud(inst, Z, Resolution(1, 4))
    assert len(cloud) == 5
    assert np.array_equal(cloud.u[0], np.zeros(3))
    again = image_cloud(inst, Z, Resolution(1, 4))
    assert np.array_equal(cloud.u, again.u) and np.array_equal(cloud.v, again.v)


def test_extended_image_examples():
    inst = make_instance()
    cloud = image_cloud(inst, Z)
    c = inst.cone_at(Z)
    for pt in cloud[:20]:
        assert in_extended_image(inst, Z, pt, cloud)
    pt = cloud[7]
    shifted = ImagePoint(TangentVector(Z, pt.u.vec - 0.2 * c.bisector.vec), pt.v - 0.1)
    assert in_extended_image(inst, Z, shifted, cloud)
    above = ImagePoint(TangentVector.zero(Z), cloud.v.max(axis=0) + 1.0)
    assert not in_extended_image(inst, Z, above, cloud)


def test_efficiency_examples():
    inst = make_instance()
    edge = grid_point(inst, 5, 0)  # rim of the constraint ball
    report = brute_force_efficient(inst, edge)
    assert report.efficient and report.witness is None
    bad = brute_force_efficient(inst, Z)
    assert not bad.efficient
    assert in_H(inst, Z, image_map(inst, Z, bad.witness))
    assert check_disjoint_H_K(inst, Z).disjoint is False


def test_tiny_ball_cone_pointing_away_is_efficient():
    # Z sits on the rim of a small ball and the cone points straight out of it
    center = exp_map(TangentVector(Z, [0, -0.05, 0]))
    inst = make_instance(patch={"center": [0, 0, 1], "radius": 0.1},
                         constraints=[{"kind": "ball", "center": center.coords.tolist(), "r": 0.05}],
                         resolution={"radial": 20, "angular": 36})
    cloud = image_cloud(inst, Z)
    assert cloud.feasible_mask(1e-9).sum() > 10
    assert brute_force_efficient(inst, Z).efficient


def test_violation_witness_is_first_dominating_sample():
    inst = make_instance()
    report = brute_force_efficient(inst, Z)
    assert not report.efficient
    cloud = image_cloud(inst, Z)
    cone = inst.cone_at(Z)
    w = report.witness
    assert is_feasible(inst, w)
    assert in_H(inst, Z, image_map(inst, Z, w))
    for i in range(report.witness_index):
        assert not (is_feasible(inst, SpherePoint(cloud.sources[i])) and in_H(inst, Z, cloud[i]))
    assert cone.coefficients(log_map(Z, w).vec).min() >= -1e-9


def test_inefficiency_persists_at_finer_resolution():
    inst = make_instance()
    y = grid_point(inst, 2, 5)
    assert not brute_force_efficient(inst, y).efficient
    assert not brute_force_efficient(inst, y, Resolution(20, 32)).efficient


def test_infeasible_y_raises():
    inst = make_instance()
    with pytest.raises(InfeasibleError):
        brute_force_efficient(inst, grid_point(inst, 8, 3))  # outside the ball


def test_instance_without_feasible_samples_is_rejected():
    with pytest.raises(InstanceError):
        make_instance(constraints=[{"kind": "affine", "n": [0, 0, 1], "b": 2.0}])


def test_disjointness_needs_a_feasible_sample():
    inst = make_instance()
    cloud = image_cloud(inst, Z)
    cloud.v = cloud.v - 1.0
    with pytest.raises(EmptyFeasibleRegionError):
        check_disjoint_H_K(inst, Z, cloud=cloud)


def test_equivalence_on_random_instances():
    rng = np.random.default_rng(7)
    for _ in range(5):
        inst = random_instance(rng, resolution=(8, 12))
        for y in random_feasible_points(rng, inst, 3):
            assert len(set(efficiency_decisions(inst, y).values())) == 1
