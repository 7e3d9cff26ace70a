import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgop.errors import AntipodalError, RangeError
from sgop.oracles import rk4_transport
from sgop.sphere import (
    Patch,
    SpherePoint,
    TangentVector,
    distance,
    exp_map,
    geodesic_point,
    log_map,
    log_map_many,
    parallel_transport,
    sample_patch,
)

X = SpherePoint([1, 0, 0])
Y = SpherePoint([0, 1, 0])
Z = SpherePoint([0, 0, 1])

unit3 = st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3).filter(lambda v: np.linalg.norm(v) > 0.1)


def test_point_renormalizes_and_rejects_zero():
    assert np.allclose(SpherePoint([2, 0, 0]).coords, [1, 0, 0])
    with pytest.raises(ValueError):
        SpherePoint([1e-9, 0, 0])


def test_tangent_vector_rejects_normal_component():
    with pytest.raises(ValueError):
        TangentVector(X, [1, 0, 0])


def test_distance_examples():
    assert distance(X, X) == 0.0
    assert distance(X, Y) == pytest.approx(math.pi / 2, abs=1e-15)
    assert distance(X, -X) == pytest.approx(math.pi, abs=1e-15)


def test_exp_examples():
    assert exp_map(TangentVector.zero(X)) == X
    assert np.allclose(exp_map(TangentVector(X, [0, math.pi / 2, 0])).coords, [0, 1, 0], atol=1e-15)
    h = math.sqrt(2) / 2
    assert np.allclose(exp_map(TangentVector(X, [0, math.pi / 4, 0])).coords, [h, h, 0], atol=1e-15)


def test_exp_range_error():
    with pytest.raises(RangeError):
        exp_map(TangentVector(X, [0, math.pi, 0]))


def test_log_examples():
    assert np.array_equal(log_map(X, X).vec, np.zeros(3))
    assert np.allclose(log_map(X, Z).vec, [0, 0, math.pi / 2], atol=1e-15)
    with pytest.raises(AntipodalError):
        log_map(X, -X)


def test_log_many_exact_zero_at_base():
    p = SpherePoint([0.3, -0.2, 0.9])
    out = log_map_many(p.coords, np.vstack([p.coords, Z.coords]))
    assert np.array_equal(out[0], np.zeros(3))


@settings(max_examples=200, deadline=None)
@given(unit3, unit3)
def test_log_norm_is_distance(a, b):
    p, q = SpherePoint(a), SpherePoint(b)
    if distance(p, q) > math.pi - 1e-3:
        return
    assert log_map(q, p).norm == pytest.approx(distance(p, q), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(unit3, unit3, st.floats(0, math.pi - 0.1))
def test_exp_log_round_trip(a, d, r):
    p = SpherePoint(a)
    u = TangentVector.project(p, d)
    if u.norm < 1e-6:
        return
    v = u.normalized() * r
    assert np.linalg.norm(log_map(p, exp_map(v)).vec - v.vec) <= 1e-9


def test_geodesic_examples():
    assert geodesic_point(X, Y, 0.0) == X
    h = math.sqrt(2) / 2
    assert np.allclose(geodesic_point(X, Y, math.pi / 4).coords, [h, h, 0], atol=1e-15)
    with pytest.raises(RangeError):
        geodesic_point(X, Y, 2.0)


def test_geodesic_matches_exp():
    p, q = SpherePoint([1, 0.2, 0.1]), SpherePoint([0.1, 1, -0.3])
    d = distance(p, q)
    for t in np.linspace(0, d, 7):
        via_exp = exp_map(log_map(p, q).normalized() * t)
        assert np.allclose(geodesic_point(p, q, t).coords, via_exp.coords, atol=1e-12)


def test_transport_examples():
    v = TangentVector(X, [0, 0.4, 0.7])
    assert np.array_equal(parallel_transport(v, X).vec, v.vec)
    assert np.allclose(parallel_transport(TangentVector(X, [0, 0, 1]), Y).vec, [0, 0, 1], atol=1e-15)
    assert np.allclose(parallel_transport(TangentVector(X, [0, 1, 0]), Y).vec, [-1, 0, 0], atol=1e-15)


def test_transport_matches_ode(rng):
    for _ in range(10):
        p = SpherePoint(rng.normal(size=3))
        q = SpherePoint(p.coords + 0.8 * rng.normal(size=3))
        v = TangentVector.project(p, rng.normal(size=3))
        ode = rk4_transport(p.coords, v.vec, q.coords)
        assert np.linalg.norm(parallel_transport(v, q).vec - ode) <= 1e-6


def test_transport_is_isometry_and_round_trips(rng):
    p, q = SpherePoint([0.2, 0.1, 1]), SpherePoint([-0.5, 0.6, 0.7])
    u, w = TangentVector.project(p, rng.normal(size=3)), TangentVector.project(p, rng.normal(size=3))
    pu, pw = parallel_transport(u, q), parallel_transport(w, q)
    assert abs(pu.dot(pw) - u.dot(w)) <= 1e-9
    assert abs(q.coords @ pu.vec) <= 1e-12
    assert np.allclose(parallel_transport(pu, p).vec, u.vec, atol=1e-9)


def test_sample_patch_counts_membership_and_determinism():
    patch = Patch(SpherePoint([0.1, 0.2, 1]), 0.4)
    assert len(sample_patch(patch, 1, 4)) == 5
    pts = sample_patch(patch, 5, 12)
    assert len(pts) == 1 + 5 * 12
    assert all(distance(patch.center, x) <= patch.radius + 1e-12 for x in pts)
    again = sample_patch(patch, 5, 12)
    assert all(np.array_equal(a.coords, b.coords) for a, b in zip(pts, again))


def test_patch_radius_bound():
    with pytest.raises(ValueError):
        Patch(Z, math.pi / 2)
