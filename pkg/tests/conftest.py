import copy
from pathlib import Path

import numpy as np
import pytest

import sgop
from sgop.instance_io import build, load, normalize

FIXTURE_DIR = Path(sgop.__file__).parent / "instances"
FIXTURES = sorted(FIXTURE_DIR.glob("*.json"))

BASE_DOC = {
    "schema": 1,
    "name": "unit",
    "patch": {"center": [0, 0, 1], "radius": 0.6},
    "cone": {"base_tangent_a": [1, 1, 0], "base_tangent_b": [-1, 1, 0]},
    "objective": {"family": "identity", "params": {}},
    "constraints": [{"kind": "ball", "center": [0, 0, 1], "r": 0.3}],
    "resolution": {"radial": 10, "angular": 16},
    "search": {"n_angle": 65},
}


def make_instance(**sections):
    """The base test instance with whole top-level sections replaced."""
    doc = copy.deepcopy(BASE_DOC)
    doc.update(sections)
    return build(normalize(doc))


def fixture(name):
    return load(FIXTURE_DIR / f"{name}.json")


@pytest.fixture
def inst():
    return make_instance()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
