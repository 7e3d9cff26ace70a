"""Cone-ordered optimization on a spherical patch, analyzed in image space."""

from .cones import SectorCone, polar_cone, transport_cone
from .errors import (
    AntipodalError,
    BaseMismatchError,
    DegenerateError,
    DimensionMismatchError,
    EmptyFeasibleRegionError,
    InfeasibleError,
    InstanceError,
    PreconditionError,
    RangeError,
    SgopError,
    StabilityWarning,
)
from .instance_io import load, loads
from .problem import GopInstance, brute_force_efficient, image_cloud
from .sphere import Patch, SpherePoint, TangentVector, exp_map, log_map, parallel_transport

__version__ = "0.1.0"

__all__ = [
    "AntipodalError",
    "BaseMismatchError",
    "DegenerateError",
    "DimensionMismatchError",
    "EmptyFeasibleRegionError",
    "GopInstance",
    "InfeasibleError",
    "InstanceError",
    "Patch",
    "PreconditionError",
    "RangeError",
    "SectorCone",
    "SgopError",
    "SpherePoint",
    "StabilityWarning",
    "TangentVector",
    "brute_force_efficient",
    "exp_map",
    "image_cloud",
    "load",
    "loads",
    "log_map",
    "parallel_transport",
    "polar_cone",
    "transport_cone",
]
