"""Python bindings for the phdyn toolkit."""

import json as _json

from ._core import (
    CapacityError,
    ConstructionError,
    InputError,
    NumericError,
    cocycle_exponents,
    equalize_2d,
    horseshoe_periodic_point,
    nonresonance,
    spectrum,
    steer_vector,
)
from . import _core

__all__ = [
    "CapacityError",
    "ConstructionError",
    "InputError",
    "NumericError",
    "cocycle_exponents",
    "equalize_2d",
    "finite_time_exponents",
    "horseshoe_periodic_point",
    "nonresonance",
    "run",
    "spectrum",
    "steer_vector",
]


def finite_time_exponents(map_spec, x, n, warmup=32):
    """Sorted finite-time exponents along the orbit of x; map_spec is a dict."""
    return _core.finite_time_exponents(_json.dumps(map_spec), list(map(float, x)), int(n), int(warmup))


def run(config, workers=1):
    """Run one analysis; returns {artifact name: parsed JSON or CSV text}."""
    out = {}
    for name, data in _core.run_analysis(_json.dumps(config), int(workers)).items():
        out[name] = _json.loads(data) if name.endswith(".json") else data
    return out
