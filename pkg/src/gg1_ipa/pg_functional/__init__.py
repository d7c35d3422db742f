# -*- coding: utf-8 -*-
"""Test functionals of the workload"""
from gg1_ipa.pg_functional.bv_functional import (
    BVFunctional,
    DIFFERENCE,
    NONDECREASING,
)
from gg1_ipa.pg_functional.builders import (
    constant,
    from_spec,
    identity,
    indicator,
    piecewise,
    polynomial,
    ramp,
)

__all__ = [
    "BVFunctional",
    "DIFFERENCE",
    "NONDECREASING",
    "constant",
    "from_spec",
    "identity",
    "indicator",
    "piecewise",
    "polynomial",
    "ramp",
]
