# -*- coding: utf-8 -*-
"""Ground truth for the IPA estimators"""
from gg1_ipa.pg_oracle.closed_forms import (
    DD1ClosedForms,
    MM1Moments,
    analytic_derivative,
    dd1_closed_forms,
    mm1_workload_moments,
)
from gg1_ipa.pg_oracle.finite_difference import (
    finite_difference,
    stencil_points,
    stencil_quotient,
)

__all__ = [
    "DD1ClosedForms",
    "MM1Moments",
    "analytic_derivative",
    "dd1_closed_forms",
    "finite_difference",
    "mm1_workload_moments",
    "stencil_points",
    "stencil_quotient",
]
