# -*- coding: utf-8 -*-
"""__init__.py"""

from gg1_ipa._version import __version__

from gg1_ipa.pg_functional import BVFunctional, from_spec, identity, indicator, ramp
from gg1_ipa.pg_queue import (
    ArrivalModel,
    CustomerPath,
    ServiceModel,
    simulate_path,
    simulate_star_path,
    stability_check,
)
from gg1_ipa.pg_estimator import (
    arrival_scale_derivative,
    classic_ipa,
    first_order,
    second_order,
    speed_derivative,
    tail_probability_derivative,
)
from gg1_ipa.pg_oracle import analytic_derivative, finite_difference, mm1_workload_moments
from gg1_ipa.pg_palm import check_ergodic_equivalence, check_inversion, check_wald_lemma
from gg1_ipa.utils.objects import (
    DerivativeEstimate,
    ExitCodes,
    FDEstimate,
    PalmCheckReport,
    ParameterKind,
    Side,
)

__all__ = [
    "__version__",
    "ArrivalModel",
    "BVFunctional",
    "CustomerPath",
    "DerivativeEstimate",
    "ExitCodes",
    "FDEstimate",
    "PalmCheckReport",
    "ParameterKind",
    "ServiceModel",
    "Side",
    "analytic_derivative",
    "arrival_scale_derivative",
    "check_ergodic_equivalence",
    "check_inversion",
    "check_wald_lemma",
    "classic_ipa",
    "finite_difference",
    "first_order",
    "from_spec",
    "identity",
    "indicator",
    "mm1_workload_moments",
    "ramp",
    "second_order",
    "simulate_path",
    "simulate_star_path",
    "speed_derivative",
    "stability_check",
    "tail_probability_derivative",
]
