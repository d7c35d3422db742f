# -*- coding: utf-8 -*-
"""G/G/1 inputs and workload paths"""
from gg1_ipa.pg_queue.models import (
    ArrivalModel,
    ServiceModel,
    inverse_transform,
    service_derivative,
    service_second_derivative,
    sigma_star,
    stability_check,
)
from gg1_ipa.pg_queue.lindley import (
    CustomerPath,
    interval_integrals,
    path_from_inputs,
    simulate_path,
    simulate_star_path,
)

__all__ = [
    "ArrivalModel",
    "ServiceModel",
    "CustomerPath",
    "inverse_transform",
    "service_derivative",
    "service_second_derivative",
    "sigma_star",
    "stability_check",
    "path_from_inputs",
    "simulate_path",
    "interval_integrals",
    "simulate_star_path",
]
