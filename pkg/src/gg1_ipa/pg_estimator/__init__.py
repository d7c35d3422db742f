# -*- coding: utf-8 -*-
"""IPA estimators and output analysis"""
from gg1_ipa.pg_estimator.batch_means import batch_means, batch_std_error, t_interval
from gg1_ipa.pg_estimator.ipa_estimator import (
    arrival_scale_derivative,
    classic_ipa,
    first_order,
    second_order,
    speed_derivative,
    tail_probability_derivative,
)

__all__ = [
    "arrival_scale_derivative",
    "batch_means",
    "batch_std_error",
    "classic_ipa",
    "first_order",
    "second_order",
    "speed_derivative",
    "t_interval",
    "tail_probability_derivative",
]
