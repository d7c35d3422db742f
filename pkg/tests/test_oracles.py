# -*- coding: utf-8 -*-
"""Closed forms and the finite-difference oracle"""
import math

import numpy as np
import pytest

from gg1_ipa.pg_experiment.ipa_config import build_config
from gg1_ipa.pg_oracle import (
    analytic_derivative,
    dd1_closed_forms,
    finite_difference,
    mm1_workload_moments,
    stencil_points,
    stencil_quotient,
)
from gg1_ipa.pg_queue import ArrivalModel, ServiceModel
from gg1_ipa.utils.ipa_errors import ModelError, UnstableInputError
from gg1_ipa.utils.objects import ParameterKind, Side, Stencil

POISSON = ArrivalModel("poisson", rate=0.5)
EXPONENTIAL = ServiceModel("exponential-scale", theta_interval=(0.5, 1.5), theta=1.0)
IDENTITY = {"type": "identity"}
HALF_SQUARE = {"type": "polynomial", "coefficients": [0.0, 0.0, 0.5]}


class TestMM1:
    def test_moments(self):
        mm1 = mm1_workload_moments(0.5, 1.0)
        assert mm1.rho == 0.5
        assert mm1.mean == pytest.approx(1.0)
        assert mm1.d_mean_dtheta == pytest.approx(3.0)
        assert mm1.d2_mean_dtheta2 == pytest.approx(8.0)
        assert mm1.half_second_moment == pytest.approx(2.0)
        assert mm1.d_half_second_moment == pytest.approx(10.0)
        assert mm1.d2_half_second_moment == pytest.approx(48.0)
        assert mm1.d_mean_dlambda == pytest.approx(4.0)

    def test_tail(self):
        mm1 = mm1_workload_moments(0.5, 1.0)
        assert mm1.tail(1.0) == pytest.approx(0.5 * math.exp(-0.5))
        assert mm1.d_tail_dtheta(1.0) == pytest.approx(math.exp(-0.5))

    def test_derivatives_match_difference_quotients(self):
        h = 1e-6
        lo, hi = mm1_workload_moments(0.5, 1.0 - h), mm1_workload_moments(0.5, 1.0 + h)
        assert (hi.mean - lo.mean) / (2 * h) == pytest.approx(3.0, rel=1e-6)
        assert (hi.tail(1.0) - lo.tail(1.0)) / (2 * h) == pytest.approx(math.exp(-0.5), rel=1e-6)
        lo, hi = mm1_workload_moments(0.5 - h, 1.0), mm1_workload_moments(0.5 + h, 1.0)
        assert (hi.tail(1.0) - lo.tail(1.0)) / (2 * h) == pytest.approx(
            mm1_workload_moments(0.5, 1.0).d_tail_dlambda(1.0), rel=1e-6
        )

    def test_unstable(self):
        with pytest.raises(UnstableInputError):
            mm1_workload_moments(1.0, 1.0)


class TestDD1:
    def test_example_values(self):
        at_half = dd1_closed_forms(1.0, 0.5, 0.3)
        assert (at_half.Jr, at_half.Jl) == (1.0, 1.0)
        at_knee = dd1_closed_forms(1.0, 0.3, 0.3)
        assert (at_knee.Jr, at_knee.Jl) == (1.0, 0.0)
        assert at_half.J == pytest.approx(0.2)
        assert at_half.mean_workload == pytest.approx(0.125)

    def test_unstable(self):
        with pytest.raises(UnstableInputError):
            dd1_closed_forms(1.0, 1.0, 0.3)


class TestAnalyticDerivative:
    def test_service_theta(self):
        kind = ParameterKind.SERVICE_THETA
        assert analytic_derivative(POISSON, EXPONENTIAL, kind, 1.0, IDENTITY) == pytest.approx(3.0)
        assert analytic_derivative(
            POISSON, EXPONENTIAL, kind, 1.0, IDENTITY, order=2
        ) == pytest.approx(8.0)
        assert analytic_derivative(
            POISSON, EXPONENTIAL, kind, 1.0, HALF_SQUARE, order=2
        ) == pytest.approx(48.0)
        tail = {"type": "indicator", "threshold": 1.0}
        assert analytic_derivative(POISSON, EXPONENTIAL, kind, 1.0, tail) == pytest.approx(
            math.exp(-0.5)
        )

    def test_speed_and_arrival_scale(self):
        assert analytic_derivative(
            POISSON, EXPONENTIAL, ParameterKind.SPEED_NU, 1.0, IDENTITY
        ) == pytest.approx(-2.0)
        unit_rate = ArrivalModel("poisson", rate=1.0)
        assert analytic_derivative(
            unit_rate, EXPONENTIAL, ParameterKind.ARRIVAL_ALPHA, 2.0, IDENTITY
        ) == pytest.approx(-1.0)

    def test_speed_tail_matches_difference_quotient(self):
        tail = {"type": "indicator", "threshold": 1.0}

        def prob(nu):
            # W = nu V with V the workload of an M/M/1 with mean service 1/nu
            return mm1_workload_moments(0.5, 1.0 / nu).tail(1.0 / nu)

        h = 1e-6
        expected = (prob(1.0 + h) - prob(1.0 - h)) / (2 * h)
        value = analytic_derivative(POISSON, EXPONENTIAL, ParameterKind.SPEED_NU, 1.0, tail)
        assert value == pytest.approx(expected, rel=1e-6)

    def test_deterministic_queue(self):
        arrivals = ArrivalModel("deterministic", rate=1.0)
        services = ServiceModel("deterministic-scale", theta_interval=(0.2, 0.6), theta=0.5)
        tail = {"type": "indicator", "threshold": 0.3}
        kind = ParameterKind.SERVICE_THETA
        assert analytic_derivative(arrivals, services, kind, 0.3, tail, side=Side.RIGHT) == 1.0
        assert analytic_derivative(arrivals, services, kind, 0.3, tail, side=Side.LEFT) == 0.0
        assert analytic_derivative(
            arrivals, services, ParameterKind.SPEED_NU, 1.0, IDENTITY
        ) == pytest.approx(-0.125)

    def test_no_closed_form(self):
        ramp = {"type": "ramp", "knee": 1.0}
        assert analytic_derivative(
            POISSON, EXPONENTIAL, ParameterKind.SERVICE_THETA, 1.0, ramp
        ) is None
        weibull = ServiceModel("weibull-scale", theta_interval=(0.5, 1.5), shape=2.0)
        assert analytic_derivative(
            POISSON, weibull, ParameterKind.SERVICE_THETA, 1.0, IDENTITY
        ) is None


class TestStencils:
    def test_points(self):
        assert stencil_points(1.0, 0.1, Stencil.CENTRAL) == pytest.approx((0.9, 1.1))
        assert stencil_points(1.0, 0.1, Stencil.SECOND_CENTRAL) == pytest.approx((1.0, 1.1, 1.2))

    @pytest.mark.parametrize(
        "stencil, expected",
        [
            (Stencil.CENTRAL, 2.0),
            (Stencil.SECOND_CENTRAL, 2.0),
            (Stencil.SECOND_SYMMETRIC, 2.0),
        ],
    )
    def test_quadratic_is_exact(self, stencil, expected):
        h = 0.125
        values = [p**2 for p in stencil_points(1.0, h, stencil)]
        assert stencil_quotient(values, h, stencil) == pytest.approx(expected)

    def test_value_count(self):
        with pytest.raises(ValueError):
            stencil_quotient([1.0], 0.1, Stencil.CENTRAL)


class TestFiniteDifference:
    def _config(self, dd1_config, **changes):
        raw = {**dd1_config, "functional": {"type": "identity"}, "oracles": [], **changes}
        raw["parameter"] = {**raw["parameter"], "value": 0.5}
        config, report = build_config(raw)
        assert report.ok, report.errors
        return config

    def test_deterministic_mean_workload(self, dd1_config):
        config = self._config(dd1_config)
        fd = finite_difference(config, h=0.05, stencil=Stencil.CENTRAL)
        assert fd.value == pytest.approx(0.5, abs=1e-9)
        assert fd.crn
        assert fd.n_customers == 1000

    def test_independent_streams(self, dd1_config):
        config = self._config(dd1_config)
        fd = finite_difference(config, h=0.05, crn=False)
        assert fd.value == pytest.approx(0.5, abs=1e-9)
        assert not fd.crn

    def test_second_difference(self, dd1_config):
        config = self._config(dd1_config)
        fd = finite_difference(config, h=0.02, stencil=Stencil.SECOND_SYMMETRIC)
        # J = theta^2 / 2
        assert fd.value == pytest.approx(1.0, rel=1e-6)

    def test_stencil_must_stay_in_the_interval(self, dd1_config):
        config = self._config(dd1_config)
        with pytest.raises(ModelError):
            finite_difference(config, h=0.2)


def test_constant_term_does_not_change_the_derivative():
    kind = ParameterKind.SERVICE_THETA
    shifted = {"type": "polynomial", "coefficients": [2.0, 1.0]}
    assert analytic_derivative(POISSON, EXPONENTIAL, kind, 1.0, shifted) == pytest.approx(3.0)
    shifted_square = {"type": "polynomial", "coefficients": [1.0, 0.0, 0.5]}
    assert analytic_derivative(
        POISSON, EXPONENTIAL, kind, 1.0, shifted_square, order=2
    ) == pytest.approx(48.0)


def test_common_random_numbers_reduce_the_variance(mm1_config):
    config, report = build_config({**mm1_config, "horizon": 2000})
    assert report.ok, report.errors
    crn, independent = [], []
    for rep in range(30):
        crn.append(finite_difference(config, h=0.05, crn=True, replication=rep).value)
        independent.append(finite_difference(config, h=0.05, crn=False, replication=rep).value)
    assert np.var(crn, ddof=1) <= np.var(independent, ddof=1)


def test_central_difference_error_is_quadratic_in_h(dd1_config):
    # D/D/1 with tau = 1 and f(w) = w^2 / 2: J = theta^3 / 6, J' = theta^2 / 2
    raw = {**dd1_config, "functional": HALF_SQUARE, "oracles": []}
    raw["parameter"] = {**raw["parameter"], "value": 0.5}
    config, report = build_config(raw)
    assert report.ok, report.errors
    exact = 0.125
    coarse = finite_difference(config, h=0.08).value - exact
    fine = finite_difference(config, h=0.04).value - exact
    # the error of the central quotient of a cubic is h^2 / 6
    assert coarse == pytest.approx(0.08**2 / 6, rel=1e-6)
    assert coarse / fine == pytest.approx(4.0, rel=1e-6)
