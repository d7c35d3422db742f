# -*- coding: utf-8 -*-
"""Customer-average IPA estimators"""
import math

import numpy as np
import pytest

from gg1_ipa.pg_estimator import (
    arrival_scale_derivative,
    batch_means,
    classic_ipa,
    first_order,
    second_order,
    speed_derivative,
    t_interval,
    tail_probability_derivative,
)
from gg1_ipa.pg_estimator.ipa_estimator import SHIFTED
from gg1_ipa.pg_functional import identity, indicator, polynomial, ramp
from gg1_ipa.pg_queue import (
    ArrivalModel,
    ServiceModel,
    interval_integrals,
    path_from_inputs,
    simulate_path,
)
from gg1_ipa.pg_oracle import mm1_workload_moments
from gg1_ipa.utils.ipa_errors import EstimationError, OneSidedDerivativeError
from gg1_ipa.utils.objects import Order, ParameterKind, Side

THETA = ParameterKind.SERVICE_THETA
NU = ParameterKind.SPEED_NU
ALPHA = ParameterKind.ARRIVAL_ALPHA


def _pooled(estimates):
    values = np.array([e.value for e in estimates])
    return values.mean(), values.std(ddof=1) / math.sqrt(values.size)


class TestDeterministicQueue:
    """D/D/1 with tau = 1: every value below is exact"""

    @pytest.mark.parametrize(
        "theta, right, left",
        [(0.5, 1.0, 1.0), (0.3, 1.0, 0.0)],
    )
    def test_tail_indicator_one_sided(self, dd1_models, theta, right, left):
        arrivals, services = dd1_models
        path = simulate_path(arrivals, services, THETA, theta, 1000, seed=1)
        f = indicator(0.3)
        assert first_order(path, f, Side.RIGHT).value == right
        assert first_order(path, f, Side.LEFT).value == left

    def test_two_sided_request_on_an_atom_hit(self, dd1_models):
        arrivals, services = dd1_models
        path = simulate_path(arrivals, services, THETA, 0.3, 1000, seed=1)
        with pytest.raises(OneSidedDerivativeError) as err:
            first_order(path, indicator(0.3), Side.TWO_SIDED)
        assert err.value.left == pytest.approx(1.0)
        assert err.value.right == 0.0

    def test_mean_workload(self, dd1_models):
        arrivals, services = dd1_models
        path = simulate_path(arrivals, services, THETA, 0.5, 1000, seed=1)
        assert first_order(path, identity(), Side.TWO_SIDED).value == pytest.approx(0.5)
        assert classic_ipa(path, identity()).value == pytest.approx(0.5)

    def test_speed(self, dd1_models):
        arrivals, services = dd1_models
        path = simulate_path(arrivals, services, NU, 1.0, 1000, seed=1)
        assert speed_derivative(path, identity()).value == pytest.approx(-0.125)

    @pytest.mark.parametrize("alpha, expected", [(1.0, -0.125), (2.0, -0.03125)])
    def test_arrival_scale(self, dd1_models, alpha, expected):
        arrivals, services = dd1_models
        path = simulate_path(arrivals, services, ALPHA, alpha, 1000, seed=1)
        assert path.lambda_hat == pytest.approx(1.0 / alpha)
        assert arrival_scale_derivative(path, identity()).value == pytest.approx(expected)


class TestAtomHitsOffTheServiceParameter:
    """
    Alternating path: a customer with sigma = 1 waits 0.75 for the next one,
    which finds W = 0.25 exactly, adds 0.25 and is followed by 1.5 of
    slack. With f = 1{w >= 0.25} the second arrival sits on the atom, so the
    speed and arrival-scale derivatives differ by side.
    """

    PERIODS = 50
    X = 0.25
    SIGMA = np.tile([1.0, 0.25], PERIODS)
    ETA = np.tile([0.75, 1.5], PERIODS)
    # time with W >= 0.25 per period is 1.75 / p - 0.75 above p = 1 and 1 / p below
    RIGHT = -1.75 / 2.25
    LEFT = -1.0 / 2.25

    def _path(self, kind, p):
        if kind == NU:
            return path_from_inputs(self.SIGMA, self.ETA, NU, p)
        return path_from_inputs(
            self.SIGMA, p * self.ETA, ALPHA, p, eta=self.ETA, arrival_scale=p
        )

    def _difference(self, kind, h):
        """Exact one-sided difference quotient of the time average of f(W)"""
        f = indicator(self.X)

        def value(p):
            path = self._path(kind, p)
            return path.lambda_hat * float(interval_integrals(path, f).mean())

        return (value(1.0 + h) - value(1.0)) / h, (value(1.0) - value(1.0 - h)) / h

    @pytest.mark.parametrize(
        "kind, estimator", [(NU, speed_derivative), (ALPHA, arrival_scale_derivative)]
    )
    def test_sides_differ_on_the_atom(self, kind, estimator):
        path = self._path(kind, 1.0)
        f = indicator(self.X)
        right = estimator(path, f, Side.RIGHT)
        left = estimator(path, f, Side.LEFT)
        assert right.value == pytest.approx(self.RIGHT)
        assert left.value == pytest.approx(self.LEFT)
        assert right.value - left.value == pytest.approx(
            left.atom_correction - right.atom_correction
        )
        fd_right, fd_left = self._difference(kind, 1e-6)
        assert right.value == pytest.approx(fd_right, rel=1e-4)
        assert left.value == pytest.approx(fd_left, rel=1e-4)

    @pytest.mark.parametrize(
        "kind, estimator", [(NU, speed_derivative), (ALPHA, arrival_scale_derivative)]
    )
    def test_two_sided_request_on_the_atom(self, kind, estimator):
        with pytest.raises(OneSidedDerivativeError):
            estimator(self._path(kind, 1.0), indicator(self.X), Side.TWO_SIDED)


class TestPathProperties:
    @pytest.fixture
    def path(self, mm1_models):
        arrivals, services = mm1_models
        return simulate_path(arrivals, services, THETA, 1.0, 5000, seed=21)

    def test_estimate_carries_its_metadata(self, path):
        est = first_order(path, identity())
        assert est.n_customers == 5000
        assert est.side == Side.RIGHT
        assert est.order == Order.FIRST
        assert est.parameter_kind == THETA
        assert est.ci_lo < est.value < est.ci_hi
        assert est.std_error > 0

    def test_linearity(self, path):
        f, g = identity(), ramp(1.0)
        combined = first_order(path, 2.0 * f + g).value
        assert combined == pytest.approx(
            2.0 * first_order(path, f).value + first_order(path, g).value, rel=1e-9
        )

    def test_one_sided_consistency(self, path):
        f = indicator(0.7) + ramp(0.2)
        right = first_order(path, f, Side.RIGHT)
        left = first_order(path, f, Side.LEFT)
        assert right.value - left.value == pytest.approx(
            left.atom_correction - right.atom_correction, abs=1e-12
        )

    def test_tail_estimator_matches_indicator_functional(self, path):
        for side in (Side.RIGHT, Side.LEFT):
            tail = tail_probability_derivative(path, 1.0, side)
            generic = first_order(path, indicator(1.0), side)
            assert tail.value == generic.value
            assert tail.atom_correction == generic.atom_correction

    def test_continuous_workload_gives_equal_sides(self, path):
        right = tail_probability_derivative(path, 1.0, Side.RIGHT)
        left = tail_probability_derivative(path, 1.0, Side.LEFT)
        assert right.value == left.value

    def test_shifted_pairing_differs_by_a_boundary_term(self, path):
        f = polynomial([0.0, 0.0, 0.5])
        standard = first_order(path, f)
        shifted = first_order(path, f, pairing=SHIFTED)
        boundary = path.lambda_hat * path.d_next[-1] * f.shape(path.w_next[-1]) / path.n
        assert shifted.value - standard.value == pytest.approx(boundary, abs=1e-9)

    def test_shifted_pairing_rejects_atoms(self, path):
        with pytest.raises(EstimationError):
            first_order(path, indicator(1.0), pairing=SHIFTED)

    def test_second_order_without_coalescence_vanishes_for_identity(self, path):
        est = second_order(path, identity(), coalescence=False)
        assert est.value == 0.0
        assert est.order == Order.SECOND

    def test_second_order_reports_coalescence_separately(self, path):
        est = second_order(path, identity())
        assert est.coalescence_correction == pytest.approx(est.value)

    def test_second_order_rejects_atoms(self, path):
        with pytest.raises(EstimationError):
            second_order(path, indicator(1.0))

    def test_wrong_parameter_kind(self, path):
        with pytest.raises(EstimationError):
            speed_derivative(path, identity())
        with pytest.raises(EstimationError):
            arrival_scale_derivative(path, identity())

    def test_tail_threshold_must_be_positive(self, path):
        with pytest.raises(EstimationError):
            tail_probability_derivative(path, 0.0)


class TestBatchMeans:
    def test_constant_series_has_zero_error(self):
        value, se, count = batch_means(np.full(1000, 2.0), 10)
        assert (value, se, count) == (2.0, 0.0, 10)

    def test_short_series_uses_fewer_batches(self):
        _, se, count = batch_means(np.array([1.0]), 64)
        assert count == 1
        assert math.isnan(se)
        assert all(math.isnan(v) for v in t_interval(1.0, se, count))

    def test_t_interval_is_symmetric(self):
        lo, hi = t_interval(1.0, 0.1, 10, 0.95)
        assert 1.0 - lo == pytest.approx(hi - 1.0)
        assert hi - 1.0 == pytest.approx(0.1 * 2.2621571627, rel=1e-6)


@pytest.mark.slow
class TestMM1Acceptance:
    """lambda = 0.5, exponential services with mean theta = 1"""

    N = 1_000_000
    REPLICATIONS = 10

    @pytest.fixture
    def arrivals(self):
        return ArrivalModel("poisson", rate=0.5)

    def _paths(self, arrivals, services, kind, value):
        return [
            simulate_path(arrivals, services, kind, value, self.N, seed=2024, warmup=1000, replication=r)
            for r in range(self.REPLICATIONS)
        ]

    def test_mean_workload_derivative(self, arrivals, mm1_models):
        _, services = mm1_models
        paths = self._paths(arrivals, services, THETA, 1.0)
        value, se = _pooled([first_order(p, identity()) for p in paths])
        assert abs(value - 3.0) <= 3 * se

    def test_tail_probability_derivative(self, arrivals, mm1_models):
        _, services = mm1_models
        paths = self._paths(arrivals, services, THETA, 1.0)
        expected = mm1_workload_moments(0.5, 1.0).d_tail_dtheta(1.0)
        assert expected == pytest.approx(math.exp(-0.5))
        right = [tail_probability_derivative(p, 1.0, Side.RIGHT) for p in paths]
        left = [tail_probability_derivative(p, 1.0, Side.LEFT) for p in paths]
        assert [r.value for r in right] == [l.value for l in left]
        value, se = _pooled(right)
        assert abs(value - expected) <= 3 * se

    def test_second_order(self, arrivals, mm1_models):
        _, services = mm1_models
        paths = self._paths(arrivals, services, THETA, 1.0)
        value, se = _pooled([second_order(p, identity()) for p in paths])
        assert abs(value - 8.0) <= 3 * se
        value, se = _pooled([second_order(p, polynomial([0.0, 0.0, 0.5])) for p in paths])
        assert abs(value - 48.0) <= 3 * se

    def test_speed(self, arrivals):
        services = ServiceModel("exponential-scale", theta_interval=(1.0, 1.0), theta=1.0)
        paths = self._paths(arrivals, services, NU, 1.0)
        value, se = _pooled([speed_derivative(p, identity()) for p in paths])
        assert abs(value - (-2.0)) <= 3 * se

    def test_arrival_scale(self):
        arrivals = ArrivalModel("poisson", rate=1.0)
        services = ServiceModel("exponential-scale", theta_interval=(1.0, 1.0), theta=1.0)
        paths = self._paths(arrivals, services, ALPHA, 2.0)
        value, se = _pooled([arrival_scale_derivative(p, identity()) for p in paths])
        assert abs(value - (-1.0)) <= 3 * se
