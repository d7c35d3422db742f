# -*- coding: utf-8 -*-
"""Service and arrival models, streams and Lindley paths"""
import math

import numpy as np
import pytest

from gg1_ipa.pg_queue import (
    ArrivalModel,
    ServiceModel,
    inverse_transform,
    path_from_inputs,
    service_derivative,
    service_second_derivative,
    sigma_star,
    simulate_path,
    simulate_star_path,
    stability_check,
)
from gg1_ipa.pg_queue.models import default_warmup
from gg1_ipa.pg_queue.streams import draw_uniforms
from gg1_ipa.utils.ipa_errors import ModelError, UnstableInputError
from gg1_ipa.utils.objects import CustomerRecord, ParameterKind

THETA = ParameterKind.SERVICE_THETA


class TestModels:
    def test_inverse_transform_exponential_scale(self):
        model = ServiceModel("exponential-scale", theta_interval=(1.0, 3.0))
        assert inverse_transform(model, 0.5, 2.0) == pytest.approx(2.0 * math.log(2.0))

    def test_inverse_transform_rejects_non_uniform(self):
        model = ServiceModel("exponential-scale", theta_interval=(1.0, 3.0))
        with pytest.raises(ModelError):
            inverse_transform(model, 1.0, 2.0)

    def test_power_scale_derivatives(self):
        model = ServiceModel("exponential-scale", theta_interval=(0.5, 2.0), power=2.0)
        assert service_derivative(model, 3.0, 1.5) == pytest.approx(4.0)
        assert service_second_derivative(model, 3.0, 1.5) == pytest.approx(2.0 * 3.0 / 2.25)
        unit = ServiceModel("exponential-scale", theta_interval=(0.5, 2.0))
        assert service_derivative(unit, 3.0, 1.0) == pytest.approx(3.0)
        assert service_second_derivative(unit, 3.0, 1.0) == 0.0

    def test_general_family_derivative_by_cdf(self):
        # scipy expon with scale = 1/theta: sigma = eta / theta, d sigma / d theta = -sigma / theta
        model = ServiceModel(
            "general-inverse-cdf",
            theta_interval=(0.5, 2.0),
            distribution="expon",
            theta_param="scale",
            reciprocal=True,
        )
        assert service_derivative(model, 2.0, 1.0) == pytest.approx(-2.0, rel=1e-5)
        with pytest.raises(ModelError):
            service_second_derivative(model, 2.0, 1.0)

    def test_unknown_families(self):
        with pytest.raises(ModelError):
            ServiceModel("lognormal-scale", theta_interval=(1.0, 2.0))
        with pytest.raises(ModelError):
            ArrivalModel("batch")
        with pytest.raises(ModelError):
            ServiceModel("general-inverse-cdf", theta_interval=(1.0, 2.0), distribution="nope")

    def test_bad_scipy_arguments_are_model_errors(self):
        with pytest.raises(ModelError) as err:
            ArrivalModel("renewal-general", distribution="expon", dist_params={"bogus": 1.0})
        assert err.value.field == "params"
        with pytest.raises(ModelError) as err:
            ServiceModel(
                "general-inverse-cdf",
                theta_interval=(0.5, 2.0),
                distribution="gamma",
                dist_params={"a": -1.0},
            )
        assert err.value.field == "params"
        with pytest.raises(ModelError) as err:
            ServiceModel(
                "general-inverse-cdf",
                theta_interval=(0.5, 2.0),
                distribution="expon",
                theta_param="rate",
            )
        assert err.value.field == "theta_param"

    def test_weibull_mean(self):
        model = ServiceModel("weibull-scale", theta_interval=(1.0, 2.0), shape=2.0)
        assert model.mean(2.0) == pytest.approx(2.0 * math.gamma(1.5))

    def test_sigma_star_dominates_on_the_interval(self):
        model = ServiceModel("exponential-scale", theta_interval=(0.5, 1.5))
        xi = draw_uniforms(3, 0, 1, 100)
        star = sigma_star(model, xi)
        for theta in np.linspace(0.5, 1.5, 5):
            assert np.all(star >= inverse_transform(model, xi, theta))

    def test_arrival_intensity_and_density(self):
        poisson = ArrivalModel("poisson", rate=0.5)
        assert poisson.intensity(2.0) == pytest.approx(0.25)
        assert poisson.density(0.0) == pytest.approx(0.5)
        assert ArrivalModel("deterministic", rate=2.0).density(0.5) == 0.0
        with pytest.raises(ModelError):
            poisson.intensity(0.0)


class TestStability:
    def test_scale_family_load_uses_the_top_of_the_interval(self, mm1_models):
        arrivals, services = mm1_models
        report = stability_check(arrivals, services, (0.5, 1.5))
        assert report.load_estimate == pytest.approx(0.75)
        assert report.stable
        assert not stability_check(arrivals, services, (0.5, 2.5)).stable

    def test_speed_and_arrival_scale_loads(self, mm1_models):
        arrivals, services = mm1_models
        speed = stability_check(arrivals, services, (0.8, 1.2), parameter_kind=ParameterKind.SPEED_NU)
        assert speed.load_estimate == pytest.approx(0.5 / 0.8)
        alpha = stability_check(
            arrivals, services, (0.8, 1.2), parameter_kind=ParameterKind.ARRIVAL_ALPHA
        )
        assert alpha.load_estimate == pytest.approx(0.5 / 0.8)

    def test_general_family_is_probed(self):
        arrivals = ArrivalModel("poisson", rate=0.5)
        services = ServiceModel(
            "general-inverse-cdf", theta_interval=(0.5, 1.0), distribution="expon"
        )
        report = stability_check(arrivals, services, (0.5, 1.0), n_probe=20000, seed=5)
        assert report.std_error > 0
        assert abs(report.load_estimate - 0.5) < 5 * report.std_error

    def test_probe_needs_enough_draws(self, mm1_models):
        arrivals, services = mm1_models
        with pytest.raises(ModelError):
            stability_check(arrivals, services, (0.5, 1.5), n_probe=10)

    def test_default_warmup(self):
        assert default_warmup(0.5, 10.0, 1000) == 40
        assert default_warmup(0.999, 10.0, 1000) == 1000
        assert default_warmup(1.2, 10.0, 1000) == 1000


class TestLindley:
    def test_hand_computed_workloads(self):
        path = path_from_inputs([2.0, 4.0], [3.0, 3.0])
        np.testing.assert_array_equal(path.w, [0.0, 0.0])
        np.testing.assert_array_equal(path.w_next, [0.0, 1.0])
        np.testing.assert_array_equal(path.idle_before, [True, True])
        np.testing.assert_array_equal(path.busy_time, [2.0, 3.0])

    def test_theta_derivative_restarts_after_idle(self):
        path = path_from_inputs(
            [1.0, 1.0, 1.0], [0.5, 0.5, 5.0], d_sigma=[1.0, 1.0, 1.0], d2_sigma=[0.0] * 3
        )
        np.testing.assert_array_equal(path.w, [0.0, 0.5, 1.0])
        np.testing.assert_array_equal(path.d, [1.0, 2.0, 3.0])
        np.testing.assert_array_equal(path.d_next, [1.0, 2.0, 0.0])
        np.testing.assert_array_equal(path.d_before, [0.0, 1.0, 2.0])
        assert path.has_d2

    def test_speed_derivative_recursion(self):
        path = path_from_inputs(
            [1.0, 1.0, 1.0], [0.5, 0.5, 5.0], parameter_kind=ParameterKind.SPEED_NU
        )
        np.testing.assert_array_equal(path.d, [0.0, -0.5, -1.0])
        np.testing.assert_array_equal(path.d_next, [-0.5, -1.0, 0.0])
        # W'(T_{k+1}-) is W'(T_{k+1}) while the server stays busy
        busy = path.w_next[:-1] > 0
        np.testing.assert_array_equal(path.d[1:][busy], path.d_next[:-1][busy])

    def test_without_second_derivatives(self):
        path = path_from_inputs([1.0], [2.0])
        assert not path.has_d2
        assert np.isnan(path.d2).all()

    def test_bad_inputs(self):
        with pytest.raises(ModelError):
            path_from_inputs([1.0], [0.0])
        with pytest.raises(ModelError):
            path_from_inputs([1.0, 2.0], [1.0])
        with pytest.raises(ModelError):
            path_from_inputs([-1.0], [1.0])

    def test_seeded_paths_are_reproducible(self, mm1_models):
        arrivals, services = mm1_models
        a = simulate_path(arrivals, services, THETA, 1.0, 500, seed=3)
        b = simulate_path(arrivals, services, THETA, 1.0, 500, seed=3)
        c = simulate_path(arrivals, services, THETA, 1.0, 500, seed=3, replication=1)
        np.testing.assert_array_equal(a.w, b.w)
        np.testing.assert_array_equal(a.d, b.d)
        assert not np.array_equal(a.w, c.w)

    def test_common_random_numbers_across_parameters(self, mm1_models):
        arrivals, services = mm1_models
        lo = simulate_path(arrivals, services, THETA, 0.9, 500, seed=3)
        hi = simulate_path(arrivals, services, THETA, 1.1, 500, seed=3)
        np.testing.assert_array_equal(lo.tau, hi.tau)
        np.testing.assert_allclose(lo.sigma / 0.9, hi.sigma / 1.1)

    def test_monotone_coupling_and_domination(self, mm1_models):
        arrivals, services = mm1_models
        n = 2000
        star = simulate_star_path(arrivals, services, n, seed=4)
        previous = None
        for theta in np.linspace(0.5, 1.5, 5):
            path = simulate_path(arrivals, services, THETA, theta, n, seed=4, check_load=False)
            assert np.all(star.w >= path.w)
            if previous is not None:
                assert np.all(path.w >= previous.w)
            previous = path

    def test_derivative_signs(self, mm1_models):
        arrivals, services = mm1_models
        for seed in range(5):
            path = simulate_path(arrivals, services, THETA, 1.0, 2000, seed=seed)
            assert np.all(path.d >= 0.0) and np.all(path.d_next >= 0.0)
            for kind in (ParameterKind.SPEED_NU, ParameterKind.ARRIVAL_ALPHA):
                path = simulate_path(arrivals, services, kind, 1.2, 2000, seed=seed)
                assert np.all(path.d <= 0.0) and np.all(path.d_next <= 0.0)

    def test_workload_is_lipschitz_in_theta(self, mm1_models):
        # W(T_k) is convex in theta, so its increment lies between the end slopes
        arrivals, services = mm1_models
        lo_theta, hi_theta = 0.9, 1.0
        lo = simulate_path(arrivals, services, THETA, lo_theta, 2000, seed=6)
        hi = simulate_path(arrivals, services, THETA, hi_theta, 2000, seed=6)
        step = hi_theta - lo_theta
        increment = hi.w_after - lo.w_after
        assert np.all(increment >= step * lo.d - 1e-9)
        assert np.all(increment <= step * hi.d + 1e-9)

    def test_warmup_is_discarded(self, mm1_models):
        arrivals, services = mm1_models
        full = simulate_path(arrivals, services, THETA, 1.0, 600, seed=8)
        kept = simulate_path(arrivals, services, THETA, 1.0, 500, seed=8, warmup=100)
        assert kept.n == 500
        np.testing.assert_array_equal(kept.w, full.w[100:])

    def test_exact_and_empirical_intensity(self, mm1_models):
        arrivals, services = mm1_models
        path = simulate_path(arrivals, services, THETA, 1.0, 100, seed=1)
        assert path.lambda_exact and path.lambda_hat == 0.5
        renewal = ArrivalModel("renewal-general", distribution="uniform", dist_params={"scale": 4.0})
        path = simulate_path(renewal, services, THETA, 1.0, 100, seed=1)
        assert not path.lambda_exact
        assert path.lambda_hat == pytest.approx(path.n / path.elapsed)

    def test_unstable_path_is_rejected(self):
        arrivals = ArrivalModel("deterministic", rate=1.0)
        services = ServiceModel("deterministic-scale", theta_interval=(1.0, 2.0))
        with pytest.raises(UnstableInputError):
            simulate_path(arrivals, services, THETA, 1.5, 1000, seed=0)
        path = simulate_path(arrivals, services, THETA, 1.5, 1000, seed=0, check_load=False)
        assert path.w_next[-1] == pytest.approx(500.0)

    def test_horizon_must_be_positive(self, mm1_models):
        arrivals, services = mm1_models
        with pytest.raises(ModelError):
            simulate_path(arrivals, services, THETA, 1.0, 0, seed=0)

    def test_records_and_frame(self, mm1_models):
        arrivals, services = mm1_models
        path = simulate_path(arrivals, services, THETA, 1.0, 50, seed=2)
        records = list(path.records())
        assert len(records) == 50
        assert isinstance(records[0], CustomerRecord)
        assert records[0].idle_before
        frame = path.to_frame()
        assert len(frame) == 50
        assert frame["w"].tolist() == path.w.tolist()
