# -*- coding: utf-8 -*-
"""
Service and arrival models.

Service times are built by inverse transform, sigma = G(xi, theta), so that
every parameter value is driven by the same uniforms. Inter-arrival times are
tau = alpha * eta where eta is the unit-scale inter-arrival time.
"""
from dataclasses import dataclass, field, replace
from math import gamma
from typing import Dict, Tuple, Union

import numpy as np
import scipy.stats
from loguru import logger

from gg1_ipa.pg_queue.streams import PROBE_STREAM, draw_uniforms
from gg1_ipa.utils.constants import (
    IPA_CDF_THETA_STEP,
    IPA_MIN_STABILITY_PROBE,
    IPA_STABILITY_GRID_POINTS,
)
from gg1_ipa.utils.ipa_errors import ModelError
from gg1_ipa.utils.objects import ParameterKind, StabilityReport

EXPONENTIAL_SCALE = "exponential-scale"
DETERMINISTIC_SCALE = "deterministic-scale"
WEIBULL_SCALE = "weibull-scale"
GENERAL_INVERSE_CDF = "general-inverse-cdf"
SCALE_FAMILIES = (EXPONENTIAL_SCALE, DETERMINISTIC_SCALE, WEIBULL_SCALE)
SERVICE_FAMILIES = SCALE_FAMILIES + (GENERAL_INVERSE_CDF,)

POISSON = "poisson"
DETERMINISTIC = "deterministic"
RENEWAL_GENERAL = "renewal-general"
ARRIVAL_FAMILIES = (POISSON, DETERMINISTIC, RENEWAL_GENERAL)

Real = Union[float, np.ndarray]


def _scipy_distribution(name: str):
    dist = getattr(scipy.stats, name, None)
    if dist is None or not hasattr(dist, "ppf"):
        raise ModelError(f"unknown scipy.stats distribution: {name}", "distribution")
    return dist


def _freeze(name: str, params: Dict[str, float], field: str = "params"):
    """Frozen scipy distribution; bad arguments surface as ModelError"""
    dist = _scipy_distribution(name)
    try:
        frozen = dist(**params)
        median = frozen.ppf(0.5)
    except (TypeError, ValueError) as err:
        raise ModelError(f"{name}: {err}", field) from err
    if not np.isfinite(median):
        raise ModelError(f"{name}: invalid parameters {params}", field)
    return frozen


@dataclass(frozen=True)
class ServiceModel:
    """
    Parametrized service-time distribution.

    Scale families draw sigma = theta**power * eta(xi) with eta exponential,
    deterministic (eta = 1) or Weibull with the given shape. The general
    family delegates to a scipy.stats distribution whose parameter
    ``theta_param`` is set to theta (or 1/theta when ``reciprocal``).
    """

    family: str
    theta_interval: Tuple[float, float]
    theta: float = 1.0
    power: float = 1.0
    shape: float = 1.0
    distribution: str = ""
    theta_param: str = "scale"
    reciprocal: bool = False
    dist_params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in SERVICE_FAMILIES:
            raise ModelError(f"unknown service family: {self.family}")
        lo, hi = self.theta_interval
        if not lo <= hi:
            raise ModelError(f"theta interval must be ordered, got [{lo}, {hi}]")
        if self.is_scale and lo <= 0:
            raise ModelError("scale families need theta > 0 on the whole interval")
        if self.family == WEIBULL_SCALE and self.shape <= 0:
            raise ModelError("weibull shape must be > 0")
        if self.family == GENERAL_INVERSE_CDF:
            if self.reciprocal and lo <= 0:
                raise ModelError("reciprocal theta needs theta > 0", "theta_param")
            dist =_scipy_distribution(self.distribution)
            names = {"loc", "scale", *(dist.shapes or "").replace(",", " ").split()}
            field_name = "params" if self.theta_param in names else "theta_param"
            for theta in (lo, self.theta, hi):
                _freeze(self.distribution, self._params(theta), field_name)

    @property
    def is_scale(self) -> bool:
        return self.family in SCALE_FAMILIES

    def _params(self, theta: float) -> Dict[str, float]:
        params = dict(self.dist_params)
        params[self.theta_param] = 1.0 / theta if self.reciprocal else theta
        return params

    def frozen(self, theta: float):
        """scipy frozen distribution at theta (general family)"""
        return _freeze(self.distribution, self._params(theta))

    def base_sample(self, xi: Real) -> Real:
        """eta(xi) of a scale family"""
        if self.family == EXPONENTIAL_SCALE:
            return -np.log1p(-xi)
        if self.family == DETERMINISTIC_SCALE:
            return np.ones_like(xi, dtype=float) if np.ndim(xi) else 1.0
        if self.family == WEIBULL_SCALE:
            return (-np.log1p(-xi)) ** (1.0 / self.shape)
        raise ModelError(f"{self.family} is not a scale family")

    def base_mean(self) -> float:
        """E eta of a scale family"""
        if self.family == WEIBULL_SCALE:
            return gamma(1.0 + 1.0 / self.shape)
        return 1.0

    def mean(self, theta: float) -> float:
        """E sigma(theta)"""
        if self.is_scale:
            return theta**self.power * self.base_mean()
        return float(self.frozen(theta).mean())


@dataclass(frozen=True)
class ArrivalModel:
    """
    Renewal arrival stream.

    ``rate`` is the intensity at unit scale for poisson and deterministic
    arrivals; renewal-general draws eta from a scipy.stats distribution.
    """

    family: str
    rate: float = 1.0
    distribution: str = ""
    dist_params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in ARRIVAL_FAMILIES:
            raise ModelError(f"unknown arrival family: {self.family}")
        if self.family != RENEWAL_GENERAL and self.rate <= 0:
            raise ModelError("arrival rate must be > 0")
        if self.family == RENEWAL_GENERAL:
            _freeze(self.distribution, self.dist_params)

    @property
    def exact_intensity(self) -> bool:
        """Whether lambda is known in closed form"""
        return self.family in (POISSON, DETERMINISTIC)

    def frozen(self):
        return _freeze(self.distribution, self.dist_params)

    def eta(self, u: Real) -> Real:
        """Unit-scale inter-arrival time from a uniform"""
        if self.family == POISSON:
            return -np.log1p(-u) / self.rate
        if self.family == DETERMINISTIC:
            return np.full(np.shape(u), 1.0 / self.rate) if np.ndim(u) else 1.0 / self.rate
        return self.frozen().ppf(u)

    def intensity(self, alpha: float = 1.0) -> float:
        """lambda of tau = alpha * eta"""
        if alpha <= 0:
            raise ModelError("arrival scale must be > 0")
        if self.family == RENEWAL_GENERAL:
            return 1.0 / (alpha * float(self.frozen().mean()))
        return self.rate / alpha

    def density(self, x: Real, alpha: float = 1.0) -> Real:
        """Inter-arrival density at x; deterministic arrivals have none"""
        x = np.asarray(x, dtype=float)
        if self.family == POISSON:
            lam = self.rate / alpha
            return lam * np.exp(-lam * x)
        if self.family == DETERMINISTIC:
            return np.zeros_like(x)
        return self.frozen().pdf(x / alpha) / alpha


def _check_uniform(xi: Real):
    arr = np.asarray(xi, dtype=float)
    if np.any((arr < 0.0) | (arr >= 1.0)):
        raise ModelError("uniform variate must lie in [0, 1)")


def inverse_transform(model: ServiceModel, xi: Real, theta: float) -> Real:
    """G(xi, theta), the service time driven by xi"""
    _check_uniform(xi)
    if model.is_scale:
        if theta <= 0:
            raise ModelError(f"scale families need theta > 0, got {theta}")
        return theta**model.power * model.base_sample(xi)
    out = model.frozen(theta).ppf(xi)
    return float(out) if np.ndim(out) == 0 else out


def service_derivative(model: ServiceModel, sigma: Real, theta: float) -> Real:
    """
    d sigma / d theta for a realized service.

    Scale families: sigma = theta**p * eta gives p * sigma / theta.
    General families: -dF/dtheta / dF/dx at x = sigma, the theta-derivative
    of the cdf taken by central difference.
    """
    if model.is_scale:
        if theta <= 0:
            raise ModelError(f"scale families need theta > 0, got {theta}")
        out = model.power * np.asarray(sigma, dtype=float) / theta
        return float(out) if np.ndim(out) == 0 else out

    x = np.asarray(sigma, dtype=float)
    dens = model.frozen(theta).pdf(x)
    if np.any(dens <= 0) or np.any(~np.isfinite(dens)):
        raise ModelError("service time outside the support of the distribution")
    step = IPA_CDF_THETA_STEP * abs(theta)
    d_cdf = (model.frozen(theta + step).cdf(x) - model.frozen(theta - step).cdf(x)) / (
        2.0 * step
    )
    out = -d_cdf / dens
    return float(out) if np.ndim(out) == 0 else out


def service_second_derivative(model: ServiceModel, sigma: Real, theta: float) -> Real:
    """d2 sigma / d theta2; closed form for scale families only"""
    if not model.is_scale:
        raise ModelError(f"{model.family} has no closed-form second derivative")
    if theta <= 0:
        raise ModelError(f"scale families need theta > 0, got {theta}")
    p = model.power
    out = p * (p - 1.0) * np.asarray(sigma, dtype=float) / theta**2
    return float(out) if np.ndim(out) == 0 else out


def sigma_star(model: ServiceModel, xi: Real) -> Real:
    """sup of G(xi, theta) over the theta interval"""
    lo, hi = model.theta_interval
    if model.is_scale:
        # theta**p is monotone, so the sup sits at an end point
        theta = hi if model.power >= 0 else lo
        return inverse_transform(model, xi, theta)
    grid = np.linspace(lo, hi, IPA_STABILITY_GRID_POINTS)
    return np.max([np.asarray(inverse_transform(model, xi, t)) for t in grid], axis=0)


def stability_check(
    arrivals: ArrivalModel,
    services: ServiceModel,
    theta_interval: Tuple[float, float],
    n_probe: int = IPA_MIN_STABILITY_PROBE,
    seed: int = 0,
    parameter_kind: ParameterKind = ParameterKind.SERVICE_THETA,
) -> StabilityReport:
    """
    Load of the dominating system over the parameter interval.

    For service-theta the load is lambda * E sup_theta sigma(theta); for
    speed-nu it is lambda * E sigma / nu_lo; for arrival-alpha it is
    lambda(alpha_lo) * E sigma. Scale families are exact, general families
    are probed by Monte Carlo over a theta grid.
    """
    if n_probe < IPA_MIN_STABILITY_PROBE:
        raise ModelError(f"stability probe needs at least {IPA_MIN_STABILITY_PROBE} draws")
    lo, hi = theta_interval
    if lo > hi:
        raise ModelError(f"parameter interval must be ordered, got [{lo}, {hi}]")

    kind = ParameterKind(parameter_kind)
    lam = arrivals.intensity(lo if kind == ParameterKind.ARRIVAL_ALPHA else 1.0)
    speed = lo if kind == ParameterKind.SPEED_NU else 1.0
    if speed <= 0:
        raise ModelError("speed must be > 0")

    if kind == ParameterKind.SERVICE_THETA:
        probe = replace(services, theta_interval=(lo, hi))
    else:
        probe = services

    if probe.is_scale:
        if kind == ParameterKind.SERVICE_THETA:
            theta = hi if probe.power >= 0 else lo
        else:
            theta = probe.theta
        load = lam * probe.mean(theta) / speed
        std_error = 0.0
    else:
        xi = draw_uniforms(seed, 0, PROBE_STREAM, n_probe)
        if kind == ParameterKind.SERVICE_THETA:
            sample = sigma_star(probe, xi)
        else:
            sample = inverse_transform(probe, xi, probe.theta)
        load = lam * float(np.mean(sample)) / speed
        std_error = lam * float(np.std(sample, ddof=1)) / speed / np.sqrt(n_probe)

    report = StabilityReport(float(load), float(std_error), bool(load < 1.0))
    logger.debug(f"stability probe: load={report.load_estimate:.6g} stable={report.stable}")
    return report


def default_warmup(load: float, factor: float, cap: int) -> int:
    """factor / (1 - load)**2 customers, capped"""
    if load >= 1.0:
        return cap
    return int(min(cap, np.ceil(factor / (1.0 - load) ** 2)))

