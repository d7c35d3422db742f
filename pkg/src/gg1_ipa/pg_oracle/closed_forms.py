# -*- coding: utf-8 -*-
"""
Closed-form stationary workload quantities of M/M/1 and D/D/1 queues and
their parameter derivatives.

M/M/1 with arrival rate lam and mean service theta, rho = lam * theta:
the workload is 0 with probability 1 - rho and otherwise exponential with
rate 1/theta - lam (Pollaczek-Khinchine for exponential services).
"""
from dataclasses import dataclass
from math import exp
from typing import Dict, NamedTuple, Optional

from gg1_ipa.pg_queue.models import (
    DETERMINISTIC,
    DETERMINISTIC_SCALE,
    EXPONENTIAL_SCALE,
    POISSON,
    ArrivalModel,
    ServiceModel,
)
from gg1_ipa.utils.ipa_errors import ModelError, UnstableInputError
from gg1_ipa.utils.objects import ParameterKind, Side


@dataclass(frozen=True)
class MM1Moments:
    """Stationary M/M/1 workload at (lam, theta)"""

    lam: float
    theta: float

    def __post_init__(self):
        if self.lam <= 0 or self.theta < 0:
            raise ModelError("M/M/1 needs lam > 0 and theta >= 0")
        if self.rho >= 1.0:
            raise UnstableInputError(self.rho)

    @property
    def rho(self) -> float:
        return self.lam * self.theta

    @property
    def mean(self) -> float:
        # E W = rho / (1/theta - lam) = lam theta^2 / (1 - lam theta)
        return self.lam * self.theta**2 / (1.0 - self.rho)

    @property
    def d_mean_dtheta(self) -> float:
        # quotient rule: [2 lam theta (1 - rho) + lam^2 theta^2] / (1 - rho)^2
        return self.lam * self.theta * (2.0 - self.rho) / (1.0 - self.rho) ** 2

    @property
    def d2_mean_dtheta2(self) -> float:
        # d/dtheta of lam theta (2 - rho) / (1 - rho)^2 simplifies to 2 lam / (1 - rho)^3
        return 2.0 * self.lam / (1.0 - self.rho) ** 3

    @property
    def d_mean_dlambda(self) -> float:
        # theta^2 [(1 - rho) + rho] / (1 - rho)^2
        return self.theta**2 / (1.0 - self.rho) ** 2

    @property
    def half_second_moment(self) -> float:
        # E W^2 = rho * 2 / (1/theta - lam)^2, halved: lam theta^3 / (1 - rho)^2
        return self.lam * self.theta**3 / (1.0 - self.rho) ** 2

    @property
    def d_half_second_moment(self) -> float:
        # lam [3 theta^2 (1 - rho) + 2 lam theta^3] / (1 - rho)^3
        return self.lam * self.theta**2 * (3.0 - self.rho) / (1.0 - self.rho) ** 3

    @property
    def d2_half_second_moment(self) -> float:
        # d/dtheta of lam theta^2 (3 - rho) / (1 - rho)^3 = 6 lam theta / (1 - rho)^4
        return 6.0 * self.lam * self.theta / (1.0 - self.rho) ** 4

    def _decay(self, x: float) -> float:
        return exp(-(1.0 / self.theta - self.lam) * x)

    def tail(self, x: float) -> float:
        """P(W > x) = rho exp(-(1/theta - lam) x) for x > 0"""
        if self.theta == 0:
            return 0.0
        return self.rho * self._decay(x)

    def d_tail_dtheta(self, x: float) -> float:
        """lam e + rho e x / theta^2 = lam e (1 + x / theta)"""
        if self.theta == 0:
            return 0.0
        return self.lam * self._decay(x) * (1.0 + x / self.theta)

    def d_tail_dlambda(self, x: float) -> float:
        """theta e + rho e x = theta e (1 + lam x)"""
        if self.theta == 0:
            return 0.0
        return self.theta * self._decay(x) * (1.0 + self.lam * x)

    def to_dict(self) -> Dict[str, float]:
        return {
            "rho": self.rho,
            "mean": self.mean,
            "d_mean_dtheta": self.d_mean_dtheta,
            "d2_mean_dtheta2": self.d2_mean_dtheta2,
            "d_mean_dlambda": self.d_mean_dlambda,
            "half_second_moment": self.half_second_moment,
        }


def mm1_workload_moments(lam: float, theta: float) -> MM1Moments:
    """M/M/1 workload moments, tail and derivatives"""
    return MM1Moments(float(lam), float(theta))


class DD1ClosedForms(NamedTuple):
    """D/D/1 quantities for P(W >= x) and E W"""

    J: float
    Jr: float
    Jl: float
    mean_workload: float
    d_mean: float


def dd1_closed_forms(tau: float, theta: float, x: float) -> DD1ClosedForms:
    """
    D/D/1 with inter-arrival tau and service theta < tau.

    The workload is a saw-tooth falling from theta to 0 in time theta and
    staying at 0 for tau - theta, so P(W >= x) = (theta - x)^+ / tau, with
    right derivative 1{theta >= x}/tau and left derivative 1{theta > x}/tau,
    and E W = theta^2 / (2 tau).
    """
    if tau <= 0 or theta <= 0:
        raise ModelError("D/D/1 needs tau > 0 and theta > 0")
    if theta >= tau:
        raise UnstableInputError(theta / tau)
    return DD1ClosedForms(
        J=max(theta - x, 0.0) / tau,
        Jr=(1.0 if theta >= x else 0.0) / tau,
        Jl=(1.0 if theta > x else 0.0) / tau,
        mean_workload=theta**2 / (2.0 * tau),
        d_mean=theta / tau,
    )


def _functional_kind(spec: Dict) -> Optional[str]:
    """identity, tail or half-square; None for anything else"""
    kind = spec.get("type")
    if kind == "identity":
        return "identity"
    if kind == "indicator" and float(spec["threshold"]) > 0:
        return "tail"
    if kind == "polynomial":
        coef = [float(c) for c in spec["coefficients"]]
        while coef and coef[-1] == 0.0:
            coef.pop()
        # the constant term has no derivative
        if coef[1:] == [1.0]:
            return "identity"
        if coef[1:] == [0.0, 0.5]:
            return "half-square"
    return None


def _mm1_oracle(lam, theta, kind, value, func, order) -> Optional[float]:
    if kind == ParameterKind.SERVICE_THETA:
        mm1 = mm1_workload_moments(lam, value)
        if func == "identity":
            return mm1.d_mean_dtheta if order == 1 else mm1.d2_mean_dtheta2
        if func == "half-square":
            return mm1.d_half_second_moment if order == 1 else mm1.d2_half_second_moment
        return None
    if order != 1:
        return None
    if kind == ParameterKind.ARRIVAL_ALPHA:
        # lam(alpha) = rate / alpha, chain rule with d lam / d alpha = -lam / alpha
        mm1 = mm1_workload_moments(lam, theta)
        if func == "identity":
            return -mm1.d_mean_dlambda * lam / value
        return None
    # speed: the work W equals nu V with V the workload in time units of an
    # M/M/1 with mean service theta / nu, so E W = lam theta^2 / (nu - lam theta)
    nu = value
    if lam * theta >= nu:
        raise UnstableInputError(lam * theta / nu)
    if func == "identity":
        return -lam * theta**2 / (nu - lam * theta) ** 2
    return None


def _mm1_tail_oracle(lam, theta, kind, value, x) -> Optional[float]:
    if kind == ParameterKind.SERVICE_THETA:
        return mm1_workload_moments(lam, value).d_tail_dtheta(x)
    if kind == ParameterKind.ARRIVAL_ALPHA:
        return -mm1_workload_moments(lam, theta).d_tail_dlambda(x) * lam / value
    # P(W >= x) = P(V >= x / nu) = (lam theta / nu) exp(-(1/theta - lam/nu) x)
    nu = value
    if lam * theta >= nu:
        raise UnstableInputError(lam * theta / nu)
    decay = exp(-(1.0 / theta - lam / nu) * x)
    return -(lam * theta / nu**2) * decay * (1.0 + lam * x / nu)


def _dd1_oracle(tau, theta, kind, value, func, spec, side, order) -> Optional[float]:
    if order != 1:
        return None
    if kind == ParameterKind.SERVICE_THETA:
        theta = value
    if func == "identity":
        if kind == ParameterKind.SERVICE_THETA:
            return dd1_closed_forms(tau, theta, 0.0).d_mean
        # speed nu: E W = theta^2 / (2 nu tau); scale alpha: tau becomes alpha tau,
        # so both give the same derivative and the same stability condition
        dd1_closed_forms(tau * value, theta, 0.0)
        return -(theta**2) / (2.0 * value**2 * tau)
    if func == "tail" and kind == ParameterKind.SERVICE_THETA:
        forms = dd1_closed_forms(tau, theta, float(spec["threshold"]))
        return forms.Jl if Side(side) == Side.LEFT else forms.Jr
    return None


def analytic_derivative(
    arrivals: ArrivalModel,
    services: ServiceModel,
    parameter_kind: ParameterKind,
    value: float,
    functional_spec: Dict,
    order: int = 1,
    side: Side = Side.RIGHT,
) -> Optional[float]:
    """
    Exact derivative for the M/M/1 and D/D/1 cases covered by the closed
    forms above; None when no closed form applies.
    """
    kind = ParameterKind(parameter_kind)
    func = _functional_kind(functional_spec)
    if func is None or services.power != 1.0:
        return None
    rate = arrivals.rate
    if arrivals.family == POISSON and services.family == EXPONENTIAL_SCALE:
        lam = rate / value if kind == ParameterKind.ARRIVAL_ALPHA else rate
        if func == "tail":
            if order != 1:
                return None
            return _mm1_tail_oracle(
                lam, services.theta, kind, value, float(functional_spec["threshold"])
            )
        return _mm1_oracle(lam, services.theta, kind, value, func, order)
    if arrivals.family == DETERMINISTIC and services.family == DETERMINISTIC_SCALE:
        return _dd1_oracle(
            1.0 / rate, services.theta, kind, value, func, functional_spec, side, order
        )
    return None
