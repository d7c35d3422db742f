# -*- coding: utf-8 -*-
"""
Lindley recursion for the workload seen by arrivals and its parameter
derivatives.

    w_k = (w_{k-1} + sigma_{k-1} - r * tau_{k-1})^+

with drain rate r (the server speed, 1 unless nu is perturbed). Derivatives
restart at every customer who finds the system empty:

    service-theta:  d_k = d_{k-1} 1{w_k > 0} + sigma'_k
    speed-nu:       d_k = (d_{k-1} - tau_{k-1}) 1{w_k > 0}
    arrival-alpha:  d_k = (d_{k-1} - eta_{k-1}) 1{w_k > 0}

The speed and arrival-scale recursions come from differentiating the
recursion above on {w_k > 0}; an idle gap makes w_k exactly 0 and the
derivative 0.
"""
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

import numpy as np
import pandas as pd
from loguru import logger

from gg1_ipa.pg_queue.models import (
    ArrivalModel,
    ServiceModel,
    inverse_transform,
    service_derivative,
    service_second_derivative,
    sigma_star,
)
from gg1_ipa.pg_queue.streams import ARRIVAL_STREAM, SERVICE_STREAM, draw_uniforms
from gg1_ipa.utils.constants import IPA_MIN_LOAD_CHECK
from gg1_ipa.utils.ipa_errors import ModelError, UnstableInputError
from gg1_ipa.utils.ipa_utils import mark
from gg1_ipa.utils.objects import CustomerRecord, ParameterKind


@dataclass(frozen=True, eq=False)
class CustomerPath:
    """
    Per-customer arrays of one simulated path, warm-up already removed.

    Index k refers to the k-th kept customer: ``w`` is W(T_k-), ``w_next`` is
    W(T_{k+1}-), ``d`` is W'(T_k) and ``d_next`` is W'(T_{k+1}-).
    """

    w: np.ndarray
    sigma: np.ndarray
    d: np.ndarray
    d2: np.ndarray
    w_next: np.ndarray
    d_next: np.ndarray
    d2_next: np.ndarray
    d_before: np.ndarray
    tau: np.ndarray
    eta: np.ndarray
    busy_time: np.ndarray
    parameter_kind: ParameterKind
    parameter: float
    lambda_hat: float
    lambda_exact: bool = False
    drain_rate: float = 1.0
    arrival_scale: float = 1.0
    has_d2: bool = True
    arrivals: Optional[ArrivalModel] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return int(self.w.size)

    @property
    def idle_before(self) -> np.ndarray:
        return self.w == 0.0

    @property
    def w_after(self) -> np.ndarray:
        """W(T_k) = w_k + sigma_k"""
        return self.w + self.sigma

    @property
    def elapsed(self) -> float:
        """T_n, the time spanned by the kept customers"""
        return float(self.tau.sum())

    @property
    def lambda_empirical(self) -> float:
        return self.n / self.elapsed if self.n else float("nan")

    def with_lambda(self, lambda_hat: float, exact: bool = False) -> "CustomerPath":
        """Same path with another intensity estimate"""
        return replace(self, lambda_hat=float(lambda_hat), lambda_exact=exact)

    def records(self) -> Iterator[CustomerRecord]:
        """Customers one by one"""
        for row in zip(
            self.w.tolist(),
            self.sigma.tolist(),
            self.d.tolist(),
            self.d2.tolist(),
            self.idle_before.tolist(),
            self.w_next.tolist(),
            self.busy_time.tolist(),
        ):
            yield CustomerRecord(*row)

    def to_frame(self) -> pd.DataFrame:
        """Customers as a DataFrame, one row per arrival"""
        return pd.DataFrame(
            {
                "w": self.w,
                "sigma": self.sigma,
                "d": self.d,
                "d2": self.d2,
                "idle_before": self.idle_before,
                "w_next": self.w_next,
                "d_next": self.d_next,
                "tau": self.tau,
                "busy_time": self.busy_time,
            }
        )


def _restart_cumsum(increments: np.ndarray, busy: np.ndarray) -> np.ndarray:
    """Running sum of increments restarted at every idle customer"""
    period = np.cumsum(~busy)
    return pd.Series(increments).groupby(period).cumsum().to_numpy()


def path_from_inputs(
    sigma,
    tau,
    parameter_kind: ParameterKind = ParameterKind.SERVICE_THETA,
    parameter: float = 1.0,
    d_sigma=None,
    d2_sigma=None,
    eta=None,
    lambda_hat: Optional[float] = None,
    arrivals: Optional[ArrivalModel] = None,
    arrival_scale: float = 1.0,
    warmup: int = 0,
    check_load: bool = True,
) -> CustomerPath:
    """
    Runs the recursions on given service and inter-arrival times.

    ``tau[k]`` is the time from arrival k to arrival k + 1. ``eta`` is the
    unit-scale inter-arrival time, needed for arrival-alpha paths.
    """
    kind = ParameterKind(parameter_kind)
    sigma = np.asarray(sigma, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if sigma.shape != tau.shape or sigma.ndim != 1:
        raise ModelError("sigma and tau must be 1-d arrays of equal length")
    if np.any(tau <= 0):
        raise ModelError("inter-arrival times must be > 0")
    if np.any(sigma < 0):
        raise ModelError("service times must be >= 0")
    if warmup < 0 or warmup > sigma.size:
        raise ModelError(f"warmup {warmup} outside [0, {sigma.size}]")
    total = sigma.size
    eta = tau / arrival_scale if eta is None else np.asarray(eta, dtype=float)

    rate = parameter if kind == ParameterKind.SPEED_NU else 1.0
    if rate <= 0:
        raise ModelError("server speed must be > 0")

    # Exact zeros come from the comparison, never from rounding
    drain = (rate * tau).tolist()
    served = sigma.tolist()
    w_all = [0.0] * (total + 1)
    prev = 0.0
    for k in range(total):
        nxt = prev + served[k] - drain[k]
        prev = nxt if nxt > 0.0 else 0.0
        w_all[k + 1] = prev
    w_all = np.asarray(w_all)
    w, w_next = w_all[:-1], w_all[1:]
    busy = w > 0.0
    busy_next = w_next > 0.0

    has_d2 = False
    if kind == ParameterKind.SERVICE_THETA:
        d_sigma = np.zeros(total) if d_sigma is None else np.asarray(d_sigma, dtype=float)
        d = _restart_cumsum(d_sigma, busy)
        d_next = np.where(busy_next, d, 0.0)
        if d2_sigma is not None:
            has_d2 = True
            d2 = _restart_cumsum(np.asarray(d2_sigma, dtype=float), busy)
        else:
            d2 = np.full(total, np.nan)
        d2_next = np.where(busy_next, d2, 0.0)
    else:
        lag = tau if kind == ParameterKind.SPEED_NU else eta
        shifted = np.concatenate(([0.0], lag[:-1]))
        d = _restart_cumsum(np.where(busy, -shifted, 0.0), busy)
        d_next = np.where(busy_next, d - lag, 0.0)
        d2 = np.zeros(total)
        d2_next = np.zeros(total)

    busy_time = np.minimum((w + sigma) / rate, tau)
    # W'(T_k-); the first customer arrives to an empty system
    d_before = np.concatenate(([0.0], d_next[:-1]))

    keep = slice(warmup, total)
    n = total - warmup
    if check_load and n >= IPA_MIN_LOAD_CHECK:
        load = float(sigma[keep].sum() / (rate * tau[keep].sum()))
        if load > 1.0:
            raise UnstableInputError(load, f"empirical load {load:.6g} exceeds 1")

    elapsed = float(tau[keep].sum())
    exact = lambda_hat is not None
    if lambda_hat is None:
        lambda_hat = n / elapsed if n else float("nan")

    return CustomerPath(
        w=w[keep],
        sigma=sigma[keep],
        d=d[keep],
        d2=d2[keep],
        w_next=w_next[keep],
        d_next=d_next[keep],
        d2_next=d2_next[keep],
        d_before=d_before[keep],
        tau=tau[keep],
        eta=eta[keep],
        busy_time=busy_time[keep],
        parameter_kind=kind,
        parameter=float(parameter),
        lambda_hat=float(lambda_hat),
        lambda_exact=exact,
        drain_rate=rate,
        arrival_scale=arrival_scale,
        has_d2=has_d2,
        arrivals=arrivals,
    )


def _draw_inputs(arrivals, seed, replication, total, point):
    xi = draw_uniforms(seed, replication, SERVICE_STREAM, total, point)
    eta = np.asarray(arrivals.eta(draw_uniforms(seed, replication, ARRIVAL_STREAM, total, point)))
    return xi, eta


@mark
def simulate_path(
    arrivals: ArrivalModel,
    services: ServiceModel,
    parameter_kind: ParameterKind,
    value: float,
    n: int,
    seed: int,
    warmup: int = 0,
    replication: int = 0,
    point: int = 0,
    check_load: bool = True,
) -> CustomerPath:
    """
    Simulates n customers after ``warmup`` discarded ones, starting empty.

    ``value`` is theta, nu or alpha according to ``parameter_kind``; the
    other two inputs stay at their nominal values (services.theta, speed 1,
    arrival scale 1). Paths of the same (seed, replication) share the service
    uniforms and the unit inter-arrival times whatever ``value`` is.
    """
    if n < 1:
        raise ModelError(f"n must be >= 1, got {n}")
    if warmup < 0:
        raise ModelError(f"warmup must be >= 0, got {warmup}")
    kind = ParameterKind(parameter_kind)
    total = warmup + n
    xi, eta = _draw_inputs(arrivals, seed, replication, total, point)

    theta = value if kind == ParameterKind.SERVICE_THETA else services.theta
    alpha = value if kind == ParameterKind.ARRIVAL_ALPHA else 1.0
    if alpha <= 0:
        raise ModelError("arrival scale must be > 0")

    sigma = np.asarray(inverse_transform(services, xi, theta), dtype=float)
    d_sigma = d2_sigma = None
    if kind == ParameterKind.SERVICE_THETA:
        d_sigma = service_derivative(services, sigma, theta)
        if services.is_scale:
            d2_sigma = service_second_derivative(services, sigma, theta)

    lam = arrivals.intensity(alpha) if arrivals.exact_intensity else None
    path = path_from_inputs(
        sigma,
        alpha * eta,
        parameter_kind=kind,
        parameter=value,
        d_sigma=d_sigma,
        d2_sigma=d2_sigma,
        eta=eta,
        lambda_hat=lam,
        arrivals=arrivals,
        arrival_scale=alpha,
        warmup=warmup,
        check_load=check_load,
    )
    logger.debug(
        f"{kind.value}={value}: {path.n} customers, "
        f"idle fraction {float(path.idle_before.mean()):.4f}"
    )
    return path


def simulate_star_path(
    arrivals: ArrivalModel,
    services: ServiceModel,
    n: int,
    seed: int,
    warmup: int = 0,
    replication: int = 0,
    check_load: bool = True,
) -> CustomerPath:
    """
    Path of the dominating system driven by sigma*_k = sup_theta sigma_k(theta)
    on the same uniforms and arrivals as simulate_path. Derivatives are zero.
    """
    if n < 0:
        raise ModelError(f"n must be >= 0, got {n}")
    total = warmup + n
    xi, eta = _draw_inputs(arrivals, seed, replication, total, 0)
    sigma = np.asarray(sigma_star(services, xi), dtype=float) if total else np.zeros(0)
    lam = arrivals.intensity() if arrivals.exact_intensity else None
    return path_from_inputs(
        sigma,
        eta,
        parameter=services.theta_interval[1],
        d_sigma=np.zeros(total),
        d2_sigma=np.zeros(total),
        eta=eta,
        lambda_hat=lam,
        arrivals=arrivals,
        warmup=warmup,
        check_load=check_load,
    )


def interval_integrals(path: CustomerPath, f) -> np.ndarray:
    """
    integral of f(W(s)) over [T_k, T_{k+1}) for every customer, in closed form.

    W drains linearly from W0 at rate r until it reaches W1, then stays at 0,
    so the integral is (F(W0) - F(W1)) / r plus the offset f(0) times tau_k,
    with F the primitive of the normalized f.
    """
    w0, w1 = path.w_after, path.w_next
    drained = (f.shape_primitive(w0) - f.shape_primitive(w1)) / path.drain_rate
    return drained + f.offset * path.tau
