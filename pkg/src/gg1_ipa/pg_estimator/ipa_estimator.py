# -*- coding: utf-8 -*-
"""
Customer-average IPA estimators of derivatives of J = E f(W).

Every estimator builds one summand per customer, with
W0 = W(T_k) = w_k + sigma_k and W1 = W(T_{k+1}-) = w_{k+1}, and returns the
intensity-scaled mean with a batch-means standard error. One-sided atom
terms are kept as a separate per-customer series so that

    value(right) - value(left) = atom_correction(left) - atom_correction(right)

holds exactly on a path.
"""
from typing import Callable, Optional, Tuple

import numpy as np
from loguru import logger

from gg1_ipa.pg_estimator.batch_means import batch_means, t_interval
from gg1_ipa.pg_functional.bv_functional import BVFunctional
from gg1_ipa.pg_queue.lindley import CustomerPath
from gg1_ipa.utils.constants import IPA_DEFAULT_BATCHES, IPA_DEFAULT_CI_LEVEL
from gg1_ipa.utils.ipa_errors import EstimationError, OneSidedDerivativeError
from gg1_ipa.utils.objects import DerivativeEstimate, Order, ParameterKind, Side

SHIFTED = "shifted"
STANDARD = "standard"

Terms = Tuple[np.ndarray, np.ndarray, np.ndarray]


def _require_kind(path: CustomerPath, kind: ParameterKind, op: str):
    if path.parameter_kind != kind:
        raise EstimationError(
            f"{op} needs a {kind.value} path, got {path.parameter_kind.value}"
        )


def _require_atom_free(f: BVFunctional, op: str):
    if any(part.has_atoms for _, part in f.monotone_parts()):
        raise EstimationError(f"{op} needs a functional without atoms")


def _combine(f: BVFunctional, terms: Callable[[BVFunctional], Terms]) -> Terms:
    """Sums the per-customer terms over the signed monotone parts of f"""
    total = None
    for sign, part in f.monotone_parts():
        base, right, left = terms(part)
        if total is None:
            total = (sign * base, sign * right, sign * left)
        else:
            total = (total[0] + sign * base, total[1] + sign * right, total[2] + sign * left)
    return total


def _report(
    path: CustomerPath,
    scale: float,
    base: np.ndarray,
    right: np.ndarray,
    left: np.ndarray,
    side: Side,
    order: Order,
    batches: int,
    ci_level: float,
    extra: Optional[np.ndarray] = None,
) -> DerivativeEstimate:
    """Turns per-customer terms into a DerivativeEstimate"""
    side = Side(side)
    if side == Side.TWO_SIDED:
        # atom hits are exact events, any nonzero term makes the path one-sided
        if np.any(right != 0.0) or np.any(left != 0.0):
            raise OneSidedDerivativeError(
                scale * float(right.mean()), scale * float(left.mean())
            )
        corr = right
    else:
        corr = right if side == Side.RIGHT else left

    series = scale * (base - corr)
    coalescence = 0.0
    if extra is not None:
        series = series + scale * extra
        coalescence = scale * float(extra.mean()) if extra.size else 0.0
    value, std_error, count = batch_means(series, batches)
    ci_lo, ci_hi = t_interval(value, std_error, count, ci_level)
    estimate = DerivativeEstimate(
        value=value,
        std_error=std_error,
        n_customers=path.n,
        side=side,
        order=Order(order),
        parameter_kind=path.parameter_kind,
        atom_correction=scale * float(corr.mean()) if corr.size else 0.0,
        coalescence_correction=coalescence,
        ci_lo=ci_lo,
        ci_hi=ci_hi,
    )
    logger.debug(
        f"{order.value}/{side.value} {path.parameter_kind.value}: "
        f"{value:.6g} +- {std_error:.3g} (atoms {estimate.atom_correction:.3g})"
    )
    return estimate


def _first_order_terms(path: CustomerPath, pairing: str) -> Callable[[BVFunctional], Terms]:
    w0, w1, d = path.w_after, path.w_next, path.d

    def terms(part: BVFunctional) -> Terms:
        if pairing == SHIFTED:
            base = d * part.shape(w0) - path.d_before * part.shape(path.w)
        else:
            base = d * (part.shape(w0) - part.shape(w1))
        jump = d * (part.atom_mass(w0) - part.atom_mass(w1))
        return base, np.where(d < 0, jump, 0.0), np.where(d > 0, jump, 0.0)

    return terms


def first_order(
    path: CustomerPath,
    f: BVFunctional,
    side: Side = Side.RIGHT,
    pairing: str = STANDARD,
    batches: int = IPA_DEFAULT_BATCHES,
    ci_level: float = IPA_DEFAULT_CI_LEVEL,
) -> DerivativeEstimate:
    """
    One-sided derivative of E f(W) in the service parameter theta.

        (lambda/n) sum_k d_k [ f(W0) - f(W1) - 1{d_k <> 0} (mu_f{W0} - mu_f{W1}) ]

    with 1{d_k < 0} on the right side and 1{d_k > 0} on the left side.
    ``pairing="shifted"`` pairs d_k f(W0) with W'(T_k-) f(W(T_k-)) instead and
    is defined for atom-free f only.
    """
    _require_kind(path, ParameterKind.SERVICE_THETA, "first_order")
    if pairing not in (STANDARD, SHIFTED):
        raise EstimationError(f"unknown pairing: {pairing}")
    if pairing == SHIFTED:
        _require_atom_free(f, "shifted pairing")
    base, right, left = _combine(f, _first_order_terms(path, pairing))
    return _report(
        path, path.lambda_hat, base, right, left, side, Order.FIRST, batches, ci_level
    )


def second_order(
    path: CustomerPath,
    f: BVFunctional,
    side: Side = Side.RIGHT,
    coalescence: bool = True,
    batches: int = IPA_DEFAULT_BATCHES,
    ci_level: float = IPA_DEFAULT_CI_LEVEL,
) -> DerivativeEstimate:
    """
    Second derivative of E f(W) in theta for atom-free f.

    Per customer: d2_k (f(W0) - f(W1)) + d_k^2 (f'(W0) - f'(W1)) minus the
    sided atom terms of f'. With ``coalescence`` the f'(W1) term is dropped
    after idle periods and lambda * M_f * a(W0) * d_k^2 is added, where a is
    the inter-arrival density and M_f the mean increment of f over a busy
    period; these terms account for busy periods merging as theta grows.
    """
    _require_kind(path, ParameterKind.SERVICE_THETA, "second_order")
    _require_atom_free(f, "second_order")
    if not path.has_d2:
        raise EstimationError("second_order needs a path carrying second derivatives")

    w0, w1, d, d2 = path.w_after, path.w_next, path.d, path.d2
    busy_next = w1 > 0.0
    dsq = d * d

    def terms(part: BVFunctional) -> Terms:
        deriv = part.formal_derivative()
        base = d2 * (part.shape(w0) - part.shape(w1)) + dsq * (deriv.eval(w0) - deriv.eval(w1))
        jump = dsq * (deriv.atom_mass(w0) - deriv.atom_mass(w1))
        return base, np.where(d < 0, jump, 0.0), np.where(d > 0, jump, 0.0)

    base, right, left = _combine(f, terms)

    extra = None
    if coalescence:
        if path.arrivals is None:
            raise EstimationError("the coalescence term needs the arrival model of the path")
        periods = max(1, int(np.count_nonzero(path.idle_before)))
        increments = np.zeros(path.n)
        restored = np.zeros(path.n)
        for sign, part in f.monotone_parts():
            increments = increments + sign * (part.shape(w0) - part.shape(w1))
            # f'(W1) after an idle period belongs to the next busy period
            restored = restored + sign * np.where(busy_next, 0.0, part.formal_derivative().eval(w1))
        mean_increment = float(increments.sum()) / periods
        density = path.arrivals.density(w0, path.arrival_scale)
        extra = dsq * (restored + mean_increment * density)

    return _report(
        path, path.lambda_hat, base, right, left, side, Order.SECOND, batches, ci_level, extra
    )


def _scale_terms(path: CustomerPath, scale: float) -> Callable[[BVFunctional], Terms]:
    """Braces shared by the speed and arrival-scale estimators"""
    w0, w1, d, e = path.w_after, path.w_next, path.d, path.d_next

    def terms(part: BVFunctional) -> Terms:
        f0, f1 = part.shape(w0), part.shape(w1)
        base = (
            scale * d * (f0 - f1)
            + (w0 - w1) * f1
            - (part.shape_primitive(w0) - part.shape_primitive(w1))
        )
        m0, m1 = scale * d * part.atom_mass(w0), scale * e * part.atom_mass(w1)
        right = np.where(d < 0, m0, 0.0) - np.where(e < 0, m1, 0.0)
        left = np.where(d > 0, m0, 0.0) - np.where(e > 0, m1, 0.0)
        return base, right, left

    return terms


def speed_derivative(
    path: CustomerPath,
    f: BVFunctional,
    side: Side = Side.RIGHT,
    batches: int = IPA_DEFAULT_BATCHES,
    ci_level: float = IPA_DEFAULT_CI_LEVEL,
) -> DerivativeEstimate:
    """
    Derivative of E f(W) in the server speed nu, prefactor lambda / nu^2:

        nu d_k (f(W0) - f(W1)) + (W0 - W1) f(W1) - (F(W0) - F(W1))

    F is the primitive of f. The right side removes the atoms hit while the
    derivative is negative, the left side those hit while it is positive.
    """
    _require_kind(path, ParameterKind.SPEED_NU, "speed_derivative")
    nu = path.parameter
    base, right, left = _combine(f, _scale_terms(path, nu))
    return _report(
        path, path.lambda_hat / nu**2, base, right, left, side, Order.FIRST, batches, ci_level
    )


def arrival_scale_derivative(
    path: CustomerPath,
    f: BVFunctional,
    side: Side = Side.RIGHT,
    batches: int = IPA_DEFAULT_BATCHES,
    ci_level: float = IPA_DEFAULT_CI_LEVEL,
) -> DerivativeEstimate:
    """Derivative of E f(W) in the inter-arrival scale alpha, prefactor lambda / alpha"""
    _require_kind(path, ParameterKind.ARRIVAL_ALPHA, "arrival_scale_derivative")
    alpha = path.parameter
    base, right, left = _combine(f, _scale_terms(path, alpha))
    return _report(
        path, path.lambda_hat / alpha, base, right, left, side, Order.FIRST, batches, ci_level
    )


def classic_ipa(
    path: CustomerPath,
    f: BVFunctional,
    batches: int = IPA_DEFAULT_BATCHES,
    ci_level: float = IPA_DEFAULT_CI_LEVEL,
) -> DerivativeEstimate:
    """Time-average form: sum_k d_k (f(W0) - f(W1)) / T_n, atom-free f"""
    _require_kind(path, ParameterKind.SERVICE_THETA, "classic_ipa")
    _require_atom_free(f, "classic_ipa")
    base, right, left = _combine(f, _first_order_terms(path, STANDARD))
    scale = path.n / path.elapsed if path.n else float("nan")
    return _report(path, scale, base, right, left, Side.TWO_SIDED, Order.FIRST, batches, ci_level)


def tail_probability_derivative(
    path: CustomerPath,
    x: float,
    side: Side = Side.RIGHT,
    batches: int = IPA_DEFAULT_BATCHES,
    ci_level: float = IPA_DEFAULT_CI_LEVEL,
) -> DerivativeEstimate:
    """
    Derivative of P(W >= x) in theta written with indicators:

        d_k [1{W1 < x <= W0} - 1{W0 < x <= W1}]
            - 1{d_k <> 0} d_k [1{W0 = x} - 1{W1 = x}]
    """
    _require_kind(path, ParameterKind.SERVICE_THETA, "tail_probability_derivative")
    if x <= 0:
        raise EstimationError("tail threshold must be > 0")
    w0, w1, d = path.w_after, path.w_next, path.d
    crossing = ((w1 < x) & (x <= w0)).astype(float) - ((w0 < x) & (x <= w1)).astype(float)
    base = d * crossing
    jump = d * ((w0 == x).astype(float) - (w1 == x).astype(float))
    right = np.where(d < 0, jump, 0.0)
    left = np.where(d > 0, jump, 0.0)
    return _report(
        path, path.lambda_hat, base, right, left, side, Order.FIRST, batches, ci_level
    )
