# -*- coding: utf-8 -*-
"""
Empirical checks of the Palm identities behind the customer-average
estimators: the inversion formula, the busy-cycle exchange lemma and the
time-average versus customer-average equivalence.
"""
from typing import TYPE_CHECKING, List, Optional

import numpy as np
from loguru import logger

from gg1_ipa.pg_estimator.batch_means import batch_std_error, batch_values
from gg1_ipa.pg_estimator.ipa_estimator import classic_ipa, first_order
from gg1_ipa.pg_functional.bv_functional import BVFunctional
from gg1_ipa.pg_functional.builders import constant, identity
from gg1_ipa.pg_queue.lindley import CustomerPath, interval_integrals, simulate_path
from gg1_ipa.utils.constants import IPA_DEFAULT_BATCHES, IPA_DEFAULT_PALM_K
from gg1_ipa.utils.ipa_errors import EstimationError
from gg1_ipa.utils.objects import PalmCheckReport, PalmIdentity, Side

if TYPE_CHECKING:
    from gg1_ipa.pg_experiment.ipa_config import ExperimentConfig

WORKLOAD = "workload"
F_OF_WORKLOAD = "f-of-workload"
CONSTANT = "constant"
IDLE_INDICATOR = "idle-indicator"
PROCESSES = (WORKLOAD, F_OF_WORKLOAD, CONSTANT)
MARKS = (F_OF_WORKLOAD, CONSTANT, IDLE_INDICATOR)

# relative slack for sides that agree up to rounding
ROUNDING = 1e-12


def _agree(lhs: float, rhs: float, tolerance: float) -> bool:
    gap = abs(lhs - rhs)
    return bool(gap <= tolerance or gap <= ROUNDING * max(1.0, abs(lhs), abs(rhs)))


def process_functional(process: str, f: Optional[BVFunctional]) -> BVFunctional:
    if process == WORKLOAD:
        return identity()
    if process == CONSTANT:
        return constant(1.0)
    if process == F_OF_WORKLOAD:
        if f is None:
            raise EstimationError("f-of-workload needs a functional")
        return f
    raise EstimationError(f"unknown process: {process}")


def inversion_report(
    path: CustomerPath,
    func: BVFunctional,
    k: float = IPA_DEFAULT_PALM_K,
    batches: int = IPA_DEFAULT_BATCHES,
) -> PalmCheckReport:
    """
    Time average of f(W) over the horizon against lambda times the
    customer average of the integral of f(W) over each inter-arrival interval.
    """
    integrals = interval_integrals(path, func)
    lhs = float(integrals.sum() / path.elapsed)
    rhs = path.lambda_hat * float(integrals.mean())

    def gap(chunk, tau):
        return chunk.sum() / tau.sum() - path.lambda_hat * chunk.mean()

    diffs = batch_values(gap, path.n, integrals, path.tau, batches=batches)
    std_error = batch_std_error(diffs)
    tolerance = k * std_error if np.isfinite(std_error) else 0.0
    return PalmCheckReport(
        PalmIdentity.INVERSION, lhs, rhs, std_error, _agree(lhs, rhs, tolerance), tolerance
    )


def _marks(path: CustomerPath, mark: str, f: Optional[BVFunctional]) -> np.ndarray:
    if mark == CONSTANT:
        return np.ones(path.n)
    if mark == IDLE_INDICATOR:
        return path.idle_before.astype(float)
    if mark == F_OF_WORKLOAD:
        if f is None:
            raise EstimationError("f-of-workload needs a functional")
        return np.asarray(f.eval(path.w_after), dtype=float)
    raise EstimationError(f"unknown mark: {mark}")


def wald_report(
    path: CustomerPath,
    z: np.ndarray,
    k: float = IPA_DEFAULT_PALM_K,
    batches: int = IPA_DEFAULT_BATCHES,
) -> PalmCheckReport:
    """
    Busy-cycle exchange: the sum of z over the cycle of customer k against
    the number of arrivals in that cycle times z_k, both averaged over
    customers of complete cycles.
    """
    starts = np.flatnonzero(path.idle_before)
    if starts.size < 2:
        raise EstimationError("the path holds no complete busy cycle")
    lo, hi = int(starts[0]), int(starts[-1])
    z = z[lo:hi]
    cycle = np.cumsum(path.idle_before[lo:hi]) - 1
    sums = np.bincount(cycle, weights=z)
    sizes = np.bincount(cycle).astype(float)
    lhs_k = sums[cycle]
    rhs_k = sizes[cycle] * z
    lhs, rhs = float(lhs_k.mean()), float(rhs_k.mean())
    diffs = batch_values(np.mean, lhs_k.size, lhs_k - rhs_k, batches=batches)
    std_error = batch_std_error(diffs)
    tolerance = k * std_error if np.isfinite(std_error) else 0.0
    return PalmCheckReport(
        PalmIdentity.WALD_LEMMA, lhs, rhs, std_error, _agree(lhs, rhs, tolerance), tolerance
    )


def ergodic_report(
    path: CustomerPath, f: BVFunctional, batches: int = IPA_DEFAULT_BATCHES
) -> PalmCheckReport:
    """
    Time-average IPA against the customer average with the empirical
    intensity; they may differ by boundary terms of order C/n, C being the
    largest summand.
    """
    empirical = path.with_lambda(path.lambda_empirical)
    lhs_est = classic_ipa(path, f, batches=batches)
    rhs_est = first_order(empirical, f, Side.TWO_SIDED, batches=batches)
    summands = path.d * (f.shape(path.w_after) - f.shape(path.w_next))
    bound = path.lambda_empirical * float(np.max(np.abs(summands))) if path.n else 0.0
    tolerance = bound / max(path.n, 1)
    std_error = float(np.hypot(lhs_est.std_error, rhs_est.std_error))
    lhs, rhs = lhs_est.value, rhs_est.value
    return PalmCheckReport(
        PalmIdentity.ERGODIC_EQUIVALENCE,
        lhs,
        rhs,
        std_error,
        _agree(lhs, rhs, tolerance),
        tolerance,
    )


def palm_reports(path: CustomerPath, config: "ExperimentConfig") -> List[PalmCheckReport]:
    """The checks listed in the experiment, run on an already simulated path"""
    reports = []
    for identity in config.palm_checks:
        if identity == PalmIdentity.INVERSION:
            func = process_functional(config.palm_process, config.functional)
            reports.append(inversion_report(path, func, config.palm_k, config.batches))
        elif identity == PalmIdentity.WALD_LEMMA:
            z = _marks(path, F_OF_WORKLOAD, config.functional)
            reports.append(wald_report(path, z, config.palm_k, config.batches))
        else:
            reports.append(ergodic_report(path, config.functional, config.batches))
    return reports


def _simulate(config: "ExperimentConfig", n: Optional[int], seed: Optional[int], replication: int):
    config.require_stable()
    return simulate_path(
        config.arrivals,
        config.services,
        config.parameter.kind,
        config.parameter.value,
        n or config.horizon,
        config.seed if seed is None else seed,
        warmup=config.warmup,
        replication=replication,
    )


def check_inversion(
    process: str,
    config: "ExperimentConfig",
    n: Optional[int] = None,
    seed: Optional[int] = None,
    replication: int = 0,
) -> PalmCheckReport:
    """Inversion formula for Z = W, Z = f(W) or Z = 1 on a simulated path"""
    func = process_functional(process, config.functional)
    path = _simulate(config, n, seed, replication)
    report = inversion_report(path, func, config.palm_k, config.batches)
    logger.info(f"inversion[{process}]: lhs={report.lhs:.6g} rhs={report.rhs:.6g} pass={report.passed}")
    return report


def check_wald_lemma(
    config: "ExperimentConfig",
    n: Optional[int] = None,
    seed: Optional[int] = None,
    replication: int = 0,
    mark: str = F_OF_WORKLOAD,
) -> PalmCheckReport:
    """Busy-cycle exchange lemma with Z = f(W(T_k)), 1 or the idle indicator"""
    path = _simulate(config, n, seed, replication)
    report = wald_report(path, _marks(path, mark, config.functional), config.palm_k, config.batches)
    logger.info(f"wald[{mark}]: lhs={report.lhs:.6g} rhs={report.rhs:.6g} pass={report.passed}")
    return report


def check_ergodic_equivalence(
    config: "ExperimentConfig",
    f: Optional[BVFunctional] = None,
    n: Optional[int] = None,
    seed: Optional[int] = None,
    replication: int = 0,
) -> PalmCheckReport:
    """classic_ipa against first_order with the empirical intensity"""
    func = config.functional if f is None else f
    path = _simulate(config, n, seed, replication)
    report = ergodic_report(path, func, config.batches)
    logger.info(f"ergodic: lhs={report.lhs:.6g} rhs={report.rhs:.6g} pass={report.passed}")
    return report
