# -*- coding: utf-8 -*-
"""
Runs an experiment: seeded replications (simulation, estimation, oracle
comparison, Palm checks), pooling, and notification of attached observers.
"""
import multiprocessing
from time import perf_counter
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from gg1_ipa._version import __version__
from gg1_ipa.pg_estimator.batch_means import t_interval
from gg1_ipa.pg_estimator.ipa_estimator import (
    arrival_scale_derivative,
    classic_ipa,
    first_order,
    second_order,
    speed_derivative,
    tail_probability_derivative,
)
from gg1_ipa.pg_experiment.ipa_config import (
    ANALYTIC,
    FINITE_DIFFERENCE,
    EstimatorSpec,
    ExperimentConfig,
    tail_threshold,
)
from gg1_ipa.pg_experiment.ipa_observer import (
    CONFIG,
    POOLED,
    REPLICATION,
    SUMMARY,
    IpaObserver,
)
from gg1_ipa.pg_oracle.closed_forms import analytic_derivative
from gg1_ipa.pg_oracle.finite_difference import STENCILS, finite_difference
from gg1_ipa.pg_palm.palm_verify import palm_reports
from gg1_ipa.pg_queue.lindley import CustomerPath, simulate_path
from gg1_ipa.utils.ipa_env import shared
from gg1_ipa.utils.ipa_errors import UnstableInputError
from gg1_ipa.utils.ipa_utils import env_flag, mark
from gg1_ipa.utils.objects import DerivativeEstimate, Order, Side


def estimate(path: CustomerPath, config: ExperimentConfig, est: EstimatorSpec) -> DerivativeEstimate:
    """Dispatches one requested estimator on a path"""
    f = config.functional
    common = {"batches": config.batches, "ci_level": config.ci_level}
    if est.op == "first_order":
        return first_order(path, f, est.side, pairing=est.pairing, **common)
    if est.op == "second_order":
        return second_order(path, f, est.side, coalescence=est.coalescence, **common)
    if est.op == "speed_derivative":
        return speed_derivative(path, f, est.side, **common)
    if est.op == "arrival_scale_derivative":
        return arrival_scale_derivative(path, f, est.side, **common)
    if est.op == "classic_ipa":
        return classic_ipa(path, f, **common)
    return tail_probability_derivative(path, tail_threshold(est, config), est.side, **common)


def _estimator_order(est: EstimatorSpec) -> int:
    return 2 if est.order == Order.SECOND else 1


def run_replication(args: Tuple[ExperimentConfig, int, bool]) -> Dict:
    """
    One replication: a single path feeds every estimator and Palm check,
    the finite-difference oracles simulate their own stencil points.
    """
    config, replication, check_load = args
    time_s = perf_counter()
    param = config.parameter
    path = simulate_path(
        config.arrivals,
        config.services,
        param.kind,
        param.value,
        config.horizon,
        config.seed,
        warmup=config.warmup,
        replication=replication,
        check_load=check_load,
    )
    estimates = []
    for est in config.estimators:
        out = estimate(path, config, est).to_dict()
        out["estimator"] = est.op
        estimates.append(out)

    fd = []
    for oracle in config.oracles:
        if oracle.type != FINITE_DIFFERENCE:
            continue
        out = finite_difference(
            config,
            h=config.fd_step(oracle),
            stencil=oracle.stencil,
            crn=oracle.crn,
            replication=replication,
            batches=config.batches,
        ).to_dict()
        out["order"] = STENCILS[oracle.stencil][2]
        fd.append(out)

    palm = [report.to_dict() for report in palm_reports(path, config)]
    elapsed_ms = (perf_counter() - time_s) * 1e3
    if env_flag(shared.profiler):
        logger.debug(f"replication {replication}: {elapsed_ms:.2f}ms")
    return {
        "replication": replication,
        "seed": config.seed,
        "n_customers": path.n,
        "estimates": estimates,
        "finite_difference": fd,
        "palm": palm,
    }


def _pool_values(rows: List[Dict], level: float) -> Tuple[float, float, float, float]:
    """Mean over replications with the between-replication standard error"""
    values = [row["value"] for row in rows]
    value = float(np.mean(values))
    if len(rows) < 2:
        # a single replication keeps its batch-means error
        return value, rows[0]["std_error"], rows[0]["ci_lo"], rows[0]["ci_hi"]
    se = float(np.std(values, ddof=1) / np.sqrt(len(rows)))
    lo, hi = t_interval(value, se, len(rows), level)
    return value, se, lo, hi


class ExperimentRunner:
    """
    The ExperimentRunner declares a set of methods
    for managing result observers.
    """

    def __init__(self, config: ExperimentConfig, jobs: int = 1, force_unstable: bool = False):
        self.config = config
        self.jobs = max(1, int(jobs))
        self.force_unstable = force_unstable
        self.unstable = False
        self._observers: List[IpaObserver] = []

    def attach(self, observer: IpaObserver):
        """
        Runner attaches an observer
        """
        logger.trace("attaching an observer.")
        self._observers.append(observer)
        observer.open()

    def detach(self, observer: IpaObserver):
        """
        Runner detaches an observer
        """
        self._observers.remove(observer)

    def notify(self, kind: str, record: Dict, **kwargs):
        """
        Sends a result record to every observer
        """
        for observer in self._observers:
            observer.update(self, kind, record, **kwargs)

    def close(self):
        """Closes observers"""
        for observer in self._observers:
            observer.close()

    def _check_stability(self):
        report = self.config.stability()
        if report.stable:
            return
        if not self.force_unstable:
            self.config.require_stable()
        logger.warning(f"forced run on unstable input, load {report.load_estimate:.6g}")
        self.unstable = True

    def _replications(self) -> List[Dict]:
        args = [
            (self.config, rep, not self.unstable) for rep in range(self.config.replications)
        ]
        if self.jobs == 1 or len(args) == 1:
            results = [run_replication(arg) for arg in args]
        else:
            with multiprocessing.Pool(processes=min(self.jobs, len(args))) as pool:
                results = pool.map(run_replication, args)
        return sorted(results, key=lambda res: res["replication"])

    def _analytic(self, est: EstimatorSpec) -> Optional[float]:
        if not any(oracle.type == ANALYTIC for oracle in self.config.oracles):
            return None
        spec = self.config.functional.spec
        if est.op == "tail_probability_derivative":
            spec = {"type": "indicator", "threshold": tail_threshold(est, self.config)}
        side = Side.RIGHT if est.side == Side.TWO_SIDED else est.side
        param = self.config.parameter
        try:
            return analytic_derivative(
                self.config.arrivals,
                self.config.services,
                param.kind,
                param.value,
                spec,
                order=_estimator_order(est),
                side=side,
            )
        except UnstableInputError as err:
            logger.warning(f"no analytic value for {est.label}: {err}")
            return None

    def _pooled(self, results: List[Dict]) -> List[Dict]:
        level = self.config.ci_level
        pooled = []
        for idx, est in enumerate(self.config.estimators):
            rows = [res["estimates"][idx] for res in results]
            values = [row["value"] for row in rows]
            value, se, ci_lo, ci_hi = _pool_values(rows, level)
            record = {
                "estimator": est.op,
                "side": est.side.value,
                "order": est.order.value,
                "value": value,
                "std_error": se,
                "ci_lo": ci_lo,
                "ci_hi": ci_hi,
                "atom_correction": float(np.mean([row["atom_correction"] for row in rows])),
                "coalescence_correction": float(
                    np.mean([row["coalescence_correction"] for row in rows])
                ),
                "n_customers": int(sum(row["n_customers"] for row in rows)),
                "replications": len(rows),
                "oracle": None,
                "oracle_value": None,
                "oracle_gap": None,
                "oracle_std_error": None,
            }
            analytic = self._analytic(est)
            if analytic is not None:
                record.update(
                    oracle=ANALYTIC,
                    oracle_value=analytic,
                    oracle_gap=value - analytic,
                    oracle_std_error=se,
                )
            else:
                self._attach_fd(record, est, results, values)
            pooled.append(record)
        return pooled

    def _attach_fd(self, record: Dict, est: EstimatorSpec, results: List[Dict], values: List[float]):
        """Compares with the first finite-difference oracle of the same order"""
        order = _estimator_order(est)
        for j, oracle in enumerate(o for o in self.config.oracles if o.type == FINITE_DIFFERENCE):
            if STENCILS[oracle.stencil][2] != order:
                continue
            fd_rows = [res["finite_difference"][j] for res in results]
            fd_values = [row["value"] for row in fd_rows]
            fd_value = float(np.mean(fd_values))
            gaps = np.asarray(values) - np.asarray(fd_values)
            if gaps.size > 1:
                joint = float(np.std(gaps, ddof=1) / np.sqrt(gaps.size))
            else:
                joint = float(np.hypot(record["std_error"], fd_rows[0]["std_error"]))
            record.update(
                oracle=FINITE_DIFFERENCE,
                oracle_value=fd_value,
                oracle_gap=record["value"] - fd_value,
                oracle_std_error=joint,
            )
            return

    @mark
    def run(self) -> Dict:
        """Runs every replication and returns the results document"""
        self._check_stability()
        config = self.config
        stability = config.stability()
        self.notify(
            CONFIG,
            {
                "experiment": config.name,
                "version": __version__,
                "config": config.to_record(),
                "stability": stability._asdict(),
                "unstable": self.unstable,
            },
        )
        logger.info(
            f"{config.name}: {config.replications} replication(s) of {config.horizon} customers"
            f" after {config.warmup} warmup, jobs={self.jobs}"
        )
        results = self._replications()
        for res in results:
            self.notify(REPLICATION, res)
        pooled = self._pooled(results)
        for record in pooled:
            self.notify(POOLED, record)
        palm_passed = all(p["pass"] for res in results for p in res["palm"])
        summary = {
            "experiment": config.name,
            "replications": len(results),
            "palm_passed": palm_passed,
            "unstable": self.unstable,
        }
        self.notify(SUMMARY, summary)
        return {
            "experiment": config.name,
            "version": __version__,
            "config": config.to_record(),
            "stability": stability._asdict(),
            "unstable": self.unstable,
            "replications": results,
            "pooled": pooled,
            "summary": summary,
        }
