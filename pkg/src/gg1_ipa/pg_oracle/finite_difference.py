# -*- coding: utf-8 -*-
"""
Finite-difference oracle of J(p) = E f(W) under common random numbers.

J(p) is estimated at every stencil point by lambda_p times the customer
average of the closed-form integral of f(W) between arrivals. The stencil is
applied customer by customer, so batch means of the combined series give the
joint standard error of the quotient.
"""
from typing import TYPE_CHECKING, Dict, Optional, Sequence, Tuple

from loguru import logger

from gg1_ipa.pg_estimator.batch_means import batch_means
from gg1_ipa.pg_queue.lindley import interval_integrals, simulate_path
from gg1_ipa.utils.constants import IPA_DEFAULT_BATCHES, IPA_FD_REL_STEP
from gg1_ipa.utils.ipa_errors import ModelError
from gg1_ipa.utils.ipa_utils import mark
from gg1_ipa.utils.objects import FDEstimate, Stencil

if TYPE_CHECKING:
    from gg1_ipa.pg_experiment.ipa_config import ExperimentConfig

# stencil -> (offsets in units of h, weights, derivative order)
STENCILS: Dict[Stencil, Tuple[Tuple[int, ...], Tuple[float, ...], int]] = {
    Stencil.FORWARD: ((0, 1), (-1.0, 1.0), 1),
    Stencil.BACKWARD: ((-1, 0), (-1.0, 1.0), 1),
    Stencil.CENTRAL: ((-1, 1), (-0.5, 0.5), 1),
    Stencil.SECOND_CENTRAL: ((0, 1, 2), (1.0, -2.0, 1.0), 2),
    Stencil.SECOND_SYMMETRIC: ((-1, 0, 1), (1.0, -2.0, 1.0), 2),
}


def stencil_points(value: float, h: float, stencil: Stencil) -> Tuple[float, ...]:
    """Parameter values the stencil evaluates J at"""
    offsets, _, _ = STENCILS[Stencil(stencil)]
    return tuple(value + k * h for k in offsets)


def stencil_quotient(values: Sequence[float], h: float, stencil: Stencil):
    """
    Difference quotient of J values taken at stencil_points, in order.

    Works on floats and on aligned numpy arrays alike.
    """
    _, weights, order = STENCILS[Stencil(stencil)]
    if len(values) != len(weights):
        raise ValueError(f"{stencil} needs {len(weights)} values, got {len(values)}")
    total = sum(w * v for w, v in zip(weights, values))
    return total / h**order


@mark
def finite_difference(
    config: "ExperimentConfig",
    h: Optional[float] = None,
    stencil: Stencil = Stencil.CENTRAL,
    crn: bool = True,
    replication: int = 0,
    batches: int = IPA_DEFAULT_BATCHES,
) -> FDEstimate:
    """
    Stencil quotient of J around the configured parameter value.

    With ``crn`` every stencil point reuses the service uniforms and unit
    inter-arrival times of ``replication``; otherwise each point draws its
    own streams.
    """
    stencil = Stencil(stencil)
    param = config.parameter
    if h is None:
        h = IPA_FD_REL_STEP * abs(param.value)
    if h <= 0:
        raise ModelError(f"finite-difference step must be > 0, got {h}")
    points = stencil_points(param.value, h, stencil)
    lo, hi = param.interval
    for point in points:
        if not lo <= point <= hi:
            raise ModelError(
                f"stencil point {point:.6g} leaves the parameter interval [{lo}, {hi}]"
            )

    # in sequence; the runner parallelizes over replications
    series = []
    for idx, point in enumerate(points):
        path = simulate_path(
            config.arrivals,
            config.services,
            param.kind,
            point,
            config.horizon,
            config.seed,
            warmup=config.warmup,
            replication=replication,
            point=0 if crn else idx + 1,
        )
        series.append(path.lambda_hat * interval_integrals(path, config.functional))

    combined = stencil_quotient(series, h, stencil)
    value, std_error, _ = batch_means(combined, batches)
    logger.debug(f"FD {stencil.value} h={h:.4g} crn={crn}: {value:.6g} +- {std_error:.3g}")
    return FDEstimate(
        value=value,
        h=float(h),
        stencil=stencil,
        std_error=std_error,
        crn=crn,
        n_customers=config.horizon,
    )

