# -*- coding: utf-8 -*-
"""
This file holds the enums, NamedTuples and settings shared by gg1_ipa
"""
import os
from typing import NamedTuple, Optional
from dataclasses import dataclass, field
from functools import partial, lru_cache
from enum import Enum

from .constants import (
    IPA_DEFAULT_BATCHES,
    IPA_DEFAULT_CI_LEVEL,
    IPA_DEFAULT_PALM_K,
)


@dataclass(frozen=True)
class EnvSettings:
    """
    Runtime settings read from environment variables
    """

    # ---------------------------------
    # Loglevel
    # ---------------------------------
    loglevel: str = field(
        default_factory=partial(os.environ.get, "IPA_LOGLEVEL", "INFO")
    )
    logfile: str = field(default_factory=partial(os.environ.get, "IPA_LOGFILE", ""))

    # ---------------------------------
    # Replication workers
    # ---------------------------------
    jobs: str = field(default_factory=partial(os.environ.get, "IPA_JOBS", "1"))

    # ---------------------------------
    # Output analysis
    # ---------------------------------
    batches: str = field(
        default_factory=partial(
            os.environ.get, "IPA_BATCHES", str(IPA_DEFAULT_BATCHES)
        )
    )
    ci_level: str = field(
        default_factory=partial(
            os.environ.get, "IPA_CI_LEVEL", str(IPA_DEFAULT_CI_LEVEL)
        )
    )
    palm_k: str = field(
        default_factory=partial(os.environ.get, "IPA_PALM_K", str(IPA_DEFAULT_PALM_K))
    )

    # ---------------------------------
    # Atom matching tolerance (0 = exact)
    # ---------------------------------
    atom_eps: str = field(
        default_factory=partial(os.environ.get, "IPA_ATOM_EPS", "0.0")
    )

    # ---------------------------------
    # Enable timing of replications
    # ---------------------------------
    profiler: str = field(
        default_factory=partial(os.environ.get, "IPA_PROFILER", "False")
    )

    @lru_cache
    def __new__(cls) -> object:
        return super().__new__(cls)


class ParameterKind(str, Enum):
    """Which input of the queue is being perturbed"""

    SERVICE_THETA = "service-theta"
    SPEED_NU = "speed-nu"
    ARRIVAL_ALPHA = "arrival-alpha"


class Side(str, Enum):
    """Side of a derivative"""

    RIGHT = "right"
    LEFT = "left"
    TWO_SIDED = "two-sided"


class Order(str, Enum):
    """Order of a derivative"""

    FIRST = "first"
    SECOND = "second"


class Stencil(str, Enum):
    """Finite-difference stencils"""

    FORWARD = "forward"
    BACKWARD = "backward"
    CENTRAL = "central"
    SECOND_CENTRAL = "second-central"
    SECOND_SYMMETRIC = "second-symmetric"


class PalmIdentity(str, Enum):
    """Palm-calculus identities checked on simulated paths"""

    INVERSION = "inversion"
    WALD_LEMMA = "wald-lemma"
    ERGODIC_EQUIVALENCE = "ergodic-equivalence"


class ExitCodes(Enum):
    """Process exit codes of the CLI"""

    SUCCESS = 0
    EVALIDATION = 2
    EUNSTABLE = 3
    EESTIMATION = 4


class CustomerRecord(NamedTuple):
    """
    One customer of a simulated path
    """

    w: float  # workload found at arrival, W(T_k-)
    sigma: float  # service requirement
    d: float  # W'(T_k)
    d2: float  # W''(T_k)
    idle_before: bool  # customer found the system empty
    w_next: float  # W(T_{k+1}-)
    busy_time: float  # time the server worked during (T_k, T_{k+1}]


class StabilityReport(NamedTuple):
    """Result of a stability probe"""

    load_estimate: float
    std_error: float
    stable: bool


class DerivativeEstimate(NamedTuple):
    """
    Customer-average derivative estimate with its batch-means error
    """

    value: float
    std_error: float
    n_customers: int
    side: Side
    order: Order
    parameter_kind: ParameterKind
    atom_correction: float = 0.0
    coalescence_correction: float = 0.0
    ci_lo: float = float("nan")
    ci_hi: float = float("nan")

    def to_dict(self) -> dict:
        """Flat dictionary for the results document"""
        out = self._asdict()
        out["side"] = self.side.value
        out["order"] = self.order.value
        out["parameter_kind"] = self.parameter_kind.value
        return out


class FDEstimate(NamedTuple):
    """Finite-difference quotient under common or independent random numbers"""

    value: float
    h: float
    stencil: Stencil
    std_error: float
    crn: bool = True
    n_customers: int = 0

    def to_dict(self) -> dict:
        """Flat dictionary for the results document"""
        out = self._asdict()
        out["stencil"] = self.stencil.value
        return out


class PalmCheckReport(NamedTuple):
    """Both sides of a Palm identity and the verdict"""

    identity: PalmIdentity
    lhs: float
    rhs: float
    joint_std_error: float
    passed: bool
    tolerance: Optional[float] = None

    def to_dict(self) -> dict:
        """Flat dictionary for the results document"""
        out = self._asdict()
        out["identity"] = self.identity.value
        out["pass"] = out.pop("passed")
        return out
