# -*- coding: utf-8 -*-
"""Shared fixtures of the gg1_ipa test suites"""
import copy
import json
import sys

import pytest
from loguru import logger

from gg1_ipa.pg_queue.models import ArrivalModel, ServiceModel

# D/D/1 with tau = 1 and f = 1{w >= 0.3}
EXAMPLE_DD1 = {
    "name": "dd1-indicator",
    "arrivals": {"family": "deterministic", "rate": 1.0},
    "services": {"family": "deterministic-scale"},
    "parameter": {"kind": "service-theta", "value": 0.3, "interval": [0.2, 0.6]},
    "functional": {"type": "indicator", "threshold": 0.3},
    "estimators": [
        {"op": "first_order", "side": "right"},
        {"op": "first_order", "side": "left"},
    ],
    "horizon": 1000,
    "warmup": 0,
    "replications": 1,
    "seed": 7,
    "oracles": [{"type": "analytic"}],
}

# M/M/1 with lambda = 0.5 and mean service 1
EXAMPLE_MM1 = {
    "name": "mm1-identity",
    "arrivals": {"family": "poisson", "rate": 0.5},
    "services": {"family": "exponential-scale"},
    "parameter": {"kind": "service-theta", "value": 1.0, "interval": [0.9, 1.1]},
    "functional": {"type": "identity"},
    "estimators": [{"op": "first_order", "side": "right"}],
    "horizon": 20000,
    "warmup": 100,
    "replications": 1,
    "seed": 11,
}


@pytest.fixture(autouse=True)
def quiet_logger():
    """Every test starts and ends with a single warning-level stderr sink"""
    logger.remove()
    logger.add(sys.stderr, level="WARNING")
    yield
    logger.remove()
    logger.add(sys.stderr, level="WARNING")


@pytest.fixture
def dd1_config():
    return copy.deepcopy(EXAMPLE_DD1)


@pytest.fixture
def mm1_config():
    return copy.deepcopy(EXAMPLE_MM1)


@pytest.fixture
def write_config(tmp_path):
    """Writes an experiment dict to a JSON file and returns its path"""

    def _write(raw, name="experiment.json"):
        path = tmp_path / name
        path.write_text(json.dumps(raw))
        return path

    return _write


@pytest.fixture
def dd1_models():
    """Deterministic arrivals every time unit, deterministic services on [0.2, 0.6]"""
    return (
        ArrivalModel("deterministic", rate=1.0),
        ServiceModel("deterministic-scale", theta_interval=(0.2, 0.6), theta=0.5),
    )


@pytest.fixture
def mm1_models():
    """Poisson(0.5) arrivals, exponential services on [0.5, 1.5]"""
    return (
        ArrivalModel("poisson", rate=0.5),
        ServiceModel("exponential-scale", theta_interval=(0.5, 1.5), theta=1.0),
    )
