# -*- coding: utf-8 -*-
"""Experiment files, runner and result observers"""
from gg1_ipa.pg_experiment.ipa_config import (
    ExperimentConfig,
    ValidationReport,
    build_config,
    load_config,
    validate_config,
)
from gg1_ipa.pg_experiment.ipa_observer import (
    CSV_COLUMNS,
    CsvWriter,
    IpaObserver,
    JsonlWriter,
    LogSummary,
)
from gg1_ipa.pg_experiment.ipa_runner import ExperimentRunner, run_replication

__all__ = [
    "CSV_COLUMNS",
    "CsvWriter",
    "ExperimentConfig",
    "ExperimentRunner",
    "IpaObserver",
    "JsonlWriter",
    "LogSummary",
    "ValidationReport",
    "build_config",
    "load_config",
    "run_replication",
    "validate_config",
]
