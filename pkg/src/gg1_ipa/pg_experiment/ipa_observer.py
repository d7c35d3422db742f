# -*- coding: utf-8 -*-
"""
Observers of experiment results: JSON-lines document, CSV table, log summary
"""
import json
import math
import sys
from abc import ABC, abstractmethod
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from loguru import logger

# record kinds sent by the runner
CONFIG = "config"
REPLICATION = "replication"
POOLED = "pooled"
SUMMARY = "summary"

CSV_COLUMNS = [
    "estimator",
    "side",
    "value",
    "std_error",
    "ci_lo",
    "ci_hi",
    "atom_correction",
    "oracle_value",
    "oracle_gap",
]


class IpaObserver(ABC):
    """
    Abstract Class for Observe Pattern of the experiment runner
    """

    @abstractmethod
    def open(self):
        """
        Uses this function to initialize code after the constructor
        """

    @abstractmethod
    def update(self, caller: object, kind: str, record: Dict, **kwargs):
        """
        Uses this function to handle result records from the runner
        """

    @abstractmethod
    def close(self):
        """
        Uses this function to flush and close outputs
        """


def jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become null"""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Enum):
        return value.value
    return value


class JsonlWriter(IpaObserver):
    """Writes every record as one JSON line, to a file or to stdout"""

    def __init__(self, path: Optional[str] = None):
        self.path = path
        self.handle = None

    def open(self):
        if self.path:
            Path(self.path).parent.mkdir(parents=True, exist_ok=True)
            self.handle = open(self.path, "w", encoding="utf-8")
        else:
            self.handle = sys.stdout

    def update(self, caller: object, kind: str, record: Dict, **kwargs):
        line = json.dumps(jsonable({"record": kind, **record}), sort_keys=True)
        self.handle.write(line + "\n")

    def close(self):
        if self.handle is not None and self.handle is not sys.stdout:
            self.handle.close()
            logger.info(f"results written to {self.path}")
        self.handle = None


class CsvWriter(IpaObserver):
    """Pooled estimates with their oracle, one row per requested estimator"""

    def __init__(self, path: str):
        self.path = path
        self.rows: List[Dict] = []

    def open(self):
        self.rows = []

    def update(self, caller: object, kind: str, record: Dict, **kwargs):
        if kind != POOLED:
            return
        self.rows.append({col: record.get(col) for col in CSV_COLUMNS})

    def close(self):
        Path(self.path).parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(self.rows, columns=CSV_COLUMNS).to_csv(self.path, index=False)
        logger.info(f"table written to {self.path}")


class LogSummary(IpaObserver):
    """Logs the pooled estimates and the Palm verdicts"""

    def open(self):
        pass

    def update(self, caller: object, kind: str, record: Dict, **kwargs):
        if kind == POOLED:
            gap = record.get("oracle_gap")
            oracle = "" if gap is None else f", oracle gap {gap:.3g}"
            logger.success(
                f"{record['estimator']}[{record['side']}] = {record['value']:.6g}"
                f" +- {record['std_error']:.3g}{oracle}"
            )
        elif kind == REPLICATION:
            for report in record.get("palm", []):
                log = logger.info if report["pass"] else logger.warning
                log(
                    f"replication {record['replication']} {report['identity']}: "
                    f"lhs={report['lhs']:.6g} rhs={report['rhs']:.6g} pass={report['pass']}"
                )
        elif kind == SUMMARY and record.get("unstable"):
            logger.warning("results were produced from an unstable configuration")

    def close(self):
        pass
