# -*- coding: utf-8 -*-
"""
Exceptions raised by gg1_ipa
"""
from typing import List, Tuple


class IpaError(ValueError):
    """Base class of every gg1_ipa error"""


class FunctionalError(IpaError):
    """Invalid test functional or an operation it does not support"""


class ModelError(IpaError):
    """Invalid service or arrival model, or a value outside its domain"""

    def __init__(self, msg: str, field: str = ""):
        self.field = field
        super().__init__(msg)


class UnstableInputError(IpaError):
    """The queue load is not strictly below one"""

    def __init__(self, load: float, msg: str = ""):
        self.load = load
        super().__init__(msg or f"unstable input: load {load:.6g} >= 1")


class EstimationError(IpaError):
    """An estimator cannot be applied to the given path or functional"""


class OneSidedDerivativeError(EstimationError):
    """Two-sided estimate requested but the realized atom corrections differ"""

    def __init__(self, right: float, left: float):
        self.right = right
        self.left = left
        super().__init__(
            "derivative is one-sided on this path: "
            f"atom corrections right={right:.6g}, left={left:.6g}"
        )


class ConfigError(IpaError):
    """Experiment file failed schema or semantic validation"""

    def __init__(self, errors: List[Tuple[str, str]]):
        self.errors = list(errors)
        lines = [f"{field}: {msg}" for field, msg in self.errors]
        super().__init__("invalid experiment config\n" + "\n".join(lines))
