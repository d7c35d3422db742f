# -*- coding: utf-8 -*-
"""
Small helpers shared across gg1_ipa
"""
from functools import wraps
from time import perf_counter

from loguru import logger

from .ipa_env import shared

TRUTHY = frozenset(("y", "yes", "t", "true", "on", "1"))
FALSY = frozenset(("n", "no", "f", "false", "off", "0", ""))


def env_flag(val: str) -> bool:
    """
    Reads an on/off environment setting such as IPA_PROFILER.

    Raises ValueError on anything that is neither truthy nor falsy.
    """
    key = str(val).strip().lower()
    if key in TRUTHY:
        return True
    if key in FALSY:
        return False
    raise ValueError(f"invalid truth value: {val}")


def mark(func):
    """
    Traces entry and exit of heavy operations, with wall time when
    IPA_PROFILER is on.
    """

    @wraps(func)
    def wrapper(*args, **kwargs):
        logger.trace(f"Entering {func.__name__}")
        time_s = perf_counter()
        out = func(*args, **kwargs)
        if env_flag(shared.profiler):
            logger.debug(f"{func.__qualname__}: {(perf_counter() - time_s) * 1e3:.2f}ms")
        logger.trace(f"Exiting {func.__name__}")
        return out

    return wrapper
