# -*- coding: utf-8 -*-
"""
Non-overlapping batch means for correlated simulation output
"""
from typing import Callable, List, Tuple

import numpy as np
from scipy.stats import t

from gg1_ipa.utils.constants import IPA_DEFAULT_BATCHES, IPA_DEFAULT_CI_LEVEL


def batch_slices(n: int, batches: int = IPA_DEFAULT_BATCHES) -> List[slice]:
    """Contiguous, nearly equal index ranges covering range(n)"""
    count = max(1, min(int(batches), int(n)))
    edges = np.linspace(0, n, count + 1).round().astype(int)
    return [slice(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


def batch_values(
    func: Callable[..., float], n: int, *arrays: np.ndarray, batches: int = IPA_DEFAULT_BATCHES
) -> np.ndarray:
    """func applied to every batch of the aligned arrays"""
    return np.asarray(
        [func(*(a[s] for a in arrays)) for s in batch_slices(n, batches)], dtype=float
    )


def batch_std_error(values: np.ndarray) -> float:
    """Standard error of the grand mean from batch statistics"""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float("nan")
    return float(np.std(values, ddof=1) / np.sqrt(values.size))


def batch_means(
    series: np.ndarray, batches: int = IPA_DEFAULT_BATCHES
) -> Tuple[float, float, int]:
    """
    Mean of the series with its batch-means standard error.

    Returns:
        (mean, std_error, number of batches)
    """
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        return float("nan"), float("nan"), 0
    means = batch_values(np.mean, series.size, series, batches=batches)
    return float(series.mean()), batch_std_error(means), int(means.size)


def t_interval(
    value: float, std_error: float, batches: int, level: float = IPA_DEFAULT_CI_LEVEL
) -> Tuple[float, float]:
    """Student-t confidence interval with batches - 1 degrees of freedom"""
    if batches < 2 or not np.isfinite(std_error):
        return float("nan"), float("nan")
    half = float(t.ppf(0.5 + level / 2.0, df=batches - 1)) * std_error
    return value - half, value + half
