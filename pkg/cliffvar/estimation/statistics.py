"""
Statistical aggregation: batch means, bootstrap batches and scaling fits.
"""
import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from sklearn.linear_model import LinearRegression

from cliffvar.config import ESTIMATOR_CONFIG
from cliffvar.errors import EstimationError

logger = logging.getLogger(__name__)


def batch_bounds(samples: int, batches: int = None) -> List[Tuple[int, int]]:
    """Fixed partition of 0..samples-1 into min(batches, samples) contiguous ranges."""
    if samples < 1:
        raise EstimationError(f"Sample count must be at least 1, got {samples}")
    batches = min(batches or ESTIMATOR_CONFIG["batches"], samples)
    edges = np.linspace(0, samples, batches + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


@dataclass
class SampleSummary:
    """Mean of per-sample values with a batch-means standard error."""
    count: int
    mean: float
    standard_error: float
    batches: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def summarize_batches(batch_values: Sequence[np.ndarray]) -> SampleSummary:
    """Combine per-batch value arrays (in batch order) into a summary."""
    values = np.concatenate([np.asarray(b, dtype=float) for b in batch_values])
    if values.size == 0:
        raise EstimationError("No samples to summarize")
    means = np.array([np.mean(b) for b in batch_values])
    if len(means) < 2:
        se = 0.0
    else:
        se = float(np.std(means, ddof=1) / np.sqrt(len(means)))
    return SampleSummary(int(values.size), float(values.mean()), se, len(means))


def bootstrap_estimators(pool: np.ndarray, K: int, repetitions: int, rng: np.random.Generator) -> np.ndarray:
    """Means of ``repetitions`` resamples of size K drawn with replacement from pool."""
    pool = np.asarray(pool, dtype=float)
    if pool.size == 0:
        raise EstimationError("Bootstrap pool is empty")
    picks = rng.integers(0, pool.size, size=(repetitions, K))
    return pool[picks].mean(axis=1)


@dataclass
class ScalingFit:
    """Least-squares line through transformed data."""
    slope: float
    intercept: float
    r_squared: float
    points: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _fit(x: np.ndarray, y: np.ndarray) -> ScalingFit:
    mask = np.isfinite(x) & np.isfinite(y)
    x, y = x[mask], y[mask]
    if x.size < 2:
        return ScalingFit(float("nan"), float("nan"), float("nan"), int(x.size))
    model = LinearRegression().fit(x.reshape(-1, 1), y)
    r_squared = float(model.score(x.reshape(-1, 1), y))
    return ScalingFit(float(model.coef_[0]), float(model.intercept_), r_squared, int(x.size))


def fit_log_linear(x: Sequence[float], y: Sequence[float]) -> ScalingFit:
    """Fit log(y) = slope * x + intercept over positive y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_y = np.where(y > 0, np.log(np.where(y > 0, y, 1.0)), np.nan)
    return _fit(x, log_y)


def fit_log_log(x: Sequence[float], y: Sequence[float]) -> ScalingFit:
    """Fit log(y) = slope * log(x) + intercept over positive x, y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    valid = (x > 0) & (y > 0)
    log_x = np.where(valid, np.log(np.where(valid, x, 1.0)), np.nan)
    log_y = np.where(valid, np.log(np.where(valid, y, 1.0)), np.nan)
    return _fit(log_x, log_y)
