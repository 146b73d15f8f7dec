"""
Sample-count planning from the bounded-differences concentration bound.
"""
import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Optional

from cliffvar.errors import EstimationError

logger = logging.getLogger(__name__)


class EstimationMode(Enum):
    """How approximants are sampled."""
    CONVEX = "convex"
    QUASIPROBABILITY = "quasiprobability"


@dataclass(frozen=True)
class SamplePlan:
    """Sample count K guaranteeing |estimate - mean| <= epsilon with probability >= 1 - delta."""
    epsilon: float
    delta: float
    M: int
    norm_bound: float
    K: int
    gamma_total: float
    mode: EstimationMode

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["mode"] = self.mode.value
        return data


def plan_samples(epsilon: float, delta: float, M: int, norm_bound: float,
                 gamma_total: float = 1.0, mode: Optional[EstimationMode] = None) -> SamplePlan:
    """K = ceil((2 / eps^2) ln(2 / delta) gamma M ||O||^2)."""
    if epsilon <= 0:
        raise EstimationError(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta < 1:
        raise EstimationError(f"delta must lie in (0, 1), got {delta}")
    if M < 1:
        raise EstimationError(f"M must be at least 1, got {M}")
    if norm_bound <= 0:
        raise EstimationError(f"norm bound must be positive, got {norm_bound}")
    if gamma_total < 1 - 1e-12:
        raise EstimationError(f"gamma must be at least 1, got {gamma_total}")
    if mode is None:
        mode = EstimationMode.QUASIPROBABILITY if gamma_total > 1 + 1e-12 else EstimationMode.CONVEX
    K = math.ceil((2 / epsilon ** 2) * math.log(2 / delta) * gamma_total * M * norm_bound ** 2)
    plan = SamplePlan(epsilon, delta, M, norm_bound, max(1, K), gamma_total, mode)
    logger.debug(f"Planned K={plan.K} samples (eps={epsilon}, delta={delta}, M={M}, gamma={gamma_total:.4f})")
    return plan
