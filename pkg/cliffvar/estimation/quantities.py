"""
First- and second-order quantities as parameter-shift combinations.
"""
from enum import Enum
from typing import List, Optional, Tuple

from cliffvar.circuits.rewrites import Shift


class Quantity(Enum):
    COST = "cost"
    GRADIENT = "gradient"
    COST_SQUARED = "cost_squared"
    SQUARED_GRADIENT = "squared_gradient"
    GRADIENT_VARIANCE = "gradient_variance"

    @property
    def order(self) -> int:
        return 1 if self in (Quantity.COST, Quantity.GRADIENT) else 2


def first_order_terms(quantity: Quantity, k: int = 0) -> List[Tuple[Optional[Shift], float]]:
    """(shift, weight) pairs: C or (C(+) - C(-)) / 2."""
    if quantity is Quantity.COST:
        return [(None, 1.0)]
    if quantity is Quantity.GRADIENT:
        return [((k, 1), 0.5), ((k, -1), -0.5)]
    raise ValueError(f"{quantity.value} is not a first-order quantity")


def second_order_terms(quantity: Quantity, k: int = 0) -> List[Tuple[Optional[Shift], Optional[Shift], float]]:
    """(shift_a, shift_b, weight): C^2 or (C++ - 2 C+- + C--) / 4."""
    if quantity is Quantity.COST_SQUARED:
        return [(None, None, 1.0)]
    if quantity is Quantity.SQUARED_GRADIENT:
        # C+- and C-+ are equal in mean and share one term
        return [((k, 1), (k, 1), 0.25), ((k, 1), (k, -1), -0.5), ((k, -1), (k, -1), 0.25)]
    raise ValueError(f"{quantity.value} is not a second-order quantity")
