"""Constant-product swap mathematics.

For a pool with reserves (x, y) and fee rate f, paying dx buys

    dy = y * (1 - f) * dx / (x + (1 - f) * dx)

which keeps x * y invariant after the fee is skimmed off the input.  Output
along a multi-pool path is the left fold of this map; it is strictly
increasing and concave in dx, so its derivative is strictly decreasing --
the property the profit optimizer relies on.

All functions are pure and accept numpy arrays for dx transparently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class SwapLeg:
    reserve_in: float
    reserve_out: float
    fee_rate: float

    def __post_init__(self):
        if not self.reserve_in > 0 or not self.reserve_out > 0:
            raise ValueError(f"reserves must be positive, got {self.reserve_in}, {self.reserve_out}")
        if not 0.0 <= self.fee_rate < 1.0:
            raise ValueError(f"fee_rate must be in [0, 1), got {self.fee_rate}")


def swap_out(leg: SwapLeg, dx):
    """Output amount for input dx on a single pool; 0 <= dy < reserve_out."""
    if _any_negative(dx):
        raise ValueError("swap input must be non-negative")
    g = (1.0 - leg.fee_rate) * dx
    return leg.reserve_out * g / (leg.reserve_in + g)


def path_out(legs: Sequence[SwapLeg], dx):
    """Output of feeding dx through the legs left to right."""
    if not legs:
        raise ValueError("path needs at least one leg")
    amount = dx
    for leg in legs:
        amount = swap_out(leg, amount)
    return amount


def path_marginal(legs: Sequence[SwapLeg], dx):
    """Analytic derivative d(path_out)/d(dx), by the chain rule.

    A single leg differentiates to (1-f) * x * y / (x + (1-f)*dx)^2; the path
    derivative is the product of leg derivatives evaluated at the running
    intermediate amounts.  Strictly positive and strictly decreasing in dx.
    """
    if not legs:
        raise ValueError("path needs at least one leg")
    if _any_negative(dx):
        raise ValueError("swap input must be non-negative")
    amount = dx
    deriv = 1.0
    for leg in legs:
        keep = 1.0 - leg.fee_rate
        denom = leg.reserve_in + keep * amount
        deriv = deriv * (keep * leg.reserve_in * leg.reserve_out) / (denom * denom)
        amount = leg.reserve_out * keep * amount / denom
    return deriv


def _any_negative(dx) -> bool:
    try:
        return bool(dx < 0)
    except ValueError:  # numpy array: reject if any entry is negative
        return bool((dx < 0).any())
