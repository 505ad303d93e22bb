"""Optimal input sizing for detected paths.

Path output is concave and increasing, so profit is maximized where the
marginal output equals the relative value of the end token: 1 for loops,
P_start/P_end under external USD prices for non-loops, or the end/start
reserve ratio of a pool holding both tokens when no prices are supplied.
The marginal is strictly decreasing, so the optimum is the unique root of
``path_marginal(dx) - target`` and plain bisection converges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date as Date

from .amm import SwapLeg, path_marginal, path_out
from .detector import KIND_LOOP, ArbPath
from .errors import ConfigurationError, CorruptPathError, MissingPriceError
from .market_data import PriceTable
from .token_graph import TokenGraph

BISECT_REL_WIDTH = 1e-9
BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class Opportunity:
    """A path together with its profit-maximizing input.

    ``profit_numeraire`` is in start-token units for loops and for non-loops
    sized against a shared pool's reserve ratio; it is in USD for non-loops
    sized against external prices.  ``profit_usd`` is filled whenever USD
    prices for the relevant tokens were available.
    """

    path: ArbPath
    optimal_input: float
    output: float
    profit_numeraire: float
    marginal_at_opt: float
    start_address: str
    end_address: str
    profit_usd: float | None = None


def legs_for_path(path: ArbPath, graph: TokenGraph) -> list[SwapLeg]:
    legs = []
    for a, b in zip(path.tokens, path.tokens[1:]):
        edge = graph.edge(a, b)
        if edge is None:
            raise CorruptPathError(f"path uses missing edge {a}->{b}")
        legs.append(SwapLeg(edge.reserve_from, edge.reserve_to, graph.fee_rate))
    return legs


def _optimal_input_python(legs: list[SwapLeg], target: float) -> float | None:
    """Root of path_marginal(dx) = target, or None when already <= at dx=0.

    Brackets by doubling from reserve_in * 1e-9 (the marginal decreases to 0,
    so doubling terminates), then bisects to relative width 1e-9.
    """
    if not path_marginal(legs, 0.0) > target:
        return None
    lo = 0.0
    hi = legs[0].reserve_in * 1e-9
    while path_marginal(legs, hi) > target:
        lo = hi
        hi *= 2.0
        if not math.isfinite(hi):  # unreachable for real pools; guard anyway
            return None
    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if path_marginal(legs, mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= BISECT_REL_WIDTH * hi:
            break
    return 0.5 * (lo + hi)


def _optimal_input_fast(legs: list[SwapLeg], target: float) -> float | None:
    import numpy as np

    from ._fast import optimal_input_kernel

    xs = np.array([leg.reserve_in for leg in legs])
    ys = np.array([leg.reserve_out for leg in legs])
    fees = np.array([leg.fee_rate for leg in legs])
    dx = optimal_input_kernel(xs, ys, fees, target, 1e-9, BISECT_REL_WIDTH, BISECT_MAX_ITER)
    return None if dx < 0.0 else float(dx)


def _optimal_input(legs: list[SwapLeg], target: float) -> float | None:
    try:
        return _optimal_input_fast(legs, target)
    except ImportError:
        return _optimal_input_python(legs, target)


def optimize(
    path: ArbPath,
    graph: TokenGraph,
    prices: PriceTable | None = None,
    day: Date | None = None,
) -> Opportunity | None:
    """Size the input that maximizes profit along ``path``.

    Returns None when no positive-profit input exists.  For non-loops the
    profit target comes from USD prices when supplied, otherwise from the
    reserve ratio of a pool holding both endpoints.
    """
    legs = legs_for_path(path, graph)
    start, end = path.tokens[0], path.tokens[-1]
    start_addr = graph.tokens[start].address
    end_addr = graph.tokens[end].address

    # target marginal, and the value of one end token in start tokens
    p_start = None
    if path.kind == KIND_LOOP:
        target, end_value = 1.0, 1.0
    elif prices is not None:
        if day is None:
            raise ConfigurationError("a date is required to look up prices")
        p_start = prices.price(day, start_addr)
        p_end = prices.price(day, end_addr)
        target, end_value = p_start / p_end, p_end / p_start
    else:
        direct = graph.edge(start, end)
        if direct is None:
            raise MissingPriceError(
                f"no prices supplied and no pool holds both endpoint tokens "
                f"{start_addr} and {end_addr}"
            )
        target = direct.reserve_to / direct.reserve_from
        end_value = direct.reserve_from / direct.reserve_to

    dx = _optimal_input(legs, target)
    if dx is None:
        return None
    output = path_out(legs, dx)
    profit_start_units = output * end_value - dx
    if not profit_start_units > 0.0:
        return None

    if path.kind == KIND_LOOP:
        profit = profit_start_units
        usd = None
        if prices is not None and day is not None:
            p = prices.get(day, start_addr)
            usd = None if p is None else profit * p
    elif p_start is not None:
        profit = profit_start_units * p_start  # USD
        usd = profit
    else:
        profit = profit_start_units
        usd = None

    return Opportunity(
        path=path,
        optimal_input=dx,
        output=output,
        profit_numeraire=profit,
        marginal_at_opt=path_marginal(legs, dx),
        start_address=start_addr,
        end_address=end_addr,
        profit_usd=usd,
    )


def profit_usd(opp: Opportunity, prices: PriceTable, day: Date) -> float:
    """Value an opportunity in USD with external prices.

    Loops: (output - input) * P_start.  Non-loops: output * P_end - input *
    P_start.  Raises MissingPriceError when a needed price is absent.
    """
    if opp.path.kind == KIND_LOOP:
        return (opp.output - opp.optimal_input) * prices.price(day, opp.start_address)
    return (opp.output * prices.price(day, opp.end_address)
            - opp.optimal_input * prices.price(day, opp.start_address))
