"""Reproducible random markets with ground-truth arbitrage injection.

Structure: a Hamiltonian cycle through a seeded shuffle of the tokens (so
every token has degree >= 2 and the pool graph is connected) plus extra
pools on distinct random pairs.  Draws come from Philox4x64 streams keyed by
(seed, entity), one stream per decision, so growing a market never perturbs
the pools already generated.  The key layout is part of this module's
contract and must stay stable across versions:

    (seed, 0)            token shuffle for the cycle
    (seed, 2^32 + k)     pair choice for extra pool k
    (seed, 2*2^32 + k)   reserves for pool k

Every token has unit USD price, so a pool's TVL is simply the sum of its
real-unit reserves.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date as Date
from decimal import Decimal

import numpy as np

from .errors import ConfigurationError
from .market_data import PoolSnapshot, PriceTable, TokenMeta
from .token_graph import scaled_reserve

_SHUFFLE, _PAIRS, _RESERVES = 0, 1, 2

DEFAULT_DAY = Date(2021, 1, 1)
_FIRST_TRADE = Date(2020, 1, 1)
_LAST_TRADE = Date(2030, 12, 31)

TOKEN_DECIMALS = 18


@dataclass(frozen=True)
class MarketSpec:
    n_tokens: int
    n_pools: int
    reserve_range: tuple[float, float] = (50_000.0, 500_000.0)
    seed: int = 0
    fee_rate: float = 0.003

    def __post_init__(self):
        lo, hi = self.reserve_range
        if not lo > 0 or hi < lo:
            raise ConfigurationError(f"bad reserve_range {self.reserve_range}")
        if self.n_pools < self.n_tokens:
            raise ConfigurationError("n_pools must be >= n_tokens (every token needs degree 2)")
        if self.n_pools > self.n_tokens * (self.n_tokens - 1) // 2:
            raise ConfigurationError(
                f"{self.n_pools} pools infeasible for {self.n_tokens} tokens"
            )


def _stream(seed: int, kind: int, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, (kind << 32) + index]))


def token_meta(index: int) -> TokenMeta:
    return TokenMeta(address=f"0x{index:040x}", symbol=f"TK{index}", decimals=TOKEN_DECIMALS)


def _raw(units: float) -> Decimal:
    """Real token units -> raw reserve string, exactly float-round-trippable."""
    return Decimal(repr(units)).scaleb(TOKEN_DECIMALS)


def generate(spec: MarketSpec, day: Date = DEFAULT_DAY) -> list[PoolSnapshot]:
    """Generate a connected random market; byte-identical for equal inputs."""
    n = spec.n_tokens
    perm = _stream(spec.seed, _SHUFFLE).permutation(n)
    pairs: list[tuple[int, int]] = []
    used: set[tuple[int, int]] = set()
    for i in range(n):
        a, b = int(perm[i]), int(perm[(i + 1) % n])
        pair = (a, b) if a < b else (b, a)
        pairs.append(pair)
        used.add(pair)
    for k in range(n, spec.n_pools):
        rng = _stream(spec.seed, _PAIRS, k)
        while True:
            a, b = (int(x) for x in rng.choice(n, size=2, replace=False))
            pair = (a, b) if a < b else (b, a)
            if pair not in used:
                break
        pairs.append(pair)
        used.add(pair)

    lo, hi = spec.reserve_range
    pools = []
    for k, (a, b) in enumerate(pairs):
        r0, r1 = _stream(spec.seed, _RESERVES, k).uniform(lo, hi, size=2)
        pools.append(
            PoolSnapshot(
                pool_id=f"P{k:04d}",
                date=day,
                token0=token_meta(a),
                token1=token_meta(b),
                reserve0=_raw(float(r0)),
                reserve1=_raw(float(r1)),
                tvl_usd=float(r0) + float(r1),
                volume_usd=0.0,
                first_trade_date=_FIRST_TRADE,
                last_trade_date=_LAST_TRADE,
            )
        )
    return pools


def _pool_index(pools: list[PoolSnapshot]) -> dict[tuple[str, str], int]:
    return {pool.pair(): i for i, pool in enumerate(pools)}


def inject_arbitrage(
    pools: list[PoolSnapshot],
    cycle: list[str],
    rate_product: float,
) -> list[PoolSnapshot]:
    """Scale one reserve so the cycle's reserve-ratio product hits rate_product.

    ``cycle`` lists token addresses without the closing repeat; consecutive
    pairs (including last -> first) must each have a pool.  After injection
    the product of r_out/r_in around the cycle equals rate_product, so the
    cycle's spot-rate product is rate_product * (1-fee)^len and the loop is
    an arbitrage whenever that exceeds 1.
    """
    if len(cycle) < 3:
        raise ConfigurationError("injection cycle must have at least 3 tokens")
    if len(set(cycle)) != len(cycle):
        raise ConfigurationError("injection cycle must not repeat tokens")
    if not rate_product > 1.0:
        raise ConfigurationError("rate_product must exceed 1")

    index = _pool_index(pools)
    hops = list(zip(cycle, cycle[1:] + cycle[:1]))
    ratio = 1.0
    for a, b in hops:
        key = (a, b) if a < b else (b, a)
        if key not in index:
            raise ConfigurationError(f"no pool for cycle hop {a} -> {b}")
        pool = pools[index[key]]
        r_a, r_b = _units(pool, a), _units(pool, b)
        ratio *= r_b / r_a

    # scale the reserve of the cycle's first token inside the closing pool
    first, last = cycle[0], cycle[-1]
    key = (first, last) if first < last else (last, first)
    target = pools[index[key]]
    scale = rate_product / ratio
    new_units = _units(target, first) * scale
    if target.token0.address == first:
        reserve0, reserve1 = _raw(new_units), target.reserve1
        other_units = _units(target, target.token1.address)
    else:
        reserve0, reserve1 = target.reserve0, _raw(new_units)
        other_units = _units(target, target.token0.address)

    patched = PoolSnapshot(
        pool_id=target.pool_id,
        date=target.date,
        token0=target.token0,
        token1=target.token1,
        reserve0=reserve0,
        reserve1=reserve1,
        tvl_usd=new_units + other_units,
        volume_usd=target.volume_usd,
        first_trade_date=target.first_trade_date,
        last_trade_date=target.last_trade_date,
    )
    out = list(pools)
    out[index[key]] = patched
    return out


def _units(pool: PoolSnapshot, address: str) -> float:
    if pool.token0.address == address:
        return scaled_reserve(pool.reserve0, pool.token0.decimals)
    if pool.token1.address == address:
        return scaled_reserve(pool.reserve1, pool.token1.decimals)
    raise ConfigurationError(f"token {address} not in pool {pool.pool_id}")


def cycle_ratio_product(pools: list[PoolSnapshot], cycle: list[str]) -> float:
    """Product of reserve ratios r_out/r_in around the cycle (fee excluded)."""
    index = _pool_index(pools)
    ratio = 1.0
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        key = (a, b) if a < b else (b, a)
        pool = pools[index[key]]
        ratio *= _units(pool, b) / _units(pool, a)
    return ratio


def unit_prices(pools: list[PoolSnapshot], days: list[Date]) -> PriceTable:
    """Price table assigning 1 USD to every token on the given days."""
    table = PriceTable()
    addresses = sorted({addr for pool in pools for addr in pool.tokens()})
    for day in days:
        for addr in addresses:
            table.set(day, addr, 1.0)
    return table
