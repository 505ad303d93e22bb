"""Shared fixtures: hand-built pools and brute-force oracles.

The oracles enumerate simple paths and simple loops exhaustively (fine for
graphs up to ~8 tokens) and stay independent of the detector they check.
"""

from __future__ import annotations

import itertools
from datetime import date as Date
from decimal import Decimal

from dexarb.market_data import PoolSnapshot, TokenMeta
from dexarb.token_graph import TokenGraph

DAY = Date(2021, 1, 1)
EARLY = Date(2020, 1, 1)
LATE = Date(2030, 12, 31)


def addr(symbol: str) -> str:
    return f"0x{symbol}"


def make_pool(
    pool_id: str,
    a: str,
    b: str,
    reserve_a: float,
    reserve_b: float,
    tvl: float | None = None,
    day: Date = DAY,
    first: Date = EARLY,
    last: Date = LATE,
) -> PoolSnapshot:
    """Pool between symbols a and b with zero-decimals reserves (raw == real)."""
    return PoolSnapshot(
        pool_id=pool_id,
        date=day,
        token0=TokenMeta(address=addr(a), symbol=a, decimals=0),
        token1=TokenMeta(address=addr(b), symbol=b, decimals=0),
        reserve0=Decimal(repr(reserve_a)),
        reserve1=Decimal(repr(reserve_b)),
        tvl_usd=tvl if tvl is not None else reserve_a + reserve_b,
        volume_usd=0.0,
        first_trade_date=first,
        last_trade_date=last,
    )


def triangle_pools(rate_product: float = 1.0, base: float = 100_000.0) -> list[PoolSnapshot]:
    """Pools A-B, B-C, C-A whose A->B->C->A reserve-ratio product is rate_product."""
    return [
        make_pool("PAB", "A", "B", base, base),
        make_pool("PBC", "B", "C", base, base),
        make_pool("PCA", "C", "A", base, base * rate_product),
    ]


def find_triangle(pools: list[PoolSnapshot]) -> list[str] | None:
    pairs = {p.pair() for p in pools}
    addresses = sorted({a for p in pools for a in p.tokens()})
    for a, b, c in itertools.combinations(addresses, 3):
        if (a, b) in pairs and (b, c) in pairs and (a, c) in pairs:
            return [a, b, c]
    return None


def brute_force_paths(graph: TokenGraph, source: int) -> tuple[dict[int, float], float | None]:
    """Exhaustive DFS: per-token minimum simple-path weight from source, plus
    the minimum weight over simple loops through source with >= 3 hops.

    Two-hop closures are excluded: they cannot exist in the pruned line graph
    and are never negative anyway (the two weights of one pool sum to
    -2*log(1-fee) >= 0).
    """
    best: dict[int, float] = {}
    best_loop: float | None = None

    def dfs(node: int, weight: float, visited: int, hops: int) -> None:
        nonlocal best_loop
        for e in graph.out_edges(node):
            t = e.to_token
            w = weight + e.weight
            if t == source:
                if hops + 1 >= 3 and (best_loop is None or w < best_loop):
                    best_loop = w
                continue
            if (visited >> t) & 1:
                continue
            if t not in best or w < best[t]:
                best[t] = w
            dfs(t, w, visited | (1 << t), hops + 1)

    dfs(source, 0.0, 1 << source, 0)
    return best, best_loop


def brute_force_negative_cycles(graph: TokenGraph) -> list[tuple[int, ...]]:
    """All negative simple cycles (>= 3 hops), one canonical rotation each."""
    found: set[tuple[int, ...]] = set()

    def dfs(start: int, node: int, weight: float, visited: int, path: list[int]) -> None:
        for e in graph.out_edges(node):
            t = e.to_token
            w = weight + e.weight
            if t == start:
                if len(path) >= 3 and w < 0:
                    found.add(tuple(path))
                continue
            if (visited >> t) & 1 or t < start:  # canonical: cycle min token first
                continue
            dfs(start, t, w, visited | (1 << t), path + [t])

    for start in range(graph.n_tokens):
        dfs(start, start, 0.0, 1 << start, [start])
    return sorted(found)


def reachable_from(graph: TokenGraph, source: int) -> set[int]:
    seen = {source}
    frontier = [source]
    while frontier:
        node = frontier.pop()
        for e in graph.out_edges(node):
            if e.to_token not in seen:
                seen.add(e.to_token)
                frontier.append(e.to_token)
    return seen
