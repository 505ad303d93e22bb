"""Directed weighted token exchange graph.

Each pool contributes two directed edges.  The weight of the edge i -> j is
``-log((1 - fee) * r_j / r_i)``, so a directed cycle has negative total
weight exactly when the product of its spot exchange rates exceeds 1.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import TextIO

from .errors import RejectedPoolError
from .market_data import PoolSnapshot, TokenMeta

DEFAULT_FEE_RATE = 0.003  # the uniform 0.3% constant-product pool fee


@dataclass(frozen=True)
class DirectedEdge:
    from_token: int
    to_token: int
    pool_id: str
    reserve_from: float  # real token units (raw reserve scaled by decimals)
    reserve_to: float
    weight: float  # -log((1 - fee) * reserve_to / reserve_from)


def spot_rate(edge: DirectedEdge, fee_rate: float) -> float:
    """Marginal exchange rate at zero input: (1 - fee) * reserve_to / reserve_from.

    Equals exp(-edge.weight) up to double-precision rounding.
    """
    return (1.0 - fee_rate) * edge.reserve_to / edge.reserve_from


@dataclass
class TokenGraph:
    """Immutable after construction; share freely across threads."""

    tokens: tuple[TokenMeta, ...]  # index == dense token id, ascending address
    edges: tuple[DirectedEdge, ...]  # sorted by (from_token, to_token)
    fee_rate: float
    _address_to_id: dict[str, int] = field(repr=False, default_factory=dict)
    _edge_by_pair: dict[tuple[int, int], DirectedEdge] = field(repr=False, default_factory=dict)
    _out_edges: dict[int, tuple[DirectedEdge, ...]] = field(repr=False, default_factory=dict)

    @property
    def n_tokens(self) -> int:
        return len(self.tokens)

    def token_id(self, address: str) -> int | None:
        return self._address_to_id.get(address)

    def edge(self, from_token: int, to_token: int) -> DirectedEdge | None:
        return self._edge_by_pair.get((from_token, to_token))

    def out_edges(self, token: int) -> tuple[DirectedEdge, ...]:
        return self._out_edges.get(token, ())

    def spot_rate(self, edge: DirectedEdge) -> float:
        return spot_rate(edge, self.fee_rate)


def scaled_reserve(raw: Decimal, decimals: int) -> float:
    """Raw on-chain reserve -> real token units, exact until the float cast."""
    return float(raw.scaleb(-decimals))


def build_token_graph(pools: list[PoolSnapshot], fee_rate: float = DEFAULT_FEE_RATE) -> TokenGraph:
    """Build the directed graph from (already filtered) pools.

    Token ids are assigned densely in ascending address order; every pool
    yields the two directed edges (i -> j) and (j -> i).  Pools with a zero
    reserve on either side are rejected, all of them reported at once.
    """
    if not 0.0 <= fee_rate < 1.0:
        raise ValueError(f"fee_rate must be in [0, 1), got {fee_rate}")

    metas: dict[str, TokenMeta] = {}
    for pool in pools:
        for meta in (pool.token0, pool.token1):
            metas.setdefault(meta.address, meta)
    addresses = sorted(metas)
    ids = {address: i for i, address in enumerate(addresses)}

    zero_reserve = sorted(p.pool_id for p in pools if p.reserve0 == 0 or p.reserve1 == 0)
    if zero_reserve:
        raise RejectedPoolError(zero_reserve, "pools with a zero reserve")

    one_minus_fee = 1.0 - fee_rate
    by_pair: dict[tuple[int, int], DirectedEdge] = {}
    for pool in sorted(pools, key=lambda p: p.pool_id):
        id0, id1 = ids[pool.token0.address], ids[pool.token1.address]
        r0 = scaled_reserve(pool.reserve0, pool.token0.decimals)
        r1 = scaled_reserve(pool.reserve1, pool.token1.decimals)
        for a, b, ra, rb in ((id0, id1, r0, r1), (id1, id0, r1, r0)):
            if (a, b) in by_pair:
                raise RejectedPoolError(
                    [pool.pool_id, by_pair[(a, b)].pool_id],
                    "multiple pools for one token pair (dedupe first)",
                )
            by_pair[(a, b)] = DirectedEdge(
                from_token=a,
                to_token=b,
                pool_id=pool.pool_id,
                reserve_from=ra,
                reserve_to=rb,
                weight=-math.log(one_minus_fee * rb / ra),
            )

    edges = tuple(by_pair[key] for key in sorted(by_pair))
    out: dict[int, list[DirectedEdge]] = {}
    for e in edges:
        out.setdefault(e.from_token, []).append(e)
    return TokenGraph(
        tokens=tuple(metas[a] for a in addresses),
        edges=edges,
        fee_rate=fee_rate,
        _address_to_id=ids,
        _edge_by_pair=by_pair,
        _out_edges={t: tuple(es) for t, es in out.items()},
    )


def dump_edges_csv(graph: TokenGraph, out: str | Path | TextIO) -> None:
    """Debug dump: one row per directed edge, full float precision."""
    own = isinstance(out, (str, Path))
    fh: TextIO = open(out, "w", encoding="utf-8", newline="") if own else out  # type: ignore[assignment]
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["from_token", "to_token", "pool_id", "reserve_from", "reserve_to", "weight"])
        for e in graph.edges:
            writer.writerow([
                graph.tokens[e.from_token].address,
                graph.tokens[e.to_token].address,
                e.pool_id,
                repr(e.reserve_from),
                repr(e.reserve_to),
                repr(e.weight),
            ])
    finally:
        if own:
            fh.close()
