"""Classical Bellman-Ford negative-cycle detection on the token graph.

Runs |V|-1 relaxation rounds with predecessor tracking; every edge still
relaxable afterwards witnesses a negative cycle, recovered by walking the
predecessor links ("walk to the root") until a vertex repeats.  Cycles are
deduplicated by canonical rotation so each distinct loop is reported once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .detector import KIND_LOOP, ArbPath, _resolve_pools
from .errors import UnknownTokenError
from .token_graph import TokenGraph

_INF = math.inf


@dataclass
class PredecessorState:
    dist: dict[int, float]
    pred: dict[int, int | None]


def _relax_rounds(graph: TokenGraph, source: int) -> PredecessorState:
    dist = {t: _INF for t in range(graph.n_tokens)}
    pred: dict[int, int | None] = {t: None for t in range(graph.n_tokens)}
    dist[source] = 0.0
    for _ in range(graph.n_tokens - 1):
        updated = False
        for e in graph.edges:  # sorted by (from, to): deterministic
            du = dist[e.from_token]
            if du == _INF:
                continue
            nd = du + e.weight
            if nd < dist[e.to_token]:
                dist[e.to_token] = nd
                pred[e.to_token] = e.from_token
                updated = True
        if not updated:
            break
    return PredecessorState(dist=dist, pred=pred)


def _cycle_from(pred: dict[int, int | None], start: int, n: int) -> list[int] | None:
    # walk n steps to get inside a predecessor cycle, then collect it
    node: int | None = start
    for _ in range(n):
        node = pred[node]  # type: ignore[index]
        if node is None:
            return None
    seen_at: dict[int, int] = {}
    cycle: list[int] = []
    while node is not None and node not in seen_at:
        seen_at[node] = len(cycle)
        cycle.append(node)
        node = pred[node]
    if node is None:
        return None
    cycle = cycle[seen_at[node]:]
    cycle.reverse()  # pred links point backwards; report in trade direction
    return cycle


def _canonical(cycle: list[int]) -> tuple[int, ...]:
    k = cycle.index(min(cycle))
    return tuple(cycle[k:] + cycle[:k])


def mbf_detect_cycles(graph: TokenGraph, source: int) -> list[ArbPath]:
    """Negative cycles reachable from one source, deduplicated, as loop paths."""
    if not 0 <= source < graph.n_tokens:
        raise UnknownTokenError(f"token id {source} not in graph")
    state = _relax_rounds(graph, source)
    found: dict[tuple[int, ...], ArbPath] = {}
    for e in graph.edges:
        du = state.dist[e.from_token]
        if du == _INF or not du + e.weight < state.dist[e.to_token]:
            continue
        cycle = _cycle_from(state.pred, e.to_token, graph.n_tokens)
        if cycle is None:
            continue
        key = _canonical(cycle)
        if key in found:
            continue
        tokens = key + (key[0],)
        pools, weight = _resolve_pools(tokens, graph)
        if weight < 0.0:
            found[key] = ArbPath(tokens=tokens, pools=pools,
                                 total_weight=weight, kind=KIND_LOOP)
    return list(found.values())


def mbf_detect_cycles_all(graph: TokenGraph) -> list[ArbPath]:
    """Union over all source tokens, deduplicated, ordered by canonical rotation."""
    found: dict[tuple[int, ...], ArbPath] = {}
    for source in range(graph.n_tokens):
        for path in mbf_detect_cycles(graph, source):
            found.setdefault(path.tokens[:-1], path)
    return [found[key] for key in sorted(found)]
