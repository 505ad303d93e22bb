"""Arbitrage detection via Bellman-Ford relaxation on the line graph.

One run relaxes from the overlay source vertex for a fixed number of passes.
Each pass sweeps every line edge in (src, dst) order and relaxes when the
new distance improves AND the continuation token is not already on the
stored path -- unless it is the source token, which closes a loop.  States
whose path has closed a loop are terminal.  Per-token minima over the line
vertices then yield one loop candidate (for the source token itself) and
non-loop best paths for every other token.

Both engines -- the plain Python reference and the numba kernel -- perform
the identical sequence of relaxations.  A vertex whose distance and path are
unchanged since its out-edges were last swept cannot relax anything new
(distances only decrease), so clean vertices are skipped; this is a pure
optimization and never changes results.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import ConfigurationError, CorruptPathError
from .line_graph import LineGraph, LineVertex, add_source_vertex
from .token_graph import TokenGraph

KIND_LOOP = "loop"
KIND_NON_LOOP = "non-loop"

_INF = math.inf


@dataclass(frozen=True)
class ArbPath:
    """A candidate arbitrage route: token sequence plus the pools it crosses."""

    tokens: tuple[int, ...]
    pools: tuple[str, ...]
    total_weight: float
    kind: str  # KIND_LOOP or KIND_NON_LOOP

    def __post_init__(self):
        if len(self.pools) != len(self.tokens) - 1:
            raise ValueError("pool count must be token count - 1")

    @property
    def n_swaps(self) -> int:
        return len(self.pools)


@dataclass
class RelaxState:
    """Distances and stored paths per line vertex after relaxation."""

    dis: dict[LineVertex, float]
    path: dict[LineVertex, tuple[int, ...]]


@dataclass
class DetectionResult:
    source: int
    d_token: dict[int, float]  # best distance per reachable token
    p_token: dict[int, tuple[int, ...]]  # token sequence realizing it, starts at source
    loop: ArbPath | None  # present only when the source's own entry is negative


class _Prepared:
    """CSR adjacency of the base line graph, grouped by source vertex."""

    __slots__ = ("group_ptr", "edge_dst", "edge_w", "edge_l", "second", "arrays")

    def __init__(self, lg: LineGraph):
        vertices = lg.vertices
        n = len(vertices)
        self.second = [v.second for v in vertices]
        counts = [0] * (n + 1)
        for e in lg.edges:
            counts[e.src + 1] += 1
        for i in range(n):
            counts[i + 1] += counts[i]
        self.group_ptr = counts
        self.edge_dst = [e.dst for e in lg.edges]  # lg.edges already sorted by (src, dst)
        self.edge_w = [e.weight for e in lg.edges]
        self.edge_l = [vertices[e.dst].second for e in lg.edges]
        self.arrays = None  # numpy mirror, built on first fast-engine use


def _relax_python(prep: _Prepared, src_dst, src_w, v0: int, rounds: int):
    """Reference engine.  Returns (dis, paths) lists indexed by line vertex."""
    n = len(prep.second)
    second = prep.second
    group_ptr, edge_dst = prep.group_ptr, prep.edge_dst
    edge_w, edge_l = prep.edge_w, prep.edge_l

    dis = [_INF] * n
    paths: list[tuple[int, ...]] = [()] * n
    masks = [0] * n  # bitmask of tokens on the stored path
    version = [0] * n
    swept = [0] * n

    for m in range(rounds):
        updated = False
        if m == 0:
            for k in range(len(src_dst)):
                v = src_dst[k]
                w = src_w[k]
                if w < dis[v]:
                    dis[v] = w
                    sec = second[v]
                    paths[v] = (v0, sec)
                    masks[v] = (1 << v0) | (1 << sec)
                    version[v] += 1
                    updated = True
        for u in range(n):
            if version[u] == swept[u]:
                continue
            swept[u] = version[u]
            if second[u] == v0:
                continue  # closed loop: terminal
            du = dis[u]
            pu = paths[u]
            mu = masks[u]
            for e in range(group_ptr[u], group_ptr[u + 1]):
                v = edge_dst[e]
                nd = du + edge_w[e]
                if nd < dis[v]:
                    l = edge_l[e]
                    if l == v0 or not (mu >> l) & 1:
                        dis[v] = nd
                        paths[v] = pu + (l,)
                        masks[v] = mu | (1 << l)
                        version[v] += 1
                        updated = True
        if not updated:
            break
    return dis, paths


def _relax_fast(prep: _Prepared, src_dst, src_w, v0: int, rounds: int):
    """Numba engine; performs the identical relaxation sequence."""
    import numpy as np

    from ._fast import relax_kernel

    if prep.arrays is None:
        prep.arrays = (
            np.asarray(prep.group_ptr, dtype=np.int64),
            np.asarray(prep.edge_dst, dtype=np.int64),
            np.asarray(prep.edge_w, dtype=np.float64),
            np.asarray(prep.edge_l, dtype=np.int64),
            np.asarray(prep.second, dtype=np.int64),
        )
    group_ptr, edge_dst, edge_w, edge_l, second = prep.arrays
    n_tokens = max(prep.second, default=-1) + 1
    dis, plen, path_buf = relax_kernel(
        group_ptr, edge_dst, edge_w, edge_l, second,
        np.asarray(src_dst, dtype=np.int64), np.asarray(src_w, dtype=np.float64),
        v0, rounds, n_tokens,
    )
    paths = [tuple(path_buf[i, : plen[i]].tolist()) for i in range(len(plen))]
    return dis.tolist(), paths


def _fast_available() -> bool:
    try:
        from . import _fast  # noqa: F401
    except Exception:
        return False
    return True


def _run_engine(lg: LineGraph, rounds: int, engine: str, prep: _Prepared | None):
    if lg.source_vertex is None:
        raise ConfigurationError("line graph has no source overlay; call add_source_vertex first")
    if prep is None:
        prep = _Prepared(lg)
    v0 = lg.source_vertex.second
    src_dst = [e.dst for e in lg.source_edges]
    src_w = [e.weight for e in lg.source_edges]
    if engine == "auto":
        engine = "fast" if _fast_available() else "python"
    if engine == "fast":
        return _relax_fast(prep, src_dst, src_w, v0, rounds)
    if engine == "python":
        return _relax_python(prep, src_dst, src_w, v0, rounds)
    raise ConfigurationError(f"unknown engine {engine!r}")


def relax(lg: LineGraph, rounds: int | None = None, engine: str = "auto") -> RelaxState:
    """Run the relaxation and expose per-line-vertex distances and paths.

    ``rounds`` defaults to the token count of the underlying graph.
    """
    if rounds is None:
        rounds = lg.origin.n_tokens
    dis, paths = _run_engine(lg, rounds, engine, None)
    state = RelaxState(dis={}, path={})
    assert lg.source_vertex is not None
    state.dis[lg.source_vertex] = 0.0
    state.path[lg.source_vertex] = (lg.source_vertex.second,)
    for i, v in enumerate(lg.vertices):
        state.dis[v] = dis[i]
        state.path[v] = paths[i]
    return state


def _resolve_pools(tokens: tuple[int, ...], graph: TokenGraph) -> tuple[tuple[str, ...], float]:
    pools = []
    weight = 0.0
    for a, b in zip(tokens, tokens[1:]):
        edge = graph.edge(a, b)
        if edge is None:
            raise CorruptPathError(f"stored path uses missing edge {a}->{b}")
        pools.append(edge.pool_id)
        weight += edge.weight
    return tuple(pools), weight


def detect(
    lg: LineGraph,
    rounds: int | None = None,
    engine: str = "auto",
    _prep: _Prepared | None = None,
) -> DetectionResult:
    """Detect best paths from the overlaid source token to every token.

    Returns per-token minimum distances with their paths; the entry for the
    source token itself becomes the loop candidate when strictly negative.
    """
    graph = lg.origin
    if rounds is None:
        rounds = graph.n_tokens
    dis, paths = _run_engine(lg, rounds, engine, _prep)
    v0 = lg.source_vertex.second  # type: ignore[union-attr]  # checked in _run_engine

    d_token: dict[int, float] = {}
    p_token: dict[int, tuple[int, ...]] = {}
    for i, v in enumerate(lg.vertices):
        if dis[i] == _INF:
            continue
        t = v.second
        if t not in d_token or dis[i] < d_token[t]:
            d_token[t] = dis[i]
            p_token[t] = paths[i]

    loop = None
    if v0 in d_token and d_token[v0] < 0.0:
        pools, _ = _resolve_pools(p_token[v0], graph)
        loop = ArbPath(tokens=p_token[v0], pools=pools, total_weight=d_token[v0], kind=KIND_LOOP)
    return DetectionResult(source=v0, d_token=d_token, p_token=p_token, loop=loop)


def detect_all(
    lg: LineGraph,
    graph: TokenGraph | None = None,
    rounds: int | None = None,
    engine: str = "auto",
    workers: int | None = None,
) -> list[DetectionResult]:
    """Run detect once per token as source; results ordered by token id."""
    graph = graph if graph is not None else lg.origin
    n = graph.n_tokens
    if n == 0:
        return []
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(lg, rounds, engine),
        ) as pool:
            return list(pool.map(_detect_source, range(n)))
    prep = _Prepared(lg)
    return [
        detect(add_source_vertex(lg, t), rounds=rounds, engine=engine, _prep=prep)
        for t in range(n)
    ]


_WORKER_STATE: dict = {}


def _init_worker(lg: LineGraph, rounds: int | None, engine: str) -> None:
    _WORKER_STATE["lg"] = lg
    _WORKER_STATE["prep"] = _Prepared(lg)
    _WORKER_STATE["rounds"] = rounds
    _WORKER_STATE["engine"] = engine


def _detect_source(token: int) -> DetectionResult:
    lg = add_source_vertex(_WORKER_STATE["lg"], token)
    return detect(lg, rounds=_WORKER_STATE["rounds"], engine=_WORKER_STATE["engine"],
                  _prep=_WORKER_STATE["prep"])


def extract_paths(result: DetectionResult, graph: TokenGraph) -> list[ArbPath]:
    """Materialize every finite per-token entry as an ArbPath.

    Pool ids come from the graph; the edge-weight sum must agree with the
    stored distance to 1e-9 or the stored path is considered corrupt.
    """
    out: list[ArbPath] = []
    for t in sorted(result.d_token):
        tokens = result.p_token[t]
        distance = result.d_token[t]
        pools, weight = _resolve_pools(tokens, graph)
        if abs(weight - distance) > 1e-9:
            raise CorruptPathError(
                f"path to token {t}: stored distance {distance} != edge sum {weight}"
            )
        kind = KIND_LOOP if t == result.source else KIND_NON_LOOP
        out.append(ArbPath(tokens=tokens, pools=pools, total_weight=distance, kind=kind))
    return out
