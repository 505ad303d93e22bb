"""Directed line graph of the token graph.

Every directed token-graph edge (i -> j) becomes a vertex (i, j).  Vertices
(i, j) and (j, l) are linked for every continuation l != i; the immediate
backtrack (i, j) -> (j, i) is pruned because a two-hop round trip through one
pool can never profit.  A detection run overlays one extra source vertex
whose out-edges seed the relaxation; the overlay is O(deg) and never touches
the shared base graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import UnknownTokenError
from .token_graph import TokenGraph

SOURCE_INDEX = -1  # vertex index used by overlay edges leaving the source vertex


@dataclass(frozen=True)
class LineVertex:
    first: int  # token id; SOURCE_INDEX for the overlay source vertex
    second: int
    source_flag: bool = False


@dataclass(frozen=True)
class LineEdge:
    src: int  # index into LineGraph.vertices, or SOURCE_INDEX
    dst: int
    weight: float


@dataclass
class LineGraph:
    vertices: tuple[LineVertex, ...]  # sorted by (first, second)
    edges: tuple[LineEdge, ...]  # sorted by (src, dst)
    origin: TokenGraph
    source_vertex: LineVertex | None = None
    source_edges: tuple[LineEdge, ...] = ()
    _index: dict[tuple[int, int], int] = field(repr=False, default_factory=dict)

    def vertex_index(self, first: int, second: int) -> int | None:
        return self._index.get((first, second))

    @property
    def source_token(self) -> int | None:
        return None if self.source_vertex is None else self.source_vertex.second


def build_line_graph(graph: TokenGraph) -> LineGraph:
    """Transform the token graph into its pruned directed line graph.

    Vertex count equals the directed edge count of the token graph; edge
    count equals sum(d_i^2) - directed_edge_count with d_i the undirected
    pool degree of token i (one backtrack pruned per directed edge).
    """
    vertices = tuple(LineVertex(e.from_token, e.to_token) for e in graph.edges)
    index = {(v.first, v.second): i for i, v in enumerate(vertices)}

    edges: list[LineEdge] = []
    for i, v in enumerate(vertices):
        for cont in graph.out_edges(v.second):
            if cont.to_token == v.first:
                continue  # backtrack through the same pair
            edges.append(LineEdge(i, index[(v.second, cont.to_token)], cont.weight))

    return LineGraph(vertices=vertices, edges=tuple(edges), origin=graph, _index=index)


def add_source_vertex(lg: LineGraph, source_token: int) -> LineGraph:
    """Overlay the extra source vertex for one detection run.

    Adds one source-flagged vertex and an out-edge to every (source_token, n)
    vertex, weighted like the underlying token-graph edge.  The base graph is
    shared, so the overlay costs O(deg(source_token)).
    """
    graph = lg.origin
    if not 0 <= source_token < graph.n_tokens:
        raise UnknownTokenError(f"token id {source_token} not in graph")
    out = graph.out_edges(source_token)
    if not out:
        raise UnknownTokenError(f"token id {source_token} has no pools")
    source_edges = tuple(
        LineEdge(SOURCE_INDEX, lg._index[(source_token, e.to_token)], e.weight) for e in out
    )
    return replace(
        lg,
        source_vertex=LineVertex(SOURCE_INDEX, source_token, source_flag=True),
        source_edges=source_edges,
    )


def remove_source_vertex(lg: LineGraph) -> LineGraph:
    """Drop the overlay, restoring the base line graph (shared storage)."""
    return replace(lg, source_vertex=None, source_edges=())
