# From pool snapshots to graphs: filtering, the weighted token graph, and
# the line-graph transform the detector relaxes over.

import math
from datetime import date

from dexarb import build_line_graph, build_token_graph, filter_pools
from dexarb.synthetic import MarketSpec, generate

DAY = date(2021, 1, 1)

# A reproducible random market: 20 tokens, 45 pools, everything above the
# default $20k TVL floor so filtering keeps the whole market.
pools = generate(MarketSpec(n_tokens=20, n_pools=45, seed=8))
kept = filter_pools(pools, DAY)
print(f"generated {len(pools)} pools, {len(kept)} survive filtering")

graph = build_token_graph(kept, fee_rate=0.003)
print(f"token graph: {graph.n_tokens} tokens, {len(graph.edges)} directed edges")

# Every pool contributes two directed edges whose weights are the negative
# log of the spot rates; the pair sums to -2*log(1 - fee) > 0, so a two-hop
# round trip always loses the fee.
e_ab = graph.edges[0]
e_ba = graph.edge(e_ab.to_token, e_ab.from_token)
print(f"  example pair: {e_ab.weight:+.6f} and {e_ba.weight:+.6f} "
      f"(sum {e_ab.weight + e_ba.weight:.6f} = {-2 * math.log(1 - 0.003):.6f})")

lg = build_line_graph(graph)
degrees: dict[int, int] = {}
for e in graph.edges:
    degrees[e.from_token] = degrees.get(e.from_token, 0) + 1
identity = sum(d * d for d in degrees.values()) - len(graph.edges)
print(f"line graph: {len(lg.vertices)} vertices (= directed edges), "
      f"{len(lg.edges)} edges (= sum of squared degrees - directed edges = {identity})")
print("  immediate backtracks through the same pool are pruned during the transform")
