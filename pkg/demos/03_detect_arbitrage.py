# Detecting loops and non-loop paths: inject a known 5% arbitrage triangle
# into an otherwise balanced market and recover it from every source token.

import itertools
import math

from dexarb import (
    add_source_vertex,
    build_line_graph,
    build_token_graph,
    detect,
    detect_all,
    extract_paths,
    inject_arbitrage,
)
from dexarb.synthetic import MarketSpec, generate


def first_triangle(pools):
    pairs = {p.pair() for p in pools}
    addresses = sorted({a for p in pools for a in p.tokens()})
    return next(
        [a, b, c]
        for a, b, c in itertools.combinations(addresses, 3)
        if (a, b) in pairs and (b, c) in pairs and (a, c) in pairs
    )


FEE = 0.003

# Balanced reserves mean fees make every route unprofitable...
spec = MarketSpec(n_tokens=8, n_pools=16, reserve_range=(1e5, 1e5), seed=1, fee_rate=FEE)
pools = generate(spec)

# ...until we pick any triangle of pools and scale one reserve so its rate
# product becomes 1.05 exactly.
cycle = first_triangle(pools)
pools = inject_arbitrage(pools, cycle, 1.05)

graph = build_token_graph(pools, fee_rate=FEE)
lg = build_line_graph(graph)

expected = -math.log(1.05 * (1 - FEE) ** 3)
cycle_ids = sorted(graph.token_id(a) for a in cycle)
print(f"injected triangle {cycle_ids} loop weight: {expected:+.6f} "
      f"(negative because 1.05 beats three 0.3% fees)")

source = cycle_ids[0]
result = detect(add_source_vertex(lg, source))
print(f"\nfrom source token {source}: loop {result.loop.tokens} "
      f"weight {result.loop.total_weight:+.6f}")
print("best path to every other token (non-loops):")
for path in extract_paths(result, graph):
    if path.kind == "non-loop":
        route = ">".join(str(t) for t in path.tokens)
        print(f"  {route:24s} weight {path.total_weight:+.6f}")

print("\nrunning from every source:")
for r in detect_all(lg, graph):
    loop = "-" if r.loop is None else f"{r.loop.tokens} ({r.loop.total_weight:+.5f})"
    print(f"  source {r.source}: loop {loop}")
print("every source reaches a loop; the three on-cycle sources see rotations"
      "\nof the injected triangle, the rest route into its negative edge.")
