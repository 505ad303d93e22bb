# The classical negative-cycle baseline vs the line-graph detector, plus the
# daily aggregate statistics the analytics module produces.

import io
import itertools
from datetime import date, timedelta

from dexarb import (
    build_line_graph,
    build_token_graph,
    detect_all,
    extract_paths,
    inject_arbitrage,
    make_daily_report,
    mbf_detect_cycles_all,
    optimize,
    profit_timeseries,
    length_histogram,
    unit_prices,
)
from dexarb.analytics import write_timeseries_csv
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
START = date(2021, 1, 1)

print("=== head-to-head on one market ===")
spec = MarketSpec(n_tokens=10, n_pools=24, reserve_range=(1e5, 1e5), seed=1, fee_rate=FEE)
pools = generate(spec)
pools = inject_arbitrage(pools, first_triangle(pools), 1.05)
graph = build_token_graph(pools, fee_rate=FEE)
prices = unit_prices(pools, [START])

baseline = mbf_detect_cycles_all(graph)
print(f"baseline (Bellman-Ford + walk to the root): {len(baseline)} distinct cycle(s)")

opportunities = []
for result in detect_all(build_line_graph(graph), graph):
    for path in extract_paths(result, graph):
        opp = optimize(path, graph, prices=prices, day=START)
        if opp is not None:
            opportunities.append(opp)
loops = sum(1 for o in opportunities if o.path.kind == "loop")
print(f"line-graph detector: {loops} loops + {len(opportunities) - loops} non-loops "
      f"= {len(opportunities)} opportunities")
print("the baseline reports each negative cycle once; the line-graph run yields a"
      "\nloop per source plus priced non-loop paths, hence far more opportunities.")

print("\n=== three days of detection, aggregated ===")
reports = []
for offset in range(3):
    day = START + timedelta(days=offset)
    day_spec = MarketSpec(n_tokens=10, n_pools=24, reserve_range=(1e5, 1e5),
                          seed=1 + offset, fee_rate=FEE)
    day_pools = generate(day_spec, day)
    day_pools = inject_arbitrage(day_pools, first_triangle(day_pools), 1.05 + 0.01 * offset)
    day_graph = build_token_graph(day_pools, fee_rate=FEE)
    day_prices = unit_prices(day_pools, [day])
    day_opps = []
    for result in detect_all(build_line_graph(day_graph), day_graph):
        for path in extract_paths(result, day_graph):
            opp = optimize(path, day_graph, prices=day_prices, day=day)
            if opp is not None:
                day_opps.append(opp)
    reports.append(make_daily_report(day, day_opps))

series, slope = profit_timeseries(reports)
for day, total in series:
    print(f"  {day}  total profit ${total:,.2f}")
print(f"trend slope of log10(total+1): {slope:+.4f} per day")

all_opps = [o for r in reports for o in r.opportunities]
print(f"path-length histogram over {len(all_opps)} opportunities: "
      f"{length_histogram(all_opps)}")

buf = io.StringIO()
write_timeseries_csv(series, buf)
print("\ntimeseries.csv payload:")
print(buf.getvalue())
