"""Command-line pipeline: detect, compare, stats, gen.

Every output is deterministic for fixed inputs and seed: rows are explicitly
sorted, floats serialized with repr, line endings are LF.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from datetime import date as Date
from datetime import timedelta
from pathlib import Path

from . import analytics
from .baseline import mbf_detect_cycles_all
from .detector import (
    KIND_LOOP,
    ArbPath,
    DetectionResult,
    detect,
    detect_all,
    extract_paths,
)
from .errors import (
    ConfigurationError,
    DexArbError,
    MissingPriceError,
    SnapshotParseError,
    UnknownTokenError,
)
from .line_graph import add_source_vertex, build_line_graph
from .market_data import (
    DEFAULT_MAX_TOKENS,
    DEFAULT_TVL_FLOOR,
    PriceTable,
    dump_snapshots,
    filter_pools,
    load_price_table,
    load_snapshots,
)
from .optimizer import Opportunity, optimize
from .synthetic import MarketSpec, generate, inject_arbitrage, token_meta, unit_prices
from .token_graph import DEFAULT_FEE_RATE, TokenGraph, build_token_graph

EXIT_OK = 0
EXIT_IO = 2
EXIT_CONFIG = 3

OPPORTUNITY_COLUMNS = [
    "date", "kind", "source", "path_tokens", "path_pools", "total_weight",
    "optimal_input", "output", "profit_token", "profit_usd",
]


@dataclass
class RunConfig:
    snapshot_path: Path
    price_path: Path | None = None
    date: Date | None = None
    date_start: Date | None = None
    date_end: Date | None = None
    tvl_floor: float = DEFAULT_TVL_FLOOR
    max_tokens: int = DEFAULT_MAX_TOKENS
    fee_rate: float = DEFAULT_FEE_RATE
    rounds: int | None = None
    source: str | None = None
    seed: int | None = None
    workers: int | None = None
    output_dir: Path = Path(".")


def _build_graphs(config: RunConfig, day: Date) -> tuple[TokenGraph, object] | None:
    pools = load_snapshots(config.snapshot_path, day)
    pools = filter_pools(pools, day, tvl_floor=config.tvl_floor, max_tokens=config.max_tokens)
    if not pools:
        return None
    graph = build_token_graph(pools, fee_rate=config.fee_rate)
    return graph, build_line_graph(graph)


def _detection_results(config: RunConfig, graph: TokenGraph, lg) -> list[DetectionResult]:
    if config.source is not None:
        token = graph.token_id(config.source)
        if token is None:
            raise UnknownTokenError(f"source token {config.source} not in the filtered market")
        return [detect(add_source_vertex(lg, token), rounds=config.rounds)]
    return detect_all(lg, graph, rounds=config.rounds, workers=config.workers)


def _optimize_paths(
    paths: list[ArbPath],
    graph: TokenGraph,
    prices: PriceTable | None,
    day: Date,
) -> list[Opportunity]:
    opportunities = []
    for path in paths:
        try:
            opp = optimize(path, graph, prices=prices, day=day)
        except MissingPriceError:
            try:  # keep detection separate from valuation: fall back to the pool ratio
                opp = optimize(path, graph, prices=None)
            except MissingPriceError:
                continue  # no way to define profitability for this pair
        if opp is not None:
            opportunities.append(opp)
    return opportunities


def _detect_day(
    config: RunConfig, prices: PriceTable | None, day: Date
) -> tuple[list[Opportunity], bool]:
    """Returns (opportunities, had_market_data)."""
    built = _build_graphs(config, day)
    if built is None:
        return [], False
    graph, lg = built
    opportunities: list[Opportunity] = []
    for result in _detection_results(config, graph, lg):
        opportunities.extend(_optimize_paths(extract_paths(result, graph), graph, prices, day))
    return opportunities, True


def _symbols_collide(graph: TokenGraph) -> bool:
    symbols = [t.symbol for t in graph.tokens]
    return len(set(symbols)) != len(symbols)


def _path_symbols(path: ArbPath, graph: TokenGraph) -> str:
    return ">".join(graph.tokens[t].symbol for t in path.tokens)


def _path_addresses(path: ArbPath, graph: TokenGraph) -> str:
    return ">".join(graph.tokens[t].address for t in path.tokens)


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(value)


def _write_opportunities(
    out_path: Path,
    opportunities: list[tuple[Date, Opportunity]],
    graph: TokenGraph | None,
) -> None:
    with_addresses = graph is not None and _symbols_collide(graph)
    columns = list(OPPORTUNITY_COLUMNS)
    if with_addresses:
        columns.insert(columns.index("path_pools"), "path_addresses")

    rows = []
    for day, opp in opportunities:
        assert graph is not None
        path = opp.path
        source_symbol = graph.tokens[path.tokens[0]].symbol
        profit_token = "" if (path.kind != KIND_LOOP and opp.profit_usd is not None) \
            else repr(opp.profit_numeraire)
        row = {
            "date": day.isoformat(),
            "kind": path.kind,
            "source": source_symbol,
            "path_tokens": _path_symbols(path, graph),
            "path_pools": ">".join(path.pools),
            "total_weight": repr(path.total_weight),
            "optimal_input": repr(opp.optimal_input),
            "output": repr(opp.output),
            "profit_token": profit_token,
            "profit_usd": _fmt(opp.profit_usd),
        }
        if with_addresses:
            row["path_addresses"] = _path_addresses(path, graph)
        usd = opp.profit_usd
        sort_key = (day.isoformat(), 0 if usd is not None else 1,
                    -(usd if usd is not None else 0.0), row["source"], row["path_tokens"])
        rows.append((sort_key, row))

    rows.sort(key=lambda item: item[0])
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for _, row in rows:
            writer.writerow(row)


def cmd_detect(config: RunConfig) -> int:
    """load -> filter -> graphs -> detect -> optimize -> opportunities.csv"""
    if config.date is None:
        raise ConfigurationError("detect requires --date")
    prices = load_price_table(config.price_path) if config.price_path else None
    config.output_dir.mkdir(parents=True, exist_ok=True)

    built = _build_graphs(config, config.date)
    graph = built[0] if built else None
    opportunities: list[tuple[Date, Opportunity]] = []
    if built is not None:
        graph, lg = built
        for result in _detection_results(config, graph, lg):
            for opp in _optimize_paths(extract_paths(result, graph), graph, prices, config.date):
                opportunities.append((config.date, opp))

    _write_opportunities(config.output_dir / "opportunities.csv", opportunities, graph)
    return EXIT_OK


def cmd_compare(config: RunConfig) -> int:
    """Run both detectors on one day's market and tabulate their yields."""
    if config.date is None:
        raise ConfigurationError("compare requires --date")
    prices = load_price_table(config.price_path) if config.price_path else None
    config.output_dir.mkdir(parents=True, exist_ok=True)
    day = config.date

    built = _build_graphs(config, day)
    mmbf_opps: list[Opportunity] = []
    baseline_opps: list[Opportunity] = []
    if built is not None:
        graph, lg = built
        for result in detect_all(lg, graph, rounds=config.rounds, workers=config.workers):
            mmbf_opps.extend(_optimize_paths(extract_paths(result, graph), graph, prices, day))
        baseline_opps.extend(
            _optimize_paths(mbf_detect_cycles_all(graph), graph, prices, day)
        )

    def row(name: str, opps: list[Opportunity]) -> list[str]:
        loops = sum(1 for o in opps if o.path.kind == KIND_LOOP)
        if prices is not None:
            total = repr(sum(o.profit_usd for o in opps if o.profit_usd is not None))
        else:
            total = ""
        return [name, str(loops), str(len(opps) - loops), total]

    with open(config.output_dir / "comparison.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "loop_count", "nonloop_count", "total_profit_usd"])
        writer.writerow(row("mmbf", mmbf_opps))
        writer.writerow(row("mbf", baseline_opps))
    return EXIT_OK


def cmd_stats(config: RunConfig) -> int:
    """Per-day detection over a date range, then the aggregate CSV reports."""
    start, end = config.date_start, config.date_end
    if start is None and config.date is not None:
        start = end = config.date
    if start is None or end is None:
        raise ConfigurationError("stats requires --date or --date-start/--date-end")
    if start > end:
        raise ConfigurationError("date range start is after end")
    prices = load_price_table(config.price_path) if config.price_path else None
    config.output_dir.mkdir(parents=True, exist_ok=True)

    reports = []
    all_opps: list[Opportunity] = []
    day = start
    while day <= end:
        opps, had_data = _detect_day(config, prices, day)
        if not had_data:
            print(f"warning: no market data for {day}, reporting zero profit", file=sys.stderr)
        reports.append(analytics.make_daily_report(day, opps))
        all_opps.extend(opps)
        day += timedelta(days=1)

    series, slope = analytics.profit_timeseries(reports)
    analytics.write_timeseries_csv(series, config.output_dir / "timeseries.csv")
    analytics.write_length_csv(
        analytics.length_histogram(all_opps), config.output_dir / "length_histogram.csv"
    )
    valued = [o for o in all_opps if o.profit_usd is not None]
    analytics.write_profit_csv(
        analytics.profit_histogram(valued), config.output_dir / "profit_histogram.csv"
    )
    trend = "na" if slope is None else repr(slope)
    (config.output_dir / "trend.txt").write_text(trend + "\n", encoding="utf-8")
    print(f"trend_slope {trend}")
    return EXIT_OK


def cmd_gen(
    spec: MarketSpec,
    output_dir: Path,
    start_day: Date,
    days: int = 1,
    inject_tokens: list[int] | None = None,
    inject_rate: float | None = None,
) -> int:
    """Emit a synthetic market (pools.jsonl + unit prices.csv) for N days."""
    if (inject_tokens is None) != (inject_rate is None):
        raise ConfigurationError("--inject-tokens and --inject-rate must be given together")
    if days < 1:
        raise ConfigurationError("--days must be >= 1")
    output_dir.mkdir(parents=True, exist_ok=True)
    day_list = [start_day + timedelta(days=d) for d in range(days)]
    all_pools = []
    for d, day in enumerate(day_list):
        day_spec = MarketSpec(
            n_tokens=spec.n_tokens,
            n_pools=spec.n_pools,
            reserve_range=spec.reserve_range,
            seed=spec.seed + d,
            fee_rate=spec.fee_rate,
        )
        pools = generate(day_spec, day)
        if inject_tokens is not None:
            cycle = [token_meta(i).address for i in inject_tokens]
            pools = inject_arbitrage(pools, cycle, inject_rate)
        all_pools.extend(pools)

    dump_snapshots(all_pools, output_dir / "pools.jsonl")
    table = unit_prices(all_pools, day_list)
    with open(output_dir / "prices.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "token_address", "usd_price"])
        for day in day_list:
            for i in range(spec.n_tokens):
                writer.writerow([day.isoformat(), token_meta(i).address, "1.0"])
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # bad flags are configuration errors: exit 3
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_market_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--snapshot-path", required=True, type=Path)
    p.add_argument("--price-path", type=Path, default=None)
    p.add_argument("--tvl-floor", type=float, default=DEFAULT_TVL_FLOOR)
    p.add_argument("--max-tokens", type=int, default=DEFAULT_MAX_TOKENS)
    p.add_argument("--fee-rate", type=float, default=DEFAULT_FEE_RATE)
    p.add_argument("--rounds", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output-dir", type=Path, default=Path("."))


def _config_from(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        snapshot_path=args.snapshot_path,
        price_path=args.price_path,
        date=getattr(args, "date", None),
        date_start=getattr(args, "date_start", None),
        date_end=getattr(args, "date_end", None),
        tvl_floor=args.tvl_floor,
        max_tokens=args.max_tokens,
        fee_rate=args.fee_rate,
        rounds=args.rounds,
        source=getattr(args, "source", None),
        seed=args.seed,
        workers=args.workers,
        output_dir=args.output_dir,
    )


def _parse_date(value: str) -> Date:
    try:
        return Date.fromisoformat(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dexarb", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect and size arbitrage opportunities for one day")
    _add_market_args(p)
    p.add_argument("--date", required=True, type=_parse_date)
    p.add_argument("--source", default=None, help="token address; default: every token")

    p = sub.add_parser("compare", help="compare against the classical negative-cycle baseline")
    _add_market_args(p)
    p.add_argument("--date", required=True, type=_parse_date)

    p = sub.add_parser("stats", help="per-day detection over a range plus aggregate reports")
    _add_market_args(p)
    p.add_argument("--date", type=_parse_date, default=None)
    p.add_argument("--date-start", type=_parse_date, default=None)
    p.add_argument("--date-end", type=_parse_date, default=None)

    p = sub.add_parser("gen", help="emit a synthetic market in the snapshot format")
    p.add_argument("--n-tokens", required=True, type=int)
    p.add_argument("--n-pools", required=True, type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reserve-min", type=float, default=50_000.0)
    p.add_argument("--reserve-max", type=float, default=500_000.0)
    p.add_argument("--fee-rate", type=float, default=DEFAULT_FEE_RATE)
    p.add_argument("--date", type=_parse_date, default=Date(2021, 1, 1))
    p.add_argument("--days", type=int, default=1)
    p.add_argument("--inject-tokens", default=None,
                   help="comma-separated token indices forming the cycle to inject")
    p.add_argument("--inject-rate", type=float, default=None)
    p.add_argument("--output-dir", type=Path, default=Path("."))
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse --help or flag errors
        return int(exc.code or 0)
    try:
        if args.command == "detect":
            return cmd_detect(_config_from(args))
        if args.command == "compare":
            return cmd_compare(_config_from(args))
        if args.command == "stats":
            return cmd_stats(_config_from(args))
        if args.command == "gen":
            inject_tokens = None
            if args.inject_tokens:
                inject_tokens = [int(x) for x in args.inject_tokens.split(",")]
            spec = MarketSpec(
                n_tokens=args.n_tokens,
                n_pools=args.n_pools,
                reserve_range=(args.reserve_min, args.reserve_max),
                seed=args.seed,
                fee_rate=args.fee_rate,
            )
            return cmd_gen(spec, args.output_dir, args.date, days=args.days,
                           inject_tokens=inject_tokens, inject_rate=args.inject_rate)
        raise ConfigurationError(f"unknown command {args.command}")
    except (ConfigurationError, UnknownTokenError, ValueError) as exc:
        print(f"dexarb: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, SnapshotParseError, DexArbError) as exc:
        print(f"dexarb: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
