"""Arbitrage detection for constant-product DEX markets.

Pipeline: load pool snapshots, filter them, build the directed token graph,
transform it into a pruned line graph, relax from each source token to
collect loop and non-loop arbitrage paths, then size each path's input by
bisection on the marginal output.  A classical Bellman-Ford negative-cycle
detector is included as the comparison baseline.
"""

from .amm import SwapLeg, path_marginal, path_out, swap_out
from .analytics import (
    DailyReport,
    length_histogram,
    make_daily_report,
    profit_histogram,
    profit_timeseries,
)
from .baseline import mbf_detect_cycles, mbf_detect_cycles_all
from .detector import (
    KIND_LOOP,
    KIND_NON_LOOP,
    ArbPath,
    DetectionResult,
    RelaxState,
    detect,
    detect_all,
    extract_paths,
    relax,
)
from .errors import (
    ConfigurationError,
    CorruptPathError,
    DexArbError,
    DuplicatePoolError,
    MissingPriceError,
    ParseError,
    RejectedPoolError,
    SnapshotParseError,
    UnknownTokenError,
)
from .line_graph import (
    LineEdge,
    LineGraph,
    LineVertex,
    add_source_vertex,
    build_line_graph,
    remove_source_vertex,
)
from .market_data import (
    PoolSnapshot,
    PriceTable,
    TokenMeta,
    dump_snapshots,
    filter_pools,
    load_price_table,
    load_snapshots,
)
from .optimizer import Opportunity, legs_for_path, optimize, profit_usd
from .synthetic import MarketSpec, cycle_ratio_product, generate, inject_arbitrage, unit_prices
from .token_graph import DirectedEdge, TokenGraph, build_token_graph, dump_edges_csv, spot_rate

__version__ = "0.1.0"

__all__ = [
    "ArbPath", "ConfigurationError", "CorruptPathError", "DailyReport",
    "DetectionResult", "DexArbError", "DirectedEdge", "DuplicatePoolError",
    "KIND_LOOP", "KIND_NON_LOOP", "LineEdge", "LineGraph", "LineVertex",
    "MarketSpec", "MissingPriceError", "Opportunity", "ParseError",
    "PoolSnapshot", "PriceTable", "RejectedPoolError", "RelaxState",
    "SnapshotParseError", "SwapLeg", "TokenGraph", "TokenMeta",
    "UnknownTokenError", "add_source_vertex", "build_line_graph",
    "build_token_graph", "cycle_ratio_product", "detect", "detect_all",
    "dump_edges_csv", "dump_snapshots", "extract_paths", "filter_pools",
    "generate", "inject_arbitrage", "legs_for_path", "length_histogram",
    "load_price_table", "load_snapshots", "make_daily_report",
    "mbf_detect_cycles", "mbf_detect_cycles_all", "optimize",
    "path_marginal", "path_out", "profit_histogram", "profit_timeseries",
    "profit_usd", "relax", "remove_source_vertex", "spot_rate", "swap_out",
    "unit_prices",
]
