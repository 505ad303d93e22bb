"""Pool snapshot ingestion, price tables, and the pool/token filtering pipeline.

Snapshots are JSON Lines files, one pool-day record per line.  Reserves are
decimal strings in raw on-chain units; they stay exact (`decimal.Decimal`)
until graph construction scales them by token decimals.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date as Date
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Iterable, TextIO

from .errors import (
    ConfigurationError,
    DuplicatePoolError,
    MissingPriceError,
    ParseError,
    SnapshotParseError,
)

DEFAULT_TVL_FLOOR = 20_000.0
DEFAULT_MAX_TOKENS = 100

# 256-bit reserves print as at most 78 decimal digits; anything longer is garbage.
MAX_DECIMALS = 77


@dataclass(frozen=True)
class TokenMeta:
    address: str
    symbol: str
    decimals: int


@dataclass(frozen=True)
class PoolSnapshot:
    """One liquidity pool on one calendar day."""

    pool_id: str
    date: Date
    token0: TokenMeta
    token1: TokenMeta
    reserve0: Decimal  # raw units, not yet scaled by token0.decimals
    reserve1: Decimal
    tvl_usd: float
    volume_usd: float
    first_trade_date: Date
    last_trade_date: Date

    def tokens(self) -> tuple[str, str]:
        return self.token0.address, self.token1.address

    def pair(self) -> tuple[str, str]:
        """Unordered token pair, canonically sorted."""
        a, b = self.token0.address, self.token1.address
        return (a, b) if a <= b else (b, a)


class PriceTable:
    """USD prices keyed by (date, token address).  All prices strictly positive."""

    def __init__(self, prices: dict[tuple[Date, str], float] | None = None):
        self._prices: dict[tuple[Date, str], float] = {}
        if prices:
            for key, value in prices.items():
                self.set(key[0], key[1], value)

    def set(self, day: Date, address: str, usd_price: float) -> None:
        if not usd_price > 0:
            raise ValueError(f"price for {address} on {day} must be positive, got {usd_price}")
        self._prices[(day, address)] = float(usd_price)

    def get(self, day: Date, address: str) -> float | None:
        return self._prices.get((day, address))

    def price(self, day: Date, address: str) -> float:
        value = self.get(day, address)
        if value is None:
            raise MissingPriceError(f"no USD price for token {address} on {day}")
        return value

    def __len__(self) -> int:
        return len(self._prices)

    def __contains__(self, key: tuple[Date, str]) -> bool:
        return key in self._prices


def _parse_day(value, line_number: int, field: str) -> Date:
    if not isinstance(value, str):
        raise SnapshotParseError(line_number, f"{field} must be an ISO-8601 day string")
    try:
        return Date.fromisoformat(value)
    except ValueError as exc:
        raise SnapshotParseError(line_number, f"bad {field}: {exc}") from None


def _parse_token(obj, line_number: int, field: str) -> TokenMeta:
    if not isinstance(obj, dict):
        raise SnapshotParseError(line_number, f"{field} must be an object")
    try:
        address, symbol, decimals = obj["address"], obj["symbol"], obj["decimals"]
    except KeyError as exc:
        raise SnapshotParseError(line_number, f"{field} missing key {exc}") from None
    if not isinstance(decimals, int) or decimals < 0 or decimals > MAX_DECIMALS:
        raise SnapshotParseError(line_number, f"{field}.decimals out of range: {decimals!r}")
    return TokenMeta(address=str(address), symbol=str(symbol), decimals=decimals)


def _parse_reserve(value, line_number: int, field: str) -> Decimal:
    if not isinstance(value, str):
        raise SnapshotParseError(line_number, f"{field} must be a decimal string")
    try:
        reserve = Decimal(value)
    except InvalidOperation:
        raise SnapshotParseError(line_number, f"{field} is not a decimal number: {value!r}") from None
    if reserve < 0:
        raise SnapshotParseError(line_number, f"{field} must be non-negative, got {value!r}")
    return reserve


def _parse_record(obj: dict, line_number: int) -> PoolSnapshot:
    for key in ("date", "pool_id", "token0", "token1", "reserve0", "reserve1",
                "tvl_usd", "volume_usd", "first_trade_date", "last_trade_date"):
        if key not in obj:
            raise SnapshotParseError(line_number, f"missing key {key!r}")
    token0 = _parse_token(obj["token0"], line_number, "token0")
    token1 = _parse_token(obj["token1"], line_number, "token1")
    if token0.address == token1.address:
        raise SnapshotParseError(line_number, f"token0 and token1 share address {token0.address}")
    tvl_usd, volume_usd = obj["tvl_usd"], obj["volume_usd"]
    for name, value in (("tvl_usd", tvl_usd), ("volume_usd", volume_usd)):
        if not isinstance(value, (int, float)) or isinstance(value, bool) or value < 0:
            raise SnapshotParseError(line_number, f"{name} must be a non-negative number")
    first = _parse_day(obj["first_trade_date"], line_number, "first_trade_date")
    last = _parse_day(obj["last_trade_date"], line_number, "last_trade_date")
    if first > last:
        raise SnapshotParseError(line_number, "first_trade_date after last_trade_date")
    return PoolSnapshot(
        pool_id=str(obj["pool_id"]),
        date=_parse_day(obj["date"], line_number, "date"),
        token0=token0,
        token1=token1,
        reserve0=_parse_reserve(obj["reserve0"], line_number, "reserve0"),
        reserve1=_parse_reserve(obj["reserve1"], line_number, "reserve1"),
        tvl_usd=float(tvl_usd),
        volume_usd=float(volume_usd),
        first_trade_date=first,
        last_trade_date=last,
    )


def load_snapshots(path: str | Path, day: Date) -> list[PoolSnapshot]:
    """Read a JSON Lines snapshot file, returning the records for one day.

    Every line is validated regardless of its date, so corrupt files fail
    loudly.  Raises SnapshotParseError (with the line number) on malformed
    records and DuplicatePoolError when a pool_id repeats within one day.
    """
    result: list[PoolSnapshot] = []
    seen: set[tuple[Date, str]] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SnapshotParseError(line_number, f"invalid JSON: {exc}") from None
            if not isinstance(obj, dict):
                raise SnapshotParseError(line_number, "record must be a JSON object")
            record = _parse_record(obj, line_number)
            key = (record.date, record.pool_id)
            if key in seen:
                raise DuplicatePoolError(
                    f"pool {record.pool_id} appears twice for {record.date} (line {line_number})"
                )
            seen.add(key)
            if record.date == day:
                result.append(record)
    return result


def dump_snapshots(pools: Iterable[PoolSnapshot], out: str | Path | TextIO) -> None:
    """Write pool records in the JSON Lines snapshot format (LF line endings)."""
    own = isinstance(out, (str, Path))
    fh: TextIO = open(out, "w", encoding="utf-8", newline="\n") if own else out  # type: ignore[assignment]
    try:
        for pool in pools:
            obj = {
                "date": pool.date.isoformat(),
                "pool_id": pool.pool_id,
                "token0": {"address": pool.token0.address, "symbol": pool.token0.symbol,
                           "decimals": pool.token0.decimals},
                "token1": {"address": pool.token1.address, "symbol": pool.token1.symbol,
                           "decimals": pool.token1.decimals},
                "reserve0": str(pool.reserve0),
                "reserve1": str(pool.reserve1),
                "tvl_usd": pool.tvl_usd,
                "volume_usd": pool.volume_usd,
                "first_trade_date": pool.first_trade_date.isoformat(),
                "last_trade_date": pool.last_trade_date.isoformat(),
            }
            fh.write(json.dumps(obj, separators=(",", ":")) + "\n")
    finally:
        if own:
            fh.close()


def load_price_table(path: str | Path) -> PriceTable:
    """Read a CSV price table with header ``date,token_address,usd_price``."""
    table = PriceTable()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["date", "token_address", "usd_price"]:
            raise ParseError(f"bad price table header in {path}: {header}")
        for row_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"{path}:{row_number}: expected 3 columns, got {len(row)}")
            try:
                day = Date.fromisoformat(row[0])
                price = float(row[2])
            except ValueError as exc:
                raise ParseError(f"{path}:{row_number}: {exc}") from None
            if not price > 0:
                raise ParseError(f"{path}:{row_number}: price must be positive")
            table.set(day, row[1], price)
    return table


def dedupe_pairs(pools: list[PoolSnapshot]) -> list[PoolSnapshot]:
    """Keep exactly one pool per unordered token pair: highest TVL wins,
    ties broken by ascending pool_id."""
    best: dict[tuple[str, str], PoolSnapshot] = {}
    for pool in pools:
        pair = pool.pair()
        cur = best.get(pair)
        if (cur is None or pool.tvl_usd > cur.tvl_usd
                or (pool.tvl_usd == cur.tvl_usd and pool.pool_id < cur.pool_id)):
            best[pair] = pool
    return sorted(best.values(), key=lambda p: p.pool_id)


def _degree_cascade(pools: list[PoolSnapshot]) -> list[PoolSnapshot]:
    """Iteratively drop degree-1 tokens and their pools until none remain."""
    alive = {p.pool_id: p for p in pools}
    degree: dict[str, int] = {}
    for p in alive.values():
        for addr in p.tokens():
            degree[addr] = degree.get(addr, 0) + 1
    # process in ascending address order for a deterministic (if irrelevant) trace
    queue = sorted(addr for addr, d in degree.items() if d == 1)
    queued = set(queue)
    while queue:
        addr = queue.pop(0)
        if degree.get(addr, 0) != 1:
            continue
        doomed = [p for p in alive.values() if addr in p.tokens()]
        for pool in doomed:
            del alive[pool.pool_id]
            for other in pool.tokens():
                degree[other] -= 1
                if degree[other] == 1 and other not in queued:
                    queue.append(other)
                    queued.add(other)
            degree.pop(addr, None)
    return sorted(alive.values(), key=lambda p: p.pool_id)


def filter_pools(
    pools: list[PoolSnapshot],
    day: Date,
    tvl_floor: float = DEFAULT_TVL_FLOOR,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> list[PoolSnapshot]:
    """Apply the filtering pipeline for one date.

    In order: keep pools active on the date, keep pools with TVL strictly
    above the floor, cascade-remove degree-1 tokens, then while the token
    count exceeds ``max_tokens`` drop the lowest-TVL pool (ties by ascending
    pool_id) and re-run the cascade.  An empty result is a valid outcome.
    """
    if tvl_floor < 0:
        raise ConfigurationError("tvl_floor must be >= 0")
    if max_tokens < 2:
        raise ConfigurationError("max_tokens must be >= 2")

    kept = dedupe_pairs(pools)
    kept = [p for p in kept if p.first_trade_date <= day <= p.last_trade_date]
    kept = [p for p in kept if p.tvl_usd > tvl_floor]
    kept = _degree_cascade(kept)

    def n_tokens(ps: list[PoolSnapshot]) -> int:
        return len({addr for p in ps for addr in p.tokens()})

    while n_tokens(kept) > max_tokens:
        victim = min(kept, key=lambda p: (p.tvl_usd, p.pool_id))
        kept = [p for p in kept if p.pool_id != victim.pool_id]
        kept = _degree_cascade(kept)

    return kept
