import json
from datetime import date as Date

import pytest
from conftest import DAY, make_pool

from dexarb.errors import (
    ConfigurationError,
    DuplicatePoolError,
    MissingPriceError,
    ParseError,
    SnapshotParseError,
)
from dexarb.market_data import (
    DEFAULT_MAX_TOKENS,
    DEFAULT_TVL_FLOOR,
    PriceTable,
    dedupe_pairs,
    dump_snapshots,
    filter_pools,
    load_price_table,
    load_snapshots,
)

DAY2 = Date(2021, 1, 2)


def write_snapshots(tmp_path, pools, name="pools.jsonl"):
    path = tmp_path / name
    dump_snapshots(pools, path)
    return path


class TestLoadSnapshots:
    def test_filters_requested_day(self, tmp_path):
        pools = [
            make_pool("P1", "A", "B", 10, 10),
            make_pool("P2", "B", "C", 10, 10),
            make_pool("P3", "C", "A", 10, 10),
            make_pool("P4", "A", "B", 10, 10, day=DAY2),
            make_pool("P5", "B", "C", 10, 10, day=DAY2),
        ]
        path = write_snapshots(tmp_path, pools)
        assert len(load_snapshots(path, DAY)) == 3
        assert len(load_snapshots(path, DAY2)) == 2
        assert load_snapshots(path, Date(2022, 1, 1)) == []

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        assert load_snapshots(path, DAY) == []

    def test_negative_reserve_rejected(self, tmp_path):
        path = write_snapshots(tmp_path, [make_pool("P1", "A", "B", 10, 10)])
        text = path.read_text().replace('"reserve0":"10"', '"reserve0":"-5"')
        path.write_text(text)
        with pytest.raises(SnapshotParseError, match="line 1"):
            load_snapshots(path, DAY)

    def test_invalid_json_names_line(self, tmp_path):
        path = write_snapshots(tmp_path, [make_pool("P1", "A", "B", 10, 10)])
        with open(path, "a") as fh:
            fh.write("{not json\n")
        with pytest.raises(SnapshotParseError, match="line 2"):
            load_snapshots(path, DAY)

    def test_duplicate_pool_same_day(self, tmp_path):
        pools = [make_pool("P1", "A", "B", 10, 10), make_pool("P1", "A", "C", 10, 10)]
        path = write_snapshots(tmp_path, pools)
        with pytest.raises(DuplicatePoolError):
            load_snapshots(path, DAY)

    def test_same_pool_on_two_days_is_fine(self, tmp_path):
        pools = [make_pool("P1", "A", "B", 10, 10), make_pool("P1", "A", "B", 11, 9, day=DAY2)]
        path = write_snapshots(tmp_path, pools)
        assert len(load_snapshots(path, DAY)) == 1

    def test_missing_key(self, tmp_path):
        path = write_snapshots(tmp_path, [make_pool("P1", "A", "B", 10, 10)])
        record = json.loads(path.read_text())
        del record["tvl_usd"]
        path.write_text(json.dumps(record) + "\n")
        with pytest.raises(SnapshotParseError, match="tvl_usd"):
            load_snapshots(path, DAY)

    def test_same_token_twice_rejected(self, tmp_path):
        path = write_snapshots(tmp_path, [make_pool("P1", "A", "A", 10, 10)])
        with pytest.raises(SnapshotParseError):
            load_snapshots(path, DAY)

    def test_trade_dates_out_of_order(self, tmp_path):
        bad = make_pool("P1", "A", "B", 10, 10, first=Date(2022, 1, 1), last=Date(2020, 1, 1))
        path = write_snapshots(tmp_path, [bad])
        with pytest.raises(SnapshotParseError):
            load_snapshots(path, DAY)

    def test_reserves_survive_round_trip_exactly(self, tmp_path):
        from decimal import Decimal

        big = 10**30 + 1  # beyond float precision: must stay exact
        pool = make_pool("P1", "A", "B", 1, 1)
        pool = type(pool)(**{**pool.__dict__, "reserve0": Decimal(big)})
        path = write_snapshots(tmp_path, [pool])
        loaded = load_snapshots(path, DAY)[0]
        assert loaded.reserve0 == big


class TestFilterPools:
    def test_paper_defaults(self):
        assert DEFAULT_TVL_FLOOR == 20_000.0
        assert DEFAULT_MAX_TOKENS == 100

    def test_triangle_survives(self):
        pools = [
            make_pool("P1", "A", "B", 1, 1, tvl=30_000),
            make_pool("P2", "B", "C", 1, 1, tvl=30_000),
            make_pool("P3", "C", "A", 1, 1, tvl=30_000),
        ]
        assert len(filter_pools(pools, DAY, max_tokens=3)) == 3

    def test_chain_cascades_to_empty(self):
        # A-B-C: C has degree 1, pruning it drops B to degree 1, then nothing is left
        pools = [
            make_pool("P1", "A", "B", 1, 1, tvl=30_000),
            make_pool("P2", "B", "C", 1, 1, tvl=30_000),
        ]
        assert filter_pools(pools, DAY) == []

    def test_pendant_pruned_cycle_kept(self):
        cycle = [
            make_pool("P1", "A", "B", 1, 1, tvl=50_000),
            make_pool("P2", "B", "C", 1, 1, tvl=50_000),
            make_pool("P3", "C", "D", 1, 1, tvl=50_000),
            make_pool("P4", "D", "A", 1, 1, tvl=50_000),
        ]
        pendant = make_pool("P5", "D", "E", 1, 1, tvl=25_000)
        kept = filter_pools(cycle + [pendant], DAY, max_tokens=4)
        assert sorted(p.pool_id for p in kept) == ["P1", "P2", "P3", "P4"]

    def test_tvl_floor_is_strict(self):
        pools = [
            make_pool("P1", "A", "B", 1, 1, tvl=20_000.0),
            make_pool("P2", "B", "C", 1, 1, tvl=30_000),
            make_pool("P3", "C", "A", 1, 1, tvl=30_000),
        ]
        assert filter_pools(pools, DAY) == []  # P1 at the floor dies, the rest cascades

    def test_inactive_pools_dropped(self):
        stale = make_pool("P1", "A", "B", 1, 1, tvl=30_000, last=Date(2020, 12, 31))
        unborn = make_pool("P2", "B", "C", 1, 1, tvl=30_000, first=Date(2021, 6, 1))
        assert filter_pools([stale, unborn], DAY) == []

    def test_max_tokens_removes_lowest_tvl_first(self):
        # two triangles sharing no tokens; the cheaper one must go entirely
        tri1 = [
            make_pool("P1", "A", "B", 1, 1, tvl=90_000),
            make_pool("P2", "B", "C", 1, 1, tvl=90_000),
            make_pool("P3", "C", "A", 1, 1, tvl=90_000),
        ]
        tri2 = [
            make_pool("P4", "D", "E", 1, 1, tvl=50_000),
            make_pool("P5", "E", "F", 1, 1, tvl=50_000),
            make_pool("P6", "F", "D", 1, 1, tvl=50_000),
        ]
        kept = filter_pools(tri1 + tri2, DAY, max_tokens=3)
        assert sorted(p.pool_id for p in kept) == ["P1", "P2", "P3"]

    def test_tvl_ties_break_by_pool_id(self):
        tri1 = [
            make_pool("P1", "A", "B", 1, 1, tvl=50_000),
            make_pool("P2", "B", "C", 1, 1, tvl=50_000),
            make_pool("P3", "C", "A", 1, 1, tvl=50_000),
        ]
        tri2 = [
            make_pool("Q1", "D", "E", 1, 1, tvl=50_000),
            make_pool("Q2", "E", "F", 1, 1, tvl=50_000),
            make_pool("Q3", "F", "D", 1, 1, tvl=50_000),
        ]
        kept = filter_pools(tri1 + tri2, DAY, max_tokens=3)
        # P1 is removed first (lowest id among ties), collapsing the first triangle
        assert sorted(p.pool_id for p in kept) == ["Q1", "Q2", "Q3"]

    def test_idempotent(self):
        pools = [
            make_pool("P1", "A", "B", 1, 1, tvl=90_000),
            make_pool("P2", "B", "C", 1, 1, tvl=80_000),
            make_pool("P3", "C", "A", 1, 1, tvl=70_000),
            make_pool("P4", "A", "D", 1, 1, tvl=60_000),
            make_pool("P5", "D", "B", 1, 1, tvl=50_000),
        ]
        once = filter_pools(pools, DAY, max_tokens=3)
        twice = filter_pools(once, DAY, max_tokens=3)
        assert once == twice

    def test_result_degrees_and_token_cap(self):
        from dexarb.synthetic import MarketSpec, generate

        for seed in range(5):
            pools = generate(MarketSpec(n_tokens=12, n_pools=20, seed=seed))
            kept = filter_pools(pools, DAY, max_tokens=8)
            degree: dict[str, int] = {}
            for p in kept:
                for a in p.tokens():
                    degree[a] = degree.get(a, 0) + 1
            assert all(d >= 2 for d in degree.values())
            assert len(degree) <= 8

    def test_dedupe_keeps_highest_tvl(self):
        pools = [
            make_pool("P1", "A", "B", 1, 1, tvl=30_000),
            make_pool("P2", "A", "B", 2, 2, tvl=40_000),
            make_pool("P3", "B", "A", 3, 3, tvl=35_000),
        ]
        assert [p.pool_id for p in dedupe_pairs(pools)] == ["P2"]

    def test_dedupe_tie_takes_smallest_id(self):
        pools = [
            make_pool("P2", "A", "B", 1, 1, tvl=30_000),
            make_pool("P1", "A", "B", 2, 2, tvl=30_000),
        ]
        assert [p.pool_id for p in dedupe_pairs(pools)] == ["P1"]

    def test_bad_arguments(self):
        with pytest.raises(ConfigurationError):
            filter_pools([], DAY, tvl_floor=-1)
        with pytest.raises(ConfigurationError):
            filter_pools([], DAY, max_tokens=1)


class TestPriceTable:
    def test_load_and_query(self, tmp_path):
        path = tmp_path / "prices.csv"
        path.write_text(
            "date,token_address,usd_price\n"
            "2021-01-01,0xA,1.5\n"
            "2021-01-01,0xB,2000.0\n"
            "2021-01-02,0xA,1.6\n"
        )
        table = load_price_table(path)
        assert table.price(DAY, "0xA") == 1.5
        assert table.price(DAY2, "0xA") == 1.6
        assert table.get(DAY, "0xC") is None
        with pytest.raises(MissingPriceError):
            table.price(DAY, "0xC")

    def test_bad_header(self, tmp_path):
        path = tmp_path / "prices.csv"
        path.write_text("day,address,price\n2021-01-01,0xA,1.0\n")
        with pytest.raises(ParseError):
            load_price_table(path)

    def test_nonpositive_price(self, tmp_path):
        path = tmp_path / "prices.csv"
        path.write_text("date,token_address,usd_price\n2021-01-01,0xA,0.0\n")
        with pytest.raises(ParseError):
            load_price_table(path)

    def test_set_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            PriceTable().set(DAY, "0xA", -1.0)
