from __future__ import annotations

import copy
from pathlib import Path

import pytest

from chaintrust.errors import ConfigError, FixtureMissing, IoFailure
from chaintrust.scenario import (
    TimeSeriesOutput,
    TimeSeriesRow,
    bench,
    build_bench_network,
    export_csv,
    load_config,
    parse_config,
    run_scenario,
)

SCENARIO_DIR = Path(__file__).parent.parent / "scenarios"

MINIMAL = {
    "name": "mini",
    "seed": 1,
    "epochs": 3,
    "params": {"min_sensors": 2},
    "authorities": ["fsa"],
    "participants": [{"id": "farm", "roles": ["producer"]}],
    "contracts": [
        {"commodity": "milk", "temp_min": 2.0, "temp_max": 8.0, "participant": "farm"}
    ],
    "locations": [
        {
            "id": "cell",
            "owner": "farm",
            "temperature": {"baseline": 4.0},
            "sensors": {"count": 3, "healthy_confidence": [1.0, 1.0]},
        }
    ],
    "assets": [
        {"batch": "M-1", "owner": "farm", "commodity": "milk", "location": "cell"}
    ],
    "track": [{"subject": "M-1", "metric": "trust"}],
}


def run_minimal(**changes):
    raw = copy.deepcopy(MINIMAL)
    raw.update(changes)
    return run_scenario(parse_config(raw), raw)


# --- config validation -------------------------------------------------------

def test_missing_epochs_reports_path():
    raw = copy.deepcopy(MINIMAL)
    del raw["epochs"]
    with pytest.raises(ConfigError) as err:
        parse_config(raw)
    assert err.value.field == "<root>.epochs"


def test_unknown_asset_owner_reports_path():
    raw = copy.deepcopy(MINIMAL)
    raw["assets"][0]["owner"] = "ghost"
    with pytest.raises(ConfigError) as err:
        parse_config(raw)
    assert err.value.field == "assets[0].owner"


def test_unknown_track_metric_rejected():
    raw = copy.deepcopy(MINIMAL)
    raw["track"] = [{"subject": "M-1", "metric": "karma"}]
    with pytest.raises(ConfigError) as err:
        parse_config(raw)
    assert err.value.field == "track[0].metric"


def test_fault_sensor_index_out_of_range():
    raw = copy.deepcopy(MINIMAL)
    raw["locations"][0]["sensors"]["faults"] = [
        {"sensor": 9, "kind": "stuck_at", "start_epoch": 1}
    ]
    with pytest.raises(ConfigError) as err:
        parse_config(raw)
    assert "faults[0].sensor" in err.value.field


def test_unknown_schedule_action_rejected():
    raw = copy.deepcopy(MINIMAL)
    raw["schedule"] = [{"action": "steal", "epoch": 1}]
    with pytest.raises(ConfigError) as err:
        parse_config(raw)
    assert err.value.field == "schedule[0].action"


def test_bad_params_report_path():
    raw = copy.deepcopy(MINIMAL)
    raw["params"] = {"decay": 1.5}
    with pytest.raises(ConfigError) as err:
        parse_config(raw)
    assert err.value.field == "params"


# --- runner -----------------------------------------------------------------

def test_minimal_scenario_tracks_trust_per_epoch():
    result = run_minimal()
    curve = result.output.curve("M-1", "trust")
    assert [e for e, _ in curve] == [1, 2, 3]
    values = [v for _, v in curve]
    assert values == sorted(values)
    assert values[0] == pytest.approx(0.15, abs=1e-12)


def test_empty_scenario_yields_genesis_only_chain():
    raw = {
        "name": "empty",
        "seed": 0,
        "epochs": 2,
        "authorities": ["fsa"],
        "participants": [],
        "contracts": [],
        "locations": [],
        "assets": [],
        "track": [],
    }
    result = run_scenario(parse_config(raw), raw)
    assert result.output.rows == []
    net = result.network()
    assert len(net.ledger.blocks) == 1
    assert net.ledger.validate_chain()


def test_scenario_determinism_bytes_and_state(tmp_path):
    paths = []
    roots = []
    for run in range(2):
        result = run_minimal()
        path = tmp_path / f"run{run}.csv"
        export_csv(result.output, path)
        paths.append(path)
        roots.append(result.network().state.state_root())
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert roots[0] == roots[1]


def test_one_block_per_active_epoch():
    result = run_minimal()
    net = result.network()
    # genesis + setup + one block per epoch
    assert len(net.ledger.blocks) == 2 + MINIMAL["epochs"]


def test_monitor_interval_respected():
    raw = copy.deepcopy(MINIMAL)
    raw["contracts"][0]["monitor_interval"] = 2
    raw["epochs"] = 4
    result = run_scenario(parse_config(raw), raw)
    asset = result.network().state.assets["M-1"]
    # epochs 2 and 4 only
    assert asset.observation_count == 2


def test_rejected_schedule_action_raises_config_error():
    raw = copy.deepcopy(MINIMAL)
    raw["schedule"] = [
        {
            "action": "trade",
            "epoch": 1,
            "seller": "farm",
            "buyer": "farm",
            "batch": "GHOST",
            "terms": [{"weight": 1.0}],
        }
    ]
    with pytest.raises(ConfigError):
        run_scenario(parse_config(raw), raw)


# --- shipped fixtures ----------------------------------------------------------

def test_shipped_configs_parse():
    for name in ("gamma_sweep.yaml", "faulty_sensors.yaml", "reputation.yaml"):
        config = load_config(SCENARIO_DIR / name)
        assert config.epochs >= 1


# --- csv export ------------------------------------------------------------------

def test_export_csv_row_count(tmp_path):
    output = TimeSeriesOutput(
        rows=[
            TimeSeriesRow(epoch=e, subject=s, metric="trust", value=0.5)
            for e in (1, 2, 3)
            for s in ("A", "B")
        ]
    )
    path = tmp_path / "out.csv"
    export_csv(output, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "epoch,subject,metric,value"
    assert len(lines) == 1 + 6


def test_export_csv_reexport_identical(tmp_path):
    output = TimeSeriesOutput(rows=[TimeSeriesRow(1, "A", "trust", 0.15)])
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    export_csv(output, a)
    export_csv(output, b)
    assert a.read_bytes() == b.read_bytes()


def test_export_csv_unwritable_path():
    output = TimeSeriesOutput(rows=[])
    with pytest.raises(IoFailure):
        export_csv(output, "/nonexistent-dir/x.csv")


# --- bench -----------------------------------------------------------------------

def test_bench_zero_rate_row():
    rows = bench(tx_kind="trade", send_rates=(0,), duration=0.5)
    assert rows[0].rate == 0
    assert rows[0].throughput == 0.0
    assert rows[0].submitted == 0


def test_bench_small_trade_run():
    rows = bench(tx_kind="trade", send_rates=(50,), duration=0.4)
    row = rows[0]
    assert row.accepted == row.submitted == 20
    assert row.throughput > 0
    assert row.p50_ms > 0
    assert row.p50_ms <= row.p95_ms <= row.p99_ms


def test_bench_produce_consumes_fresh_sources():
    net = build_bench_network(seed=3)
    rows = bench(tx_kind="produce", send_rates=(50,), duration=0.4, net=net)
    assert rows[0].accepted == rows[0].submitted
    assert net.ledger.validate_chain()


def test_bench_requires_fixture():
    from chaintrust.network import SupplyChainNetwork
    from chaintrust.scoring import TrmParams

    bare = SupplyChainNetwork(TrmParams(), key_seed="bare")
    with pytest.raises(FixtureMissing):
        bench(tx_kind="trade", send_rates=(10,), duration=0.1, net=bare)


def test_bench_rejects_unknown_kind():
    with pytest.raises(FixtureMissing):
        bench(tx_kind="query", send_rates=(10,), duration=0.1)
