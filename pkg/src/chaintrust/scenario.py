"""Config-driven scenario runner and transaction benchmark.

A scenario wires the sensor simulator through the contracts into the
ledger: one logical epoch means one monitoring round and one sealed
block. The runner emits a long-format time series (epoch, subject,
metric, value) suitable for CSV export; the benchmark drives synthetic
signed transactions at target send rates through the same ledger and
reports throughput and commit-latency percentiles.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError, FixtureMissing, IoFailure
from .ledger import Receipt, Transaction, TxKind, sign_tx
from .network import SupplyChainNetwork
from .scoring import TrmParams
from .sensors import (
    Environment,
    FaultKind,
    FaultModel,
    SensorNode,
    TemperatureTrack,
    gateway_collect,
)

TRACKABLE_ASSET_METRICS = ("trust", "alerts")
TRACKABLE_PARTICIPANT_METRICS = ("reputation", "behaviour_trust", "endorsement")


# --- configuration -----------------------------------------------------------

@dataclass(frozen=True)
class ParticipantSpec:
    participant_id: str
    roles: tuple[str, ...]
    properties: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ContractSpec:
    commodity: str
    temp_min: float
    temp_max: float
    monitor_interval: int
    authority: str
    participant: str


@dataclass(frozen=True)
class LocationSpec:
    location_id: str
    owner: str
    track: TemperatureTrack
    sensors: tuple[SensorNode, ...]


@dataclass(frozen=True)
class AssetSpec:
    batch: str
    owner: str
    commodity: str
    location: str


@dataclass(frozen=True)
class ScheduleEntry:
    action: str
    start: int
    every: int
    until: int
    fields: dict

    def occurs(self, epoch: int) -> bool:
        if epoch < self.start or epoch > self.until:
            return False
        return (epoch - self.start) % self.every == 0


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    seed: int
    epochs: int
    params: TrmParams
    authorities: tuple[str, ...]
    participants: tuple[ParticipantSpec, ...]
    contracts: tuple[ContractSpec, ...]
    base_std: float
    locations: tuple[LocationSpec, ...]
    assets: tuple[AssetSpec, ...]
    schedule: tuple[ScheduleEntry, ...]
    track: tuple[tuple[str, str], ...]
    variants: tuple[tuple[str, dict], ...] = ()


def _require(mapping: dict, key: str, path: str) -> Any:
    if key not in mapping:
        raise ConfigError(f"{path}.{key}", "missing required field")
    return mapping[key]


def _parse_params(raw: dict, path: str) -> TrmParams:
    known = {f.name for f in TrmParams.__dataclass_fields__.values()}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}", "unknown parameter")
    try:
        return TrmParams(**raw)
    except Exception as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_location(raw: dict, index: int, defaults: dict) -> LocationSpec:
    path = f"locations[{index}]"
    location_id = _require(raw, "id", path)
    owner = _require(raw, "owner", path)
    temp = raw.get("temperature", {})
    track = TemperatureTrack(
        baseline=float(temp.get("baseline", 4.0)),
        shifts=tuple(
            (int(s["from_epoch"]), float(s["value"]))
            for s in temp.get("shifts", [])
        ),
    )
    sensor_cfg = raw.get("sensors", {})
    count = int(sensor_cfg.get("count", 0))
    confidence = sensor_cfg.get(
        "healthy_confidence", defaults.get("healthy_confidence", [0.9, 1.0])
    )
    if len(confidence) != 2 or not (0 <= confidence[0] <= confidence[1] <= 1):
        raise ConfigError(f"{path}.sensors.healthy_confidence", "need [lo, hi] in [0, 1]")
    faults: dict[int, FaultModel] = {}
    for fi, fault_raw in enumerate(sensor_cfg.get("faults", [])):
        fault_path = f"{path}.sensors.faults[{fi}]"
        idx = int(_require(fault_raw, "sensor", fault_path))
        if not 0 <= idx < count:
            raise ConfigError(f"{fault_path}.sensor", f"index {idx} out of range")
        kind_name = _require(fault_raw, "kind", fault_path)
        try:
            kind = FaultKind(kind_name)
        except ValueError as exc:
            raise ConfigError(f"{fault_path}.kind", f"unknown fault {kind_name!r}") from exc
        faults[idx] = FaultModel(
            kind=kind,
            magnitude=float(fault_raw.get("magnitude", 15.0)),
            start_epoch=int(fault_raw.get("start_epoch", 0)),
            confidence_penalty=float(fault_raw.get("confidence_penalty", 0.5)),
        )
    sensors = tuple(
        SensorNode(
            key=f"{location_id}/s{i}",
            owner=owner,
            location_id=location_id,
            fault=faults.get(i),
            healthy_confidence=(float(confidence[0]), float(confidence[1])),
        )
        for i in range(count)
    )
    return LocationSpec(location_id=location_id, owner=owner, track=track, sensors=sensors)


def _parse_schedule_entry(raw: dict, index: int, epochs: int) -> ScheduleEntry:
    path = f"schedule[{index}]"
    action = _require(raw, "action", path)
    if action not in ("create", "produce", "trade", "inspect"):
        raise ConfigError(f"{path}.action", f"unknown action {action!r}")
    if "epoch" in raw:
        start = until = int(raw["epoch"])
        every = 1
    else:
        repeat = _require(raw, "repeat", path)
        start = int(repeat.get("start", 1))
        every = int(repeat.get("every", 1))
        until = int(repeat.get("until", epochs))
        if every < 1:
            raise ConfigError(f"{path}.repeat.every", "must be >= 1")
    fields = {k: v for k, v in raw.items() if k not in ("action", "epoch", "repeat")}
    return ScheduleEntry(action=action, start=start, every=every, until=until, fields=fields)


def parse_config(raw: dict) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a mapping")
    name = raw.get("name", "scenario")
    seed = int(raw.get("seed", 0))
    epochs = int(_require(raw, "epochs", "<root>"))
    if epochs < 1:
        raise ConfigError("epochs", "must be >= 1")
    params = _parse_params(raw.get("params", {}), "params")

    authorities = tuple(
        a["id"] if isinstance(a, dict) else str(a) for a in raw.get("authorities", [])
    )
    if not authorities:
        raise ConfigError("authorities", "at least one authority is required")

    participants = []
    for i, p in enumerate(raw.get("participants", [])):
        path = f"participants[{i}]"
        roles = tuple(_require(p, "roles", path))
        if not roles:
            raise ConfigError(f"{path}.roles", "must not be empty")
        participants.append(
            ParticipantSpec(
                participant_id=_require(p, "id", path),
                roles=roles,
                properties=dict(p.get("properties", {})),
            )
        )
    known_entities = set(authorities) | {p.participant_id for p in participants}

    contracts = []
    for i, c in enumerate(raw.get("contracts", [])):
        path = f"contracts[{i}]"
        spec = ContractSpec(
            commodity=_require(c, "commodity", path),
            temp_min=float(_require(c, "temp_min", path)),
            temp_max=float(_require(c, "temp_max", path)),
            monitor_interval=int(c.get("monitor_interval", 1)),
            authority=c.get("authority", authorities[0]),
            participant=_require(c, "participant", path),
        )
        for ref, fieldname in ((spec.authority, "authority"), (spec.participant, "participant")):
            if ref not in known_entities:
                raise ConfigError(f"{path}.{fieldname}", f"unknown entity {ref!r}")
        contracts.append(spec)
    known_commodities = {c.commodity for c in contracts}

    sensor_defaults = raw.get("sensor_defaults", {})
    locations = tuple(
        _parse_location(loc, i, sensor_defaults)
        for i, loc in enumerate(raw.get("locations", []))
    )
    for i, loc in enumerate(locations):
        if loc.owner not in known_entities:
            raise ConfigError(f"locations[{i}].owner", f"unknown entity {loc.owner!r}")
    known_locations = {loc.location_id for loc in locations}

    assets = []
    for i, a in enumerate(raw.get("assets", [])):
        path = f"assets[{i}]"
        spec = AssetSpec(
            batch=_require(a, "batch", path),
            owner=_require(a, "owner", path),
            commodity=_require(a, "commodity", path),
            location=_require(a, "location", path),
        )
        if spec.owner not in known_entities:
            raise ConfigError(f"{path}.owner", f"unknown entity {spec.owner!r}")
        if spec.commodity not in known_commodities:
            raise ConfigError(f"{path}.commodity", f"no contract for {spec.commodity!r}")
        if spec.location not in known_locations:
            raise ConfigError(f"{path}.location", f"unknown location {spec.location!r}")
        assets.append(spec)
    known_assets = {a.batch for a in assets}

    schedule = tuple(
        _parse_schedule_entry(s, i, epochs) for i, s in enumerate(raw.get("schedule", []))
    )

    track = []
    for i, t in enumerate(raw.get("track", [])):
        path = f"track[{i}]"
        subject = _require(t, "subject", path)
        metric = _require(t, "metric", path)
        if metric in TRACKABLE_ASSET_METRICS:
            if subject not in known_assets:
                raise ConfigError(f"{path}.subject", f"unknown asset {subject!r}")
        elif metric in TRACKABLE_PARTICIPANT_METRICS:
            if subject not in known_entities:
                raise ConfigError(f"{path}.subject", f"unknown participant {subject!r}")
        else:
            raise ConfigError(f"{path}.metric", f"unknown metric {metric!r}")
        track.append((subject, metric))

    variants = []
    for i, v in enumerate(raw.get("variants", [])):
        path = f"variants[{i}]"
        variants.append((_require(v, "label", path), dict(v.get("overrides", {}))))

    return ScenarioConfig(
        name=name,
        seed=seed,
        epochs=epochs,
        params=params,
        authorities=authorities,
        participants=tuple(participants),
        contracts=tuple(contracts),
        base_std=float(raw.get("environment", {}).get("base_std", 0.0)),
        locations=locations,
        assets=tuple(assets),
        schedule=schedule,
        track=tuple(track),
        variants=tuple(variants),
    )


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError("<root>", f"invalid YAML: {exc}") from exc
    return parse_config(raw)


def _deep_merge(base: dict, overrides: dict) -> dict:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


# --- time series ---------------------------------------------------------------

@dataclass(frozen=True)
class TimeSeriesRow:
    epoch: int
    subject: str
    metric: str
    value: float


@dataclass
class TimeSeriesOutput:
    rows: list[TimeSeriesRow] = field(default_factory=list)

    def curve(self, subject: str, metric: str) -> list[tuple[int, float]]:
        return [
            (r.epoch, r.value)
            for r in self.rows
            if r.subject == subject and r.metric == metric
        ]

    def subjects(self) -> list[str]:
        seen = []
        for r in self.rows:
            if r.subject not in seen:
                seen.append(r.subject)
        return seen


def export_csv(output: TimeSeriesOutput, path: str | Path) -> None:
    """Write the long-format time series; stable column and row order."""
    lines = ["epoch,subject,metric,value"]
    for row in output.rows:
        lines.append(f"{row.epoch},{row.subject},{row.metric},{row.value!r}")
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write CSV {path}: {exc}") from exc


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    output: TimeSeriesOutput
    networks: dict[str, SupplyChainNetwork]

    def network(self, label: str = "") -> SupplyChainNetwork:
        return self.networks[label]


# --- runner ------------------------------------------------------------------

def _template(value: str, epoch: int) -> str:
    return value.replace("{epoch}", str(epoch))


def _run_schedule_entry(
    net: SupplyChainNetwork, entry: ScheduleEntry, epoch: int
) -> Receipt:
    f = entry.fields
    if entry.action == "create":
        return net.create_asset(
            producer_id=f["producer"],
            batch_id=_template(f["batch"], epoch),
            commodity_type=f["commodity"],
            location_id=f["location"],
        )
    if entry.action == "produce":
        return net.produce(
            producer_id=f["producer"],
            batch_id=_template(f["batch"], epoch),
            commodity_type=f["commodity"],
            source_batch_ids=[_template(s, epoch) for s in f["sources"]],
            location_id=f["location"],
        )
    if entry.action == "trade":
        terms = []
        for i, t in enumerate(f.get("terms", [{"weight": 1.0}])):
            deadline = epoch + int(t.get("deadline_offset", 0))
            fulfilled_offset = t.get("fulfilled_offset", 0)
            fulfilled = None if fulfilled_offset is None else epoch + int(fulfilled_offset)
            terms.append(
                {
                    "term_id": t.get("term_id", f"term-{i}"),
                    "description": t.get("description", ""),
                    "weight": float(t.get("weight", 1.0)),
                    "deadline_epoch": deadline,
                    "fulfilled_epoch": fulfilled,
                }
            )
        return net.trade(
            seller_id=f["seller"],
            buyer_id=f["buyer"],
            batch_id=_template(f["batch"], epoch),
            terms=terms,
        )
    if entry.action == "inspect":
        return net.inspect(
            authority_id=f.get("authority"),
            subject_participant=f["subject"],
            rating=float(f.get("rating", 1.0)),
            report=_template(f.get("report", "inspection at {epoch}"), epoch).encode(),
        )
    raise ConfigError("schedule", f"unknown action {entry.action!r}")


def _run_single(config: ScenarioConfig) -> tuple[list[TimeSeriesRow], SupplyChainNetwork]:
    net = SupplyChainNetwork(config.params, key_seed=f"{config.name}|{config.seed}")
    for authority in config.authorities:
        net.add_authority(authority)
    net.seal()
    approver = config.authorities[0]
    for p in config.participants:
        _expect_accepted(
            net.register_participant(
                p.participant_id, list(p.roles), approved_by=approver,
                properties=p.properties,
            ),
            "participants",
        )
    for c in config.contracts:
        _expect_accepted(
            net.deploy_commodity_contract(
                c.commodity, c.temp_min, c.temp_max, c.monitor_interval,
                c.authority, c.participant,
            ),
            "contracts",
        )
    for a in config.assets:
        _expect_accepted(
            net.create_asset(a.owner, a.batch, a.commodity, a.location), "assets"
        )
    if net.ledger.pending:
        net.seal()

    env = Environment(
        tracks={loc.location_id: loc.track for loc in config.locations},
        base_std=config.base_std,
    )
    contract_by_commodity = {c.commodity: c for c in config.contracts}
    rows: list[TimeSeriesRow] = []
    for epoch in range(1, config.epochs + 1):
        net.epoch = epoch
        epoch_events = []
        for loc in config.locations:
            if not loc.sensors:
                continue
            active = [
                asset
                for asset in net.state.assets.values()
                if asset.location_id == loc.location_id
                and asset.owner == loc.owner
                and asset.consumed_by is None
            ]
            due = any(
                epoch % contract_by_commodity[a.commodity_type].monitor_interval == 0
                for a in active
                if a.commodity_type in contract_by_commodity
            )
            if not due:
                continue
            vector = gateway_collect(
                loc.location_id,
                list(loc.sensors),
                env,
                epoch,
                config.seed,
                min_sensors=config.params.min_sensors,
            )
            receipt = net.submit_monitor(loc.owner, loc.location_id, vector)
            _expect_accepted(receipt, f"monitor@{loc.location_id}")
            epoch_events.extend(receipt.events)
        for entry in config.schedule:
            if entry.occurs(epoch):
                receipt = _run_schedule_entry(net, entry, epoch)
                _expect_accepted(receipt, f"schedule {entry.action}@{epoch}")
                epoch_events.extend(receipt.events)
        if net.ledger.pending:
            net.seal()
        for subject, metric in config.track:
            rows.append(
                TimeSeriesRow(
                    epoch=epoch,
                    subject=subject,
                    metric=metric,
                    value=_read_metric(net, subject, metric, epoch_events),
                )
            )
    return rows, net


def _expect_accepted(receipt: Receipt, context: str) -> None:
    if not receipt.accepted:
        raise ConfigError(
            context, f"transaction rejected: {receipt.error} ({receipt.message})"
        )


def _read_metric(net: SupplyChainNetwork, subject: str, metric: str, events) -> float:
    if metric == "trust":
        return net.state.assets[subject].trust(net.params)
    if metric == "alerts":
        return float(
            sum(1 for e in events if e.kind == "alert" and e.subject == subject)
        )
    participant = net.state.participants[subject]
    if metric == "reputation":
        return participant.trust.reputation
    if metric == "behaviour_trust":
        return participant.trust.behaviour_trust
    if metric == "endorsement":
        return participant.trust.endorsement
    raise ConfigError("track", f"unknown metric {metric!r}")


def run_scenario(config: ScenarioConfig, raw: dict | None = None) -> ScenarioResult:
    """Execute a scenario (all variants); deterministic for a fixed config."""
    output = TimeSeriesOutput()
    networks: dict[str, SupplyChainNetwork] = {}
    if not config.variants:
        rows, net = _run_single(config)
        output.rows.extend(rows)
        networks[""] = net
        return ScenarioResult(config=config, output=output, networks=networks)
    if raw is None:
        raise ConfigError("variants", "variant runs need the raw config mapping")
    base = {k: v for k, v in raw.items() if k != "variants"}
    for label, overrides in config.variants:
        merged = _deep_merge(base, overrides)
        variant_config = parse_config(merged)
        rows, net = _run_single(variant_config)
        for row in rows:
            output.rows.append(
                TimeSeriesRow(
                    epoch=row.epoch,
                    subject=f"{label}/{row.subject}",
                    metric=row.metric,
                    value=row.value,
                )
            )
        networks[label] = net
    return ScenarioResult(config=config, output=output, networks=networks)


def run_config_file(path: str | Path, out_dir: str | Path, seed: int | None = None) -> ScenarioResult:
    """CLI entry: load a config, run it, write CSV + chain + snapshot."""
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    if seed is not None:
        raw["seed"] = seed
    config = parse_config(raw)
    result = run_scenario(config, raw)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create output dir {out}: {exc}") from exc
    export_csv(result.output, out / "timeseries.csv")
    label = "" if "" in result.networks else result.config.variants[0][0]
    net = result.networks[label]
    net.ledger.export_chain(out / "chain.txt")
    from .snapshot import save_snapshot

    save_snapshot(out / "snapshot.json", net.state, net.params)
    return result


# --- benchmark -----------------------------------------------------------------

@dataclass(frozen=True)
class BenchRow:
    rate: int
    submitted: int
    accepted: int
    elapsed_s: float
    throughput: float
    p50_ms: float
    p95_ms: float
    p99_ms: float


def _percentile(sorted_values: list[float], q: float) -> float:
    if not sorted_values:
        return 0.0
    idx = min(len(sorted_values) - 1, max(0, math.ceil(q * len(sorted_values)) - 1))
    return sorted_values[idx]


def build_bench_network(seed: int = 7, trade_assets: int = 32) -> SupplyChainNetwork:
    """Fixture consortium for the benchmark: two traders, one commodity."""
    net = SupplyChainNetwork(TrmParams(), key_seed=f"bench|{seed}")
    net.add_authority("auth")
    net.seal()
    net.register_participant("alpha", ["producer", "distributor"], approved_by="auth")
    net.register_participant("beta", ["producer", "distributor"], approved_by="auth")
    net.deploy_commodity_contract("goods", 2.0, 8.0, 1, "auth", "alpha")
    for i in range(trade_assets):
        net.create_asset("alpha", f"TRD-{i}", "goods", "depot")
    net.seal()
    return net


def _pregenerate(
    net: SupplyChainNetwork,
    tx_kind: str,
    count: int,
    tag: str,
    trade_assets: int,
    owners: dict[str, str],
) -> list[Transaction]:
    txs = []
    if tx_kind == "trade":
        for i in range(count):
            asset = f"TRD-{i % trade_assets}"
            seller = owners[asset]
            buyer = "beta" if seller == "alpha" else "alpha"
            owners[asset] = buyer
            tx = Transaction(
                kind=TxKind.TRADE,
                tx_id=f"bench-trade-{tag}-{i}",
                timestamp=net.epoch,
                payload={
                    "seller": seller,
                    "buyer": buyer,
                    "batch_id": asset,
                    "terms": [
                        {
                            "term_id": "delivery",
                            "description": "",
                            "weight": 1.0,
                            "deadline_epoch": net.epoch + 1,
                            "fulfilled_epoch": net.epoch,
                        }
                    ],
                },
            )
            tx = sign_tx(tx, seller, net.keys[seller])
            tx = sign_tx(tx, buyer, net.keys[buyer])
            txs.append(tx)
    elif tx_kind == "produce":
        for i in range(count):
            net.create_asset("alpha", f"SRC-{tag}-{i}", "goods", "depot")
        net.seal()
        for i in range(count):
            tx = Transaction(
                kind=TxKind.PRODUCE,
                tx_id=f"OUT-{tag}-{i}",
                timestamp=net.epoch,
                payload={
                    "commodity_type": "goods",
                    "source_batch_ids": [f"SRC-{tag}-{i}"],
                    "location_id": "depot",
                    "properties": {},
                    "process_params": {},
                },
            )
            txs.append(sign_tx(tx, "alpha", net.keys["alpha"]))
    else:
        raise FixtureMissing(f"benchmark supports trade|produce, not {tx_kind!r}")
    return txs


def bench(
    tx_kind: str = "trade",
    send_rates: tuple[int, ...] = (100, 500, 1000),
    duration: float = 5.0,
    seed: int = 7,
    net: SupplyChainNetwork | None = None,
    trade_assets: int = 32,
) -> list[BenchRow]:
    """Measure accepted-transaction throughput and commit latency per rate.

    Each transaction is sealed into a block as soon as it is applied
    (immediate-finality commit path); latency runs from the transaction's
    scheduled send time to its block seal, so a backlog shows up honestly
    instead of being hidden by a slow sender. One ledger serves the whole
    sweep, as a live network would.
    """
    if net is None:
        net = build_bench_network(seed, trade_assets)
    else:
        state = net.state
        if "alpha" not in state.participants or "beta" not in state.participants:
            raise FixtureMissing("benchmark needs fixture participants alpha/beta")
        if tx_kind == "trade" and "TRD-0" not in state.assets:
            raise FixtureMissing("benchmark needs fixture trade assets TRD-*")
    owners = {f"TRD-{i}": "alpha" for i in range(trade_assets)}
    if net.state.assets:
        for batch, asset in net.state.assets.items():
            if batch in owners:
                owners[batch] = asset.owner
    rows = []
    for seg, rate in enumerate(send_rates):
        count = int(rate * duration)
        if rate <= 0 or count == 0:
            rows.append(
                BenchRow(
                    rate=rate, submitted=0, accepted=0, elapsed_s=0.0,
                    throughput=0.0, p50_ms=0.0, p95_ms=0.0, p99_ms=0.0,
                )
            )
            continue
        warmup = min(20, count)
        txs = _pregenerate(
            net, tx_kind, count + warmup, tag=f"r{seg}-{rate}",
            trade_assets=trade_assets, owners=owners,
        )
        for tx in txs[:warmup]:
            net.ledger.submit(tx)
            net.ledger.seal_block()
        interval = 1.0 / rate
        latencies = []
        accepted = 0
        started = time.perf_counter()
        for i, tx in enumerate(txs[warmup:]):
            scheduled = started + i * interval
            now = time.perf_counter()
            if now < scheduled:
                time.sleep(scheduled - now)
            receipt = net.ledger.submit(tx)
            net.ledger.seal_block()
            committed = time.perf_counter()
            if receipt.accepted:
                accepted += 1
                latencies.append(committed - scheduled)
        elapsed = time.perf_counter() - started
        latencies.sort()
        rows.append(
            BenchRow(
                rate=rate,
                submitted=count,
                accepted=accepted,
                elapsed_s=elapsed,
                throughput=accepted / elapsed if elapsed > 0 else 0.0,
                p50_ms=_percentile(latencies, 0.50) * 1000,
                p95_ms=_percentile(latencies, 0.95) * 1000,
                p99_ms=_percentile(latencies, 0.99) * 1000,
            )
        )
    return rows
