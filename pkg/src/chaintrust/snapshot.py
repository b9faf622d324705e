"""World-state snapshots as JSON files (bytes fields hex-wrapped).

The query API serves one immutable snapshot; the scenario runner writes
one next to the chain export so a finished run can be served later.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

from .contracts import CommodityContract, DigitalAsset, Participant
from .errors import IoFailure
from .ledger import WorldState
from .scoring import TrmParams

_BYTES_KEY = "__bytes__"


def _wrap(value):
    if isinstance(value, bytes):
        return {_BYTES_KEY: value.hex()}
    if isinstance(value, dict):
        return {k: _wrap(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_wrap(v) for v in value]
    return value


def _unwrap(value):
    if isinstance(value, dict):
        if set(value) == {_BYTES_KEY}:
            return bytes.fromhex(value[_BYTES_KEY])
        return {k: _unwrap(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_unwrap(v) for v in value]
    return value


def save_snapshot(path: str | Path, state: WorldState, params: TrmParams) -> None:
    document = {
        "params": dataclasses.asdict(params),
        "state": _wrap(state.to_record()),
    }
    try:
        Path(path).write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write snapshot {path}: {exc}") from exc


def load_snapshot(path: str | Path) -> tuple[WorldState, TrmParams]:
    try:
        document = json.loads(Path(path).read_text())
    except OSError as exc:
        raise IoFailure(f"cannot read snapshot {path}: {exc}") from exc
    params = TrmParams(**document["params"])
    record = _unwrap(document["state"])
    state = WorldState()
    for key, value in record["participants"].items():
        state.participants[key] = Participant.from_record(value)
    for key, value in record["assets"].items():
        state.assets[key] = DigitalAsset.from_record(value)
    for key, value in record["contracts"].items():
        state.contracts[key] = CommodityContract.from_record(value)
    state.alerts = dict(record["alerts"])
    return state, params
