"""Observation-stream generation for scenarios.

A ground-truth temperature track per location, per-sensor noise and
confidence models, fault injection from a start epoch, and gateway
batching into per-location reading vectors. Everything is a pure
function of (configuration, seed): the same seed always reproduces the
same stream, and a faulty sensor is indistinguishable from a healthy one
before its fault activates.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from enum import Enum

from .errors import InsufficientRedundancy, LocationMismatch, UndefinedEpoch
from .scoring import Observation

DEFAULT_HEALTHY_CONFIDENCE = (0.9, 1.0)
DEFAULT_CONFIDENCE_PENALTY = 0.5
DEFAULT_STUCK_VALUE = 15.0


class FaultKind(str, Enum):
    STUCK_AT = "stuck_at"
    OFFSET = "offset"
    NOISY = "noisy"


@dataclass(frozen=True)
class FaultModel:
    """Sensor defect active from ``start_epoch`` on.

    ``magnitude`` is the stuck value, the additive bias, or the extra
    noise std depending on ``kind``; a faulty reading's confidence drops
    to ``1 - confidence_penalty``.
    """

    kind: FaultKind
    magnitude: float = DEFAULT_STUCK_VALUE
    start_epoch: int = 0
    confidence_penalty: float = DEFAULT_CONFIDENCE_PENALTY

    def __post_init__(self):
        if self.start_epoch < 0:
            raise ValueError("start_epoch must be non-negative")
        if not 0.0 <= self.confidence_penalty <= 1.0:
            raise ValueError("confidence_penalty must be in [0, 1]")

    def active(self, epoch: int) -> bool:
        return epoch >= self.start_epoch


@dataclass(frozen=True)
class SensorNode:
    """One IoT node: identity, owner, location mapping, optional fault."""

    key: str
    owner: str
    location_id: str
    modality: str = "temperature"
    fault: FaultModel | None = None
    healthy_confidence: tuple[float, float] = DEFAULT_HEALTHY_CONFIDENCE


@dataclass(frozen=True)
class TemperatureTrack:
    """Piecewise-constant ground truth: baseline plus stepped shifts."""

    baseline: float
    shifts: tuple[tuple[int, float], ...] = ()

    def truth(self, epoch: int) -> float:
        value = self.baseline
        for from_epoch, shifted in self.shifts:
            if epoch >= from_epoch:
                value = shifted
        return value


@dataclass(frozen=True)
class Environment:
    """Ground-truth temperature per location plus the shared sensor noise."""

    tracks: dict[str, TemperatureTrack] = field(default_factory=dict)
    base_std: float = 0.0

    def truth(self, location_id: str, epoch: int) -> float:
        track = self.tracks.get(location_id)
        if track is None or epoch < 0:
            raise UndefinedEpoch(
                f"no ground truth for location {location_id!r} at epoch {epoch}"
            )
        return track.truth(epoch)


def _rng_for(seed: int, sensor_key: str, epoch: int) -> random.Random:
    material = f"chaintrust-sensor|{seed}|{sensor_key}|{epoch}".encode()
    digest = hashlib.sha256(material).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def sample(sensor: SensorNode, env: Environment, epoch: int, rng_seed: int) -> Observation:
    """Draw one observation; fault transforms apply after the healthy draw."""
    truth = env.truth(sensor.location_id, epoch)
    rng = _rng_for(rng_seed, sensor.key, epoch)
    value = truth + rng.gauss(0.0, env.base_std)
    lo, hi = sensor.healthy_confidence
    confidence = rng.uniform(lo, hi)
    fault = sensor.fault
    if fault is not None and fault.active(epoch):
        if fault.kind is FaultKind.STUCK_AT:
            value = fault.magnitude
        elif fault.kind is FaultKind.OFFSET:
            value = value + fault.magnitude
        else:
            value = value + rng.gauss(0.0, fault.magnitude)
        confidence = min(1.0, max(0.0, 1.0 - fault.confidence_penalty))
    return Observation(
        sensor_id=sensor.key,
        value=value,
        confidence=confidence,
        epoch=epoch,
        location_id=sensor.location_id,
    )


def gateway_collect(
    location_id: str,
    sensors: list[SensorNode],
    env: Environment,
    epoch: int,
    seed: int,
    min_sensors: int = 2,
) -> list[Observation]:
    """Batch one reading per sensor at a location into a monitor-ready vector."""
    for sensor in sensors:
        if sensor.location_id != location_id:
            raise LocationMismatch(
                f"sensor {sensor.key!r} is mapped to {sensor.location_id!r}, "
                f"not {location_id!r}"
            )
        if sensor.modality != sensors[0].modality:
            raise LocationMismatch(
                f"sensor {sensor.key!r} modality {sensor.modality!r} differs "
                f"from the location group's {sensors[0].modality!r}"
            )
    if len(sensors) < min_sensors:
        raise InsufficientRedundancy(
            f"{len(sensors)} sensors at {location_id!r}, {min_sensors} required"
        )
    return [sample(sensor, env, epoch, seed) for sensor in sensors]
