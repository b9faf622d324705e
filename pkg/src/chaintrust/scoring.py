"""Deterministic trust and reputation scoring.

Three exponentially-decayed scores with a shared decay constant:

* commodity trust — per-asset score driven by temperature readings,
  weighted by each reading's confidence and by how strongly co-located
  sensors corroborate it;
* behaviour trust — per-participant score folded from trade-agreement
  fulfilment;
* endorsement — per-participant aggregate of regulator inspection ratings.

Reputation blends the three with normalised weights. All functions are
pure and safe to call concurrently; the commodity-trust inner loops run
on the selected kernel backend (compiled or pure Python).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import (
    EmptyAgreementSet,
    EmptyNeighbourSet,
    InsufficientRedundancy,
    InvalidAgreement,
    InvalidObservation,
    InvalidParams,
    RaggedMatrix,
    RatingOutOfRange,
    WeightsNotNormalized,
)

WEIGHT_SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class TrmParams:
    """Model constants for trust and reputation scoring.

    ``in_range_weight`` and ``out_of_range_weight`` are the contributions
    of readings inside and outside the acceptable temperature band; they
    double as the upper and lower bound of the reported commodity trust.
    ``decay`` in (0, 1] shifts weight toward recent events (lower values
    converge faster). ``support_tolerance`` is the maximum value gap (in
    degrees C) at which two readings count as corroborating each other.
    """

    decay: float = 0.85
    in_range_weight: float = 1.0
    out_of_range_weight: float = 0.0
    temp_min: float = 2.0
    temp_max: float = 8.0
    commodity_weight: float = 1.0 / 3.0
    behaviour_weight: float = 1.0 / 3.0
    endorsement_weight: float = 1.0 / 3.0
    min_sensors: int = 2
    support_tolerance: float = 1.0
    clamp_evidence: bool = False

    def __post_init__(self):
        if not 0.0 < self.decay <= 1.0:
            raise InvalidParams(f"decay must be in (0, 1], got {self.decay}")
        if not self.out_of_range_weight < self.in_range_weight:
            raise InvalidParams(
                "out_of_range_weight must be strictly below in_range_weight"
            )
        if not self.temp_min < self.temp_max:
            raise InvalidParams("temp_min must be strictly below temp_max")
        weight_sum = self.commodity_weight + self.behaviour_weight + self.endorsement_weight
        if abs(weight_sum - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise WeightsNotNormalized(
                f"reputation weights sum to {weight_sum!r}, expected 1"
            )
        for name in ("commodity_weight", "behaviour_weight", "endorsement_weight"):
            w = getattr(self, name)
            if not 0.0 <= w <= 1.0:
                raise InvalidParams(f"{name} must be in [0, 1], got {w}")
        if self.min_sensors < 2:
            raise InvalidParams("min_sensors must be at least 2")
        if self.support_tolerance < 0.0:
            raise InvalidParams("support_tolerance must be non-negative")


@dataclass(frozen=True)
class Observation:
    """One sensor reading: value plus the sensor's confidence in it."""

    sensor_id: str
    value: float
    confidence: float
    epoch: int
    location_id: str

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise InvalidObservation(
                f"confidence must be in [0, 1], got {self.confidence}"
            )
        if self.epoch < 0:
            raise InvalidObservation(f"epoch must be non-negative, got {self.epoch}")


class ObservationMatrix:
    """Rectangular epoch-by-sensor grid of observations.

    Rows are whole monitoring rounds (one observation per sensor, shared
    epoch); every row must list the same sensors in the same order.
    """

    def __init__(self, rows: Sequence[Sequence[Observation]]):
        self.epochs: list[int] = []
        self.sensor_ids: list[str] = []
        self.values: list[list[float]] = []
        self.confidences: list[list[float]] = []
        for idx, row in enumerate(rows):
            ids = [obs.sensor_id for obs in row]
            if idx == 0:
                self.sensor_ids = ids
            elif ids != self.sensor_ids:
                raise RaggedMatrix(
                    f"row {idx} sensors {ids} != row 0 sensors {self.sensor_ids}"
                )
            epochs = {obs.epoch for obs in row}
            if len(epochs) > 1:
                raise RaggedMatrix(f"row {idx} mixes epochs {sorted(epochs)}")
            self.epochs.append(row[0].epoch if row else 0)
            self.values.append([obs.value for obs in row])
            self.confidences.append([obs.confidence for obs in row])

    @property
    def epoch_count(self) -> int:
        return len(self.values)

    @property
    def sensor_count(self) -> int:
        return len(self.sensor_ids)

    def kernel_arrays(self):
        """Row data in the form the selected kernel backend consumes."""
        if _kernels.BACKEND == "cython":
            shape = (self.epoch_count, self.sensor_count)
            return (
                np.ascontiguousarray(self.values, dtype=np.float64).reshape(shape),
                np.ascontiguousarray(self.confidences, dtype=np.float64).reshape(shape),
            )
        return self.values, self.confidences


@dataclass(frozen=True)
class TradeOutcome:
    """Agreement weights and their fulfilment flags for one settled trade."""

    agreements: tuple[tuple[float, bool], ...]

    def __post_init__(self):
        for weight, _ in self.agreements:
            if not 0.0 <= weight <= 1.0:
                raise InvalidAgreement(
                    f"agreement weight must be in [0, 1], got {weight}"
                )


@dataclass
class TrustState:
    """Live trust/reputation state of one participant.

    ``commodity_trust`` maps owned batch IDs to their current (clamped)
    scores; ``behaviour_trust`` and ``endorsement`` are the decayed
    accumulators; ``reputation`` caches the latest blend.
    """

    commodity_trust: dict[str, float] = field(default_factory=dict)
    behaviour_trust: float = 0.0
    endorsement: float = 0.0
    reputation: float = 0.0
    trade_count: int = 0
    endorsement_count: int = 0


def clamp_trust(value: float, params: TrmParams) -> float:
    """Clamp a raw commodity-trust accumulator to its reported range."""
    lo, hi = params.out_of_range_weight, params.in_range_weight
    if value < lo:
        return lo
    if value > hi:
        return hi
    return value


def threshold_weight(value: float, params: TrmParams) -> float:
    """Weight of a reading: full weight strictly inside the temperature band."""
    if params.temp_min < value < params.temp_max:
        return params.in_range_weight
    return params.out_of_range_weight


def compute_evidence(
    target: Observation, neighbours: Sequence[Observation], params: TrmParams
) -> float:
    """Corroboration of one reading by its co-located neighbours.

    Each neighbour contributes its confidence, signed by whether its value
    lies within ``support_tolerance`` of the target's. The raw mean is in
    [-1, 1]; with ``clamp_evidence`` set, negatives are floored at 0.
    """
    if not neighbours:
        raise EmptyNeighbourSet("evidence needs at least one neighbouring sensor")
    for obs in neighbours:
        if obs.epoch != target.epoch or obs.location_id != target.location_id:
            raise InvalidObservation(
                "evidence neighbours must share the target's epoch and location"
            )
    values = [target.value] + [obs.value for obs in neighbours]
    confs = [target.confidence] + [obs.confidence for obs in neighbours]
    if _kernels.BACKEND == "cython":
        values = np.asarray(values, dtype=np.float64)
        confs = np.asarray(confs, dtype=np.float64)
    return _kernels.evidence_at(
        values, confs, 0, params.support_tolerance, params.clamp_evidence
    )


def _check_row(row: Sequence[Observation], params: TrmParams) -> None:
    if len(row) < params.min_sensors:
        raise InsufficientRedundancy(
            f"{len(row)} sensors supplied, {params.min_sensors} required"
        )
    epochs = {obs.epoch for obs in row}
    if len(epochs) > 1:
        raise InvalidObservation(f"row mixes epochs {sorted(epochs)}")


def _row_arrays(row: Sequence[Observation]):
    values = [obs.value for obs in row]
    confs = [obs.confidence for obs in row]
    if _kernels.BACKEND == "cython":
        return (
            np.asarray(values, dtype=np.float64),
            np.asarray(confs, dtype=np.float64),
        )
    return values, confs


def commodity_trust_batch_raw(matrix: ObservationMatrix, params: TrmParams) -> float:
    """Unclamped decayed double sum over the full observation history."""
    if matrix.epoch_count == 0:
        return 0.0
    if matrix.sensor_count < params.min_sensors:
        raise InsufficientRedundancy(
            f"{matrix.sensor_count} sensors in matrix, {params.min_sensors} required"
        )
    values, confs = matrix.kernel_arrays()
    return _kernels.trust_batch_raw(
        values,
        confs,
        params.decay,
        params.in_range_weight,
        params.out_of_range_weight,
        params.temp_min,
        params.temp_max,
        params.support_tolerance,
        params.clamp_evidence,
    )


def commodity_trust_batch(matrix: ObservationMatrix, params: TrmParams) -> float:
    """Commodity trust over a full history, clamped to its reported range.

    An empty history yields the default score 0 assigned at asset creation.
    """
    return clamp_trust(commodity_trust_batch_raw(matrix, params), params)


def commodity_trust_step(
    prev_trust: float, row: Sequence[Observation], params: TrmParams
) -> float:
    """One streaming update of the raw commodity-trust accumulator.

    Folding this over a history row by row (starting from 0) reproduces
    ``commodity_trust_batch_raw`` over the same history to within 1e-12.
    The returned value is unclamped; report it through ``clamp_trust``.
    """
    _check_row(row, params)
    values, confs = _row_arrays(row)
    return _kernels.trust_step_raw(
        prev_trust,
        values,
        confs,
        params.decay,
        params.in_range_weight,
        params.out_of_range_weight,
        params.temp_min,
        params.temp_max,
        params.support_tolerance,
        params.clamp_evidence,
    )


def trade_score(outcome: TradeOutcome) -> float:
    """Fulfilment score of one trade: signed mean of agreement weights in [-1, 1]."""
    if not outcome.agreements:
        raise EmptyAgreementSet("trade outcome carries no agreement terms")
    total = 0.0
    for weight, fulfilled in outcome.agreements:
        total += weight if fulfilled else -weight
    return total / len(outcome.agreements)


def participant_trust_step(prev: float, score: float, decay: float) -> float:
    """Fold one trade's fulfilment score into the behaviour-trust accumulator."""
    if not 0.0 < decay <= 1.0:
        raise InvalidParams(f"decay must be in (0, 1], got {decay}")
    return decay * prev + (1.0 - decay) * score


def endorsement_step(prev: float, rating: float, decay: float) -> float:
    """Fold one inspection rating into the endorsement accumulator."""
    if not 0.0 <= rating <= 1.0:
        raise RatingOutOfRange(f"endorsement rating must be in [0, 1], got {rating}")
    if not 0.0 < decay <= 1.0:
        raise InvalidParams(f"decay must be in (0, 1], got {decay}")
    return decay * prev + (1.0 - decay) * rating


def commodity_trust_mean(commodity_trusts: Sequence[float]) -> float:
    """Mean of a participant's commodity scores; 0 when they own no assets."""
    if not commodity_trusts:
        return 0.0
    return sum(commodity_trusts) / len(commodity_trusts)


def reputation(
    commodity_trusts: Sequence[float],
    behaviour_trust: float,
    endorsement: float,
    params: TrmParams,
) -> float:
    """Weighted blend of commodity-trust mean, behaviour trust, and endorsement."""
    return (
        params.commodity_weight * commodity_trust_mean(commodity_trusts)
        + params.behaviour_weight * behaviour_trust
        + params.endorsement_weight * endorsement
    )
