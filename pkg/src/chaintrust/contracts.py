"""Smart-contract analogues: membership, commodity rules, and trust updates.

Two cooperating contract surfaces mirror the on-chain design: the trust
contract owns all score state machines, while per-commodity contracts
hold temperature thresholds and monitoring cadence. Handlers validate a
transaction fully before touching world state, so every rejection leaves
the state root unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from . import scoring
from .errors import (
    DuplicateBatchId,
    DuplicateContract,
    DuplicateId,
    EmptyAgreementSet,
    EmptySourceSet,
    InsufficientRedundancy,
    InvalidObservation,
    InvalidParticipant,
    InvalidThresholds,
    MissingCounterSignature,
    MissingReportHash,
    NotAnAuthority,
    NotAProducer,
    NotOwner,
    RatingOutOfRange,
    SourceConsumed,
    UnknownCommodityType,
    UnknownLocation,
    UnknownSource,
    UnknownSubject,
)
from .ledger import Event, HandlerContext, Transaction, TxKind, WorldState
from .scoring import Observation, TradeOutcome, TrmParams, TrustState

ROLES = ("producer", "distributor", "retailer")


@dataclass
class Participant:
    """A supply-chain entity with roles, keys, and live trust state."""

    participant_id: str
    roles: tuple[str, ...]
    properties: dict
    public_key: bytes
    authority: bool = False
    trust: TrustState = field(default_factory=TrustState)
    endorsements: list[dict] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "participant_id": self.participant_id,
            "roles": list(self.roles),
            "properties": dict(self.properties),
            "public_key": self.public_key,
            "authority": self.authority,
            "trust": {
                "commodity_trust": dict(self.trust.commodity_trust),
                "behaviour_trust": self.trust.behaviour_trust,
                "endorsement": self.trust.endorsement,
                "reputation": self.trust.reputation,
                "trade_count": self.trust.trade_count,
                "endorsement_count": self.trust.endorsement_count,
            },
            "endorsements": list(self.endorsements),
        }

    @classmethod
    def from_record(cls, record: dict) -> "Participant":
        trust = record["trust"]
        return cls(
            participant_id=record["participant_id"],
            roles=tuple(record["roles"]),
            properties=dict(record["properties"]),
            public_key=record["public_key"],
            authority=record["authority"],
            trust=TrustState(
                commodity_trust=dict(trust["commodity_trust"]),
                behaviour_trust=trust["behaviour_trust"],
                endorsement=trust["endorsement"],
                reputation=trust["reputation"],
                trade_count=trust["trade_count"],
                endorsement_count=trust["endorsement_count"],
            ),
            endorsements=list(record["endorsements"]),
        )


@dataclass
class DigitalAsset:
    """On-ledger twin of one commodity lot."""

    batch_id: str
    owner: str
    commodity_type: str
    properties: dict
    location_id: str
    source_batch_ids: tuple[str, ...] = ()
    raw_trust: float = 0.0
    observation_count: int = 0
    consumed_by: str | None = None
    off_chain_refs: list[bytes] = field(default_factory=list)
    endorsements: list[dict] = field(default_factory=list)

    def trust(self, params: TrmParams) -> float:
        return scoring.clamp_trust(self.raw_trust, params)

    def to_record(self) -> dict:
        return {
            "batch_id": self.batch_id,
            "owner": self.owner,
            "commodity_type": self.commodity_type,
            "properties": dict(self.properties),
            "location_id": self.location_id,
            "source_batch_ids": list(self.source_batch_ids),
            "raw_trust": self.raw_trust,
            "observation_count": self.observation_count,
            "consumed_by": self.consumed_by,
            "off_chain_refs": list(self.off_chain_refs),
            "endorsements": list(self.endorsements),
        }

    @classmethod
    def from_record(cls, record: dict) -> "DigitalAsset":
        return cls(
            batch_id=record["batch_id"],
            owner=record["owner"],
            commodity_type=record["commodity_type"],
            properties=dict(record["properties"]),
            location_id=record["location_id"],
            source_batch_ids=tuple(record["source_batch_ids"]),
            raw_trust=record["raw_trust"],
            observation_count=record["observation_count"],
            consumed_by=record["consumed_by"],
            off_chain_refs=list(record["off_chain_refs"]),
            endorsements=list(record["endorsements"]),
        )


@dataclass
class CommodityContract:
    """Per-commodity quality rules: temperature band and monitor cadence."""

    commodity_type: str
    temp_min: float
    temp_max: float
    monitor_interval: int
    authority_id: str
    participant_id: str

    def to_record(self) -> dict:
        return {
            "commodity_type": self.commodity_type,
            "temp_min": self.temp_min,
            "temp_max": self.temp_max,
            "monitor_interval": self.monitor_interval,
            "authority_id": self.authority_id,
            "participant_id": self.participant_id,
        }

    @classmethod
    def from_record(cls, record: dict) -> "CommodityContract":
        return cls(**record)


@dataclass(frozen=True)
class TradeTerm:
    """One agreement line of a trade: weight, deadline, and fulfilment evidence."""

    term_id: str
    description: str
    weight: float
    deadline_epoch: int
    fulfilled_epoch: int | None = None

    @property
    def fulfilled(self) -> bool:
        return self.fulfilled_epoch is not None and (
            self.fulfilled_epoch <= self.deadline_epoch
        )


@dataclass(frozen=True)
class Endorsement:
    """A regulator's inspection rating with its off-chain report hash."""

    authority_id: str
    subject: str
    rating: float
    report_hash: bytes

    def to_record(self) -> dict:
        return {
            "authority_id": self.authority_id,
            "subject": self.subject,
            "rating": self.rating,
            "report_hash": self.report_hash,
        }


@dataclass(frozen=True)
class Alert:
    """Raised when a monitor round sees readings outside the commodity band."""

    batch_id: str
    epoch: int
    sensor_ids: tuple[str, ...]
    values: tuple[float, ...]

    def to_record(self) -> dict:
        return {
            "batch_id": self.batch_id,
            "epoch": self.epoch,
            "sensor_ids": list(self.sensor_ids),
            "values": list(self.values),
        }


class ContractEngine:
    """Kind-routed transaction handlers over a world state."""

    def __init__(self, params: TrmParams):
        self.params = params

    def handlers(self):
        return {
            TxKind.REGISTER: self.handle_register,
            TxKind.DEPLOY: self.handle_deploy,
            TxKind.CREATE: self.handle_create,
            TxKind.MONITOR: self.handle_monitor,
            TxKind.PRODUCE: self.handle_produce,
            TxKind.INSPECT: self.handle_inspect,
            TxKind.TRADE: self.handle_trade,
            TxKind.QUERY: self.handle_query,
        }

    # -- helpers -----------------------------------------------------------

    def _participant(self, state: WorldState, participant_id: str) -> Participant:
        participant = state.participants.get(participant_id)
        if participant is None:
            raise UnknownSubject(f"participant {participant_id!r} is not registered")
        return participant

    def _require_authority(self, state: WorldState, signers: Sequence[str]) -> str:
        for signer in signers:
            participant = state.participants.get(signer)
            if participant is not None and participant.authority:
                return signer
        raise NotAnAuthority("an authority signature is required")

    def _require_producer(self, state: WorldState, signer: str) -> Participant:
        participant = self._participant(state, signer)
        if "producer" not in participant.roles:
            raise NotAProducer(f"{signer!r} does not hold the producer role")
        return participant

    def _commodity_params(self, contract: CommodityContract) -> TrmParams:
        return replace(
            self.params, temp_min=contract.temp_min, temp_max=contract.temp_max
        )

    def _refresh_reputation(
        self, participant: Participant, ctx: HandlerContext, epoch: int
    ) -> None:
        old = participant.trust.reputation
        new = scoring.reputation(
            list(participant.trust.commodity_trust.values()),
            participant.trust.behaviour_trust,
            participant.trust.endorsement,
            self.params,
        )
        participant.trust.reputation = new
        if new != old:
            ctx.emit(
                Event(
                    kind="score",
                    subject=participant.participant_id,
                    epoch=epoch,
                    data={"metric": "reputation", "old": old, "new": new},
                )
            )

    # -- handlers -------------------------------------------------------------

    def handle_register(
        self, state: WorldState, tx: Transaction, ctx: HandlerContext
    ) -> dict:
        payload = tx.payload
        participant_id = payload["participant_id"]
        is_authority = bool(payload.get("authority"))
        roles = tuple(payload.get("roles", ()))
        if participant_id in state.participants:
            raise DuplicateId(f"participant id {participant_id!r} already taken")
        if is_authority:
            if not ctx.genesis:
                raise NotAnAuthority(
                    "authority self-registration is only valid at genesis"
                )
        else:
            self._require_authority(state, ctx.verified_signers)
            if not roles:
                raise InvalidParticipant("non-authority participants need a role")
        for role in roles:
            if role not in ROLES:
                raise InvalidParticipant(f"unknown role {role!r}")
        state.participants[participant_id] = Participant(
            participant_id=participant_id,
            roles=roles,
            properties=dict(payload.get("properties", {})),
            public_key=payload["public_key"],
            authority=is_authority,
        )
        return {"participant_id": participant_id}

    def handle_deploy(
        self, state: WorldState, tx: Transaction, ctx: HandlerContext
    ) -> dict:
        payload = tx.payload
        commodity_type = payload["commodity_type"]
        temp_min = payload["temp_min"]
        temp_max = payload["temp_max"]
        interval = payload["monitor_interval"]
        authority_id = payload["authority_id"]
        participant_id = payload["participant_id"]
        if not temp_min < temp_max:
            raise InvalidThresholds(
                f"temp_min {temp_min} must be strictly below temp_max {temp_max}"
            )
        if interval < 1:
            raise InvalidThresholds("monitor_interval must be at least 1 epoch")
        if authority_id == participant_id:
            raise MissingCounterSignature(
                "commodity contracts need two distinct signers"
            )
        signers = set(ctx.verified_signers)
        if not {authority_id, participant_id} <= signers:
            raise MissingCounterSignature(
                "commodity contracts need both the authority's and the participant's signature"
            )
        authority = self._participant(state, authority_id)
        if not authority.authority:
            raise NotAnAuthority(f"{authority_id!r} is not an authority")
        self._participant(state, participant_id)
        if commodity_type in state.contracts:
            raise DuplicateContract(
                f"commodity contract for {commodity_type!r} already deployed"
            )
        state.contracts[commodity_type] = CommodityContract(
            commodity_type=commodity_type,
            temp_min=temp_min,
            temp_max=temp_max,
            monitor_interval=interval,
            authority_id=authority_id,
            participant_id=participant_id,
        )
        return {"commodity_type": commodity_type}

    def handle_create(
        self, state: WorldState, tx: Transaction, ctx: HandlerContext
    ) -> dict:
        payload = tx.payload
        batch_id = tx.tx_id
        signer = ctx.verified_signers[0]
        producer = self._require_producer(state, signer)
        commodity_type = payload["commodity_type"]
        if commodity_type not in state.contracts:
            raise UnknownCommodityType(
                f"no commodity contract deployed for {commodity_type!r}"
            )
        if batch_id in state.assets:
            raise DuplicateBatchId(f"batch id {batch_id!r} already exists")
        asset = DigitalAsset(
            batch_id=batch_id,
            owner=signer,
            commodity_type=commodity_type,
            properties=dict(payload.get("properties", {})),
            location_id=payload["location_id"],
        )
        state.assets[batch_id] = asset
        producer.trust.commodity_trust[batch_id] = asset.trust(self.params)
        self._refresh_reputation(producer, ctx, tx.timestamp)
        return {"batch_id": batch_id, "trust": asset.trust(self.params)}

    def handle_monitor(
        self, state: WorldState, tx: Transaction, ctx: HandlerContext
    ) -> dict:
        payload = tx.payload
        location_id = payload["location_id"]
        signer = ctx.verified_signers[0]
        epoch = tx.timestamp
        raw_readings = payload["readings"]
        if len(raw_readings) < self.params.min_sensors:
            raise InsufficientRedundancy(
                f"{len(raw_readings)} readings supplied, "
                f"{self.params.min_sensors} required"
            )
        try:
            row = [
                Observation(
                    sensor_id=r["sensor_id"],
                    value=r["value"],
                    confidence=r["confidence"],
                    epoch=epoch,
                    location_id=location_id,
                )
                for r in raw_readings
            ]
        except KeyError as exc:
            raise InvalidObservation(f"reading misses field {exc}") from exc
        assets = [
            asset
            for asset in state.assets.values()
            if asset.location_id == location_id
            and asset.owner == signer
            and asset.consumed_by is None
        ]
        if not assets:
            raise UnknownLocation(
                f"{signer!r} owns no active assets at location {location_id!r}"
            )
        for asset in assets:
            contract = state.contracts.get(asset.commodity_type)
            if contract is None:
                raise UnknownCommodityType(
                    f"no commodity contract for {asset.commodity_type!r}"
                )
        updated = {}
        owners = {}
        for asset in assets:
            contract = state.contracts[asset.commodity_type]
            commodity_params = self._commodity_params(contract)
            old = asset.trust(commodity_params)
            asset.raw_trust = scoring.commodity_trust_step(
                asset.raw_trust, row, commodity_params
            )
            asset.observation_count += 1
            new = asset.trust(commodity_params)
            owner = self._participant(state, asset.owner)
            owner.trust.commodity_trust[asset.batch_id] = new
            owners[owner.participant_id] = owner
            updated[asset.batch_id] = new
            ctx.emit(
                Event(
                    kind="score",
                    subject=asset.batch_id,
                    epoch=epoch,
                    data={"metric": "commodity_trust", "old": old, "new": new},
                )
            )
            offenders = [
                obs
                for obs in row
                if obs.value < contract.temp_min or obs.value > contract.temp_max
            ]
            if offenders:
                alert = Alert(
                    batch_id=asset.batch_id,
                    epoch=epoch,
                    sensor_ids=tuple(o.sensor_id for o in offenders),
                    values=tuple(o.value for o in offenders),
                )
                state.alerts[f"{len(state.alerts):08d}"] = alert.to_record()
                ctx.emit(
                    Event(
                        kind="alert",
                        subject=asset.batch_id,
                        epoch=epoch,
                        data={
                            "sensor_ids": list(alert.sensor_ids),
                            "values": list(alert.values),
                        },
                    )
                )
        for owner in owners.values():
            self._refresh_reputation(owner, ctx, epoch)
        return {"updated": updated}

    def handle_produce(
        self, state: WorldState, tx: Transaction, ctx: HandlerContext
    ) -> dict:
        payload = tx.payload
        batch_id = tx.tx_id
        signer = ctx.verified_signers[0]
        producer = self._require_producer(state, signer)
        commodity_type = payload["commodity_type"]
        source_ids = list(payload["source_batch_ids"])
        if not source_ids:
            raise EmptySourceSet("produce needs at least one source batch")
        if commodity_type not in state.contracts:
            raise UnknownCommodityType(
                f"no commodity contract deployed for {commodity_type!r}"
            )
        if batch_id in state.assets:
            raise DuplicateBatchId(f"batch id {batch_id!r} already exists")
        sources = []
        for source_id in source_ids:
            source = state.assets.get(source_id)
            if source is None:
                raise UnknownSource(f"source batch {source_id!r} does not exist")
            if source.owner != signer:
                raise NotOwner(f"{signer!r} does not own source batch {source_id!r}")
            if source.consumed_by is not None:
                raise SourceConsumed(
                    f"source batch {source_id!r} was consumed by {source.consumed_by!r}"
                )
            sources.append(source)
        source_trusts = [s.trust(self.params) for s in sources]
        mean_trust = sum(source_trusts) / len(source_trusts)
        asset = DigitalAsset(
            batch_id=batch_id,
            owner=signer,
            commodity_type=commodity_type,
            properties=dict(payload.get("properties", {})),
            location_id=payload["location_id"],
            source_batch_ids=tuple(source_ids),
            raw_trust=mean_trust,
        )
        for source in sources:
            source.consumed_by = batch_id
            producer.trust.commodity_trust.pop(source.batch_id, None)
        state.assets[batch_id] = asset
        producer.trust.commodity_trust[batch_id] = asset.trust(self.params)
        self._refresh_reputation(producer, ctx, tx.timestamp)
        return {"batch_id": batch_id, "trust": asset.trust(self.params)}

    def handle_inspect(
        self, state: WorldState, tx: Transaction, ctx: HandlerContext
    ) -> dict:
        payload = tx.payload
        signer = ctx.verified_signers[0]
        authority = self._participant(state, signer)
        if not authority.authority:
            raise NotAnAuthority(f"{signer!r} is not an authority")
        rating = payload["rating"]
        if not 0.0 <= rating <= 1.0:
            raise RatingOutOfRange(f"rating must be in [0, 1], got {rating}")
        report_hash = payload.get("report_hash")
        if not isinstance(report_hash, bytes) or not report_hash:
            raise MissingReportHash("inspect needs the off-chain report hash")
        subject = self._participant(state, payload["subject_participant"])
        subject_batch = payload.get("subject_batch")
        asset = None
        if subject_batch is not None:
            asset = state.assets.get(subject_batch)
            if asset is None:
                raise UnknownSubject(f"asset {subject_batch!r} does not exist")
        endorsement = Endorsement(
            authority_id=signer,
            subject=subject.participant_id,
            rating=rating,
            report_hash=report_hash,
        )
        old = subject.trust.endorsement
        subject.trust.endorsement = scoring.endorsement_step(
            old, rating, self.params.decay
        )
        subject.trust.endorsement_count += 1
        subject.endorsements.append(endorsement.to_record())
        if asset is not None:
            # Stored for audit only; per-asset endorsements never move trust.
            asset.endorsements.append(endorsement.to_record())
        ctx.emit(
            Event(
                kind="score",
                subject=subject.participant_id,
                epoch=tx.timestamp,
                data={
                    "metric": "endorsement",
                    "old": old,
                    "new": subject.trust.endorsement,
                },
            )
        )
        self._refresh_reputation(subject, ctx, tx.timestamp)
        return {
            "participant_id": subject.participant_id,
            "endorsement": subject.trust.endorsement,
            "reputation": subject.trust.reputation,
        }

    def handle_trade(
        self, state: WorldState, tx: Transaction, ctx: HandlerContext
    ) -> dict:
        payload = tx.payload
        seller_id = payload["seller"]
        buyer_id = payload["buyer"]
        batch_id = payload["batch_id"]
        signers = set(ctx.verified_signers)
        if not {seller_id, buyer_id} <= signers or len(tx.signatures) != 2:
            raise MissingCounterSignature(
                "trades need exactly the seller's and the buyer's signatures"
            )
        seller = self._participant(state, seller_id)
        buyer = self._participant(state, buyer_id)
        asset = state.assets.get(batch_id)
        if asset is None or asset.consumed_by is not None:
            raise SourceConsumed(f"batch {batch_id!r} is not tradeable")
        if asset.owner != seller_id:
            raise NotOwner(f"{seller_id!r} does not own batch {batch_id!r}")
        raw_terms = payload["terms"]
        if not raw_terms:
            raise EmptyAgreementSet("trade carries no agreement terms")
        terms = [
            TradeTerm(
                term_id=t["term_id"],
                description=t.get("description", ""),
                weight=t["weight"],
                deadline_epoch=t["deadline_epoch"],
                fulfilled_epoch=t.get("fulfilled_epoch"),
            )
            for t in raw_terms
        ]
        outcome = TradeOutcome(tuple((t.weight, t.fulfilled) for t in terms))
        score = scoring.trade_score(outcome)
        asset.owner = buyer_id
        seller.trust.commodity_trust.pop(batch_id, None)
        buyer.trust.commodity_trust[batch_id] = asset.trust(self.params)
        for party in (seller, buyer):
            old = party.trust.behaviour_trust
            party.trust.behaviour_trust = scoring.participant_trust_step(
                old, score, self.params.decay
            )
            party.trust.trade_count += 1
            ctx.emit(
                Event(
                    kind="score",
                    subject=party.participant_id,
                    epoch=tx.timestamp,
                    data={
                        "metric": "behaviour_trust",
                        "old": old,
                        "new": party.trust.behaviour_trust,
                    },
                )
            )
            self._refresh_reputation(party, ctx, tx.timestamp)
        return {
            "batch_id": batch_id,
            "new_owner": buyer_id,
            "score": score,
            "seller_trust": seller.trust.behaviour_trust,
            "buyer_trust": buyer.trust.behaviour_trust,
        }

    def handle_query(
        self, state: WorldState, tx: Transaction, ctx: HandlerContext
    ) -> dict:
        return run_query(
            state, tx.payload["query_kind"], tx.payload["subject"], self.params
        )


def run_query(
    state: WorldState, query_kind: str, subject: str, params: TrmParams
) -> dict:
    """Read-only queries: provenance DAG, asset trust, participant reputation."""
    if query_kind == "trust":
        asset = state.assets.get(subject)
        if asset is None:
            raise UnknownSubject(f"asset {subject!r} does not exist")
        return {"batch_id": subject, "trust": asset.trust(params)}
    if query_kind == "reputation":
        participant = state.participants.get(subject)
        if participant is None:
            raise UnknownSubject(f"participant {subject!r} is not registered")
        trust = participant.trust
        return {
            "participant_id": subject,
            "reputation": trust.reputation,
            "components": {
                "commodity_trust_mean": scoring.commodity_trust_mean(
                    list(trust.commodity_trust.values())
                ),
                "behaviour_trust": trust.behaviour_trust,
                "endorsement": trust.endorsement,
            },
        }
    if query_kind == "provenance":
        root = state.assets.get(subject)
        if root is None:
            raise UnknownSubject(f"asset {subject!r} does not exist")
        nodes = []
        edges = []
        seen = set()
        queue = [subject]
        while queue:
            batch_id = queue.pop(0)
            if batch_id in seen:
                continue
            seen.add(batch_id)
            asset = state.assets[batch_id]
            nodes.append(
                {
                    "batch_id": batch_id,
                    "commodity_type": asset.commodity_type,
                    "trust": asset.trust(params),
                    "owner": asset.owner,
                }
            )
            for source_id in asset.source_batch_ids:
                edges.append([batch_id, source_id])
                queue.append(source_id)
        return {"root": subject, "nodes": nodes, "edges": edges}
    raise UnknownSubject(f"unknown query kind {query_kind!r}")
