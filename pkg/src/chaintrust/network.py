"""Convenience wiring of keys, transaction builders, contracts, and ledger.

The scenario runner, benchmark, and tests drive the system through this
facade instead of hand-assembling payload dicts. All timestamps are the
network's logical epoch.
"""

from __future__ import annotations

from .contracts import ContractEngine
from .errors import FixtureMissing
from .ledger import Block, KeyPair, Ledger, Receipt, Transaction, TxKind, sign_tx
from .scoring import Observation, TrmParams


class SupplyChainNetwork:
    """One consortium: an engine, a ledger, and the members' signing keys."""

    def __init__(self, params: TrmParams, key_seed: str | None = None):
        self.params = params
        self.engine = ContractEngine(params)
        self.ledger = Ledger(self.engine.handlers())
        self.keys: dict[str, KeyPair] = {}
        self.epoch = 0
        self._key_seed = key_seed
        self._sequence = 0

    # -- plumbing -----------------------------------------------------------

    def _new_key(self, member_id: str) -> KeyPair:
        seed = None if self._key_seed is None else f"{self._key_seed}|{member_id}"
        key = KeyPair.generate(seed)
        self.keys[member_id] = key
        return key

    def _next_id(self, prefix: str) -> str:
        self._sequence += 1
        return f"{prefix}:{self._sequence:06d}"

    def _signed(self, tx: Transaction, *signers: str) -> Transaction:
        for signer in signers:
            key = self.keys.get(signer)
            if key is None:
                raise FixtureMissing(f"no signing key held for {signer!r}")
            tx = sign_tx(tx, signer, key)
        return tx

    def advance_epoch(self, epochs: int = 1) -> None:
        self.epoch += epochs

    def seal(self) -> Block:
        return self.ledger.seal_block()

    @property
    def state(self):
        return self.ledger.state

    # -- membership -----------------------------------------------------------

    def add_authority(self, authority_id: str, properties: dict | None = None) -> Receipt:
        """Self-signed authority admission; only valid while genesis is open."""
        key = self._new_key(authority_id)
        tx = Transaction(
            kind=TxKind.REGISTER,
            tx_id=authority_id,
            timestamp=self.epoch,
            payload={
                "participant_id": authority_id,
                "roles": [],
                "properties": properties or {},
                "public_key": key.public_key,
                "authority": True,
            },
        )
        return self.ledger.submit(self._signed(tx, authority_id))

    def register_participant(
        self,
        participant_id: str,
        roles: list[str],
        approved_by: str,
        properties: dict | None = None,
    ) -> Receipt:
        key = self._new_key(participant_id)
        tx = Transaction(
            kind=TxKind.REGISTER,
            tx_id=participant_id,
            timestamp=self.epoch,
            payload={
                "participant_id": participant_id,
                "roles": list(roles),
                "properties": properties or {},
                "public_key": key.public_key,
                "authority": False,
            },
        )
        return self.ledger.submit(self._signed(tx, approved_by))

    def deploy_commodity_contract(
        self,
        commodity_type: str,
        temp_min: float,
        temp_max: float,
        monitor_interval: int,
        authority_id: str,
        participant_id: str,
    ) -> Receipt:
        tx = Transaction(
            kind=TxKind.DEPLOY,
            tx_id=f"com:{commodity_type}",
            timestamp=self.epoch,
            payload={
                "commodity_type": commodity_type,
                "temp_min": temp_min,
                "temp_max": temp_max,
                "monitor_interval": monitor_interval,
                "authority_id": authority_id,
                "participant_id": participant_id,
            },
        )
        return self.ledger.submit(self._signed(tx, authority_id, participant_id))

    # -- supply-chain operations --------------------------------------------

    def create_asset(
        self,
        producer_id: str,
        batch_id: str,
        commodity_type: str,
        location_id: str,
        properties: dict | None = None,
    ) -> Receipt:
        tx = Transaction(
            kind=TxKind.CREATE,
            tx_id=batch_id,
            timestamp=self.epoch,
            payload={
                "commodity_type": commodity_type,
                "location_id": location_id,
                "properties": properties or {},
            },
        )
        return self.ledger.submit(self._signed(tx, producer_id))

    def submit_monitor(
        self, owner_id: str, location_id: str, readings: list[Observation]
    ) -> Receipt:
        tx = Transaction(
            kind=TxKind.MONITOR,
            tx_id=f"mon:{location_id}:{self.epoch}",
            timestamp=self.epoch,
            payload={
                "location_id": location_id,
                "readings": [
                    {
                        "sensor_id": obs.sensor_id,
                        "value": obs.value,
                        "confidence": obs.confidence,
                    }
                    for obs in readings
                ],
            },
        )
        return self.ledger.submit(self._signed(tx, owner_id))

    def produce(
        self,
        producer_id: str,
        batch_id: str,
        commodity_type: str,
        source_batch_ids: list[str],
        location_id: str,
        properties: dict | None = None,
        process_params: dict | None = None,
    ) -> Receipt:
        tx = Transaction(
            kind=TxKind.PRODUCE,
            tx_id=batch_id,
            timestamp=self.epoch,
            payload={
                "commodity_type": commodity_type,
                "source_batch_ids": list(source_batch_ids),
                "location_id": location_id,
                "properties": properties or {},
                "process_params": process_params or {},
            },
        )
        return self.ledger.submit(self._signed(tx, producer_id))

    def trade(
        self,
        seller_id: str,
        buyer_id: str,
        batch_id: str,
        terms: list[dict],
        trade_id: str | None = None,
        signers: tuple[str, ...] | None = None,
    ) -> Receipt:
        tx = Transaction(
            kind=TxKind.TRADE,
            tx_id=trade_id or self._next_id(f"trade:{batch_id}"),
            timestamp=self.epoch,
            payload={
                "seller": seller_id,
                "buyer": buyer_id,
                "batch_id": batch_id,
                "terms": terms,
            },
        )
        if signers is None:
            signers = (seller_id, buyer_id)
        return self.ledger.submit(self._signed(tx, *signers))

    def inspect(
        self,
        authority_id: str,
        subject_participant: str,
        rating: float,
        report: bytes,
        subject_batch: str | None = None,
    ) -> Receipt:
        report_hash = self.ledger.off_chain.put(report)
        tx = Transaction(
            kind=TxKind.INSPECT,
            tx_id=self._next_id(f"insp:{subject_participant}"),
            timestamp=self.epoch,
            payload={
                "subject_participant": subject_participant,
                "subject_batch": subject_batch,
                "rating": rating,
                "report_hash": report_hash,
            },
        )
        return self.ledger.submit(self._signed(tx, authority_id))

    def query(self, query_kind: str, subject: str) -> Receipt:
        tx = Transaction(
            kind=TxKind.QUERY,
            tx_id=self._next_id(f"q:{query_kind}"),
            timestamp=self.epoch,
            payload={"query_kind": query_kind, "subject": subject},
        )
        return self.ledger.submit(tx)


def fulfilled_term(
    term_id: str, weight: float, deadline_epoch: int, fulfilled_epoch: int
) -> dict:
    return {
        "term_id": term_id,
        "description": "",
        "weight": weight,
        "deadline_epoch": deadline_epoch,
        "fulfilled_epoch": fulfilled_epoch,
    }


def unfulfilled_term(term_id: str, weight: float, deadline_epoch: int) -> dict:
    return {
        "term_id": term_id,
        "description": "",
        "weight": weight,
        "deadline_epoch": deadline_epoch,
        "fulfilled_epoch": None,
    }
