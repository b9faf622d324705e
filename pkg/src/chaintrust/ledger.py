"""Deterministic simulated consortium ledger.

A single ordering node stands in for a multi-node permissioned network:
signed transactions are validated against the membership registry held in
world state, routed to contract handlers, and sealed into hash-chained
blocks. Identical transaction sequences always reproduce identical block
hashes and state roots, which is what the tests and the scenario runner
lean on.
"""

from __future__ import annotations

import hashlib
import struct
import threading
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Iterable

from cryptography.exceptions import InvalidSignature as _CryptoBadSig
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from .errors import (
    ChainImportError,
    ChainTrustError,
    InvalidSignature,
    IoFailure,
    UnknownSigner,
)

ZERO_DIGEST = b"\x00" * 32
CHAIN_FILE_HEADER = "# chaintrust-chain v1"


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


# --- canonical encoding -------------------------------------------------------
#
# Self-describing, type-tagged, and injective on the supported value set:
# strings length-prefixed, integers fixed-width big-endian, floats as raw
# IEEE-754 bit patterns, dict keys sorted. Used both as the signing input
# for transactions and to hash world state.

def canonical_encode(value) -> bytes:
    out = bytearray()
    _encode_into(value, out)
    return bytes(out)


def _encode_into(value, out: bytearray) -> None:
    if value is None:
        out += b"N"
    elif value is True:
        out += b"T"
    elif value is False:
        out += b"F"
    elif isinstance(value, int):
        out += b"I"
        out += value.to_bytes(8, "big", signed=True)
    elif isinstance(value, float):
        out += b"D"
        out += struct.pack(">d", value)
    elif isinstance(value, str):
        raw = value.encode("utf-8")
        out += b"S"
        out += len(raw).to_bytes(4, "big")
        out += raw
    elif isinstance(value, bytes):
        out += b"B"
        out += len(value).to_bytes(4, "big")
        out += value
    elif isinstance(value, (list, tuple)):
        out += b"L"
        out += len(value).to_bytes(4, "big")
        for item in value:
            _encode_into(item, out)
    elif isinstance(value, dict):
        out += b"M"
        out += len(value).to_bytes(4, "big")
        for key in sorted(value):
            if not isinstance(key, str):
                raise TypeError(f"canonical dict keys must be str, got {type(key)}")
            _encode_into(key, out)
            _encode_into(value[key], out)
    else:
        raise TypeError(f"value {value!r} is not canonically encodable")


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ChainImportError("truncated canonical encoding")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def done(self) -> bool:
        return self.pos == len(self.data)


def _decode_from(reader: _Reader):
    tag = reader.take(1)
    if tag == b"N":
        return None
    if tag == b"T":
        return True
    if tag == b"F":
        return False
    if tag == b"I":
        return int.from_bytes(reader.take(8), "big", signed=True)
    if tag == b"D":
        return struct.unpack(">d", reader.take(8))[0]
    if tag == b"S":
        n = int.from_bytes(reader.take(4), "big")
        return reader.take(n).decode("utf-8")
    if tag == b"B":
        n = int.from_bytes(reader.take(4), "big")
        return reader.take(n)
    if tag == b"L":
        n = int.from_bytes(reader.take(4), "big")
        return [_decode_from(reader) for _ in range(n)]
    if tag == b"M":
        n = int.from_bytes(reader.take(4), "big")
        return {_decode_from(reader): _decode_from(reader) for _ in range(n)}
    raise ChainImportError(f"unknown canonical tag {tag!r}")


# --- keys ---------------------------------------------------------------------

@dataclass(frozen=True)
class KeyPair:
    """Ed25519 key pair; raw 32-byte encodings on both sides."""

    public_key: bytes
    secret_key: bytes

    @classmethod
    def generate(cls, seed_material: str | None = None) -> "KeyPair":
        """Create a key pair; with ``seed_material`` the pair is deterministic."""
        if seed_material is None:
            priv = Ed25519PrivateKey.generate()
        else:
            priv = Ed25519PrivateKey.from_private_bytes(
                sha256(b"chaintrust-key|" + seed_material.encode())
            )
        from cryptography.hazmat.primitives.serialization import (
            Encoding,
            NoEncryption,
            PrivateFormat,
            PublicFormat,
        )

        return cls(
            public_key=priv.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw),
            secret_key=priv.private_bytes(
                Encoding.Raw, PrivateFormat.Raw, NoEncryption()
            ),
        )

    def sign(self, message: bytes) -> bytes:
        return Ed25519PrivateKey.from_private_bytes(self.secret_key).sign(message)


def verify_signature(public_key: bytes, message: bytes, signature: bytes) -> bool:
    try:
        Ed25519PublicKey.from_public_bytes(public_key).verify(signature, message)
        return True
    except (_CryptoBadSig, ValueError):
        return False


# --- transactions ----------------------------------------------------------------

class TxKind(str, Enum):
    REGISTER = "register"
    DEPLOY = "deploy"
    CREATE = "create"
    MONITOR = "monitor"
    PRODUCE = "produce"
    INSPECT = "inspect"
    TRADE = "trade"
    QUERY = "query"


@dataclass(frozen=True)
class Transaction:
    """A supply-chain event; ``payload`` fields are kind-specific."""

    kind: TxKind
    tx_id: str
    timestamp: int
    payload: dict
    signatures: tuple[tuple[str, bytes], ...] = ()

    def canonical_bytes(self) -> bytes:
        """Deterministic signing input; signatures are excluded."""
        return canonical_encode(
            [self.kind.value, self.tx_id, self.timestamp, self.payload]
        )

    def signing_digest(self) -> bytes:
        return sha256(self.canonical_bytes())

    def wire_bytes(self) -> bytes:
        """Full encoding including signatures, used for export and tx hashing."""
        return canonical_encode(
            [
                self.kind.value,
                self.tx_id,
                self.timestamp,
                self.payload,
                [[signer, sig] for signer, sig in self.signatures],
            ]
        )

    def tx_hash(self) -> bytes:
        return sha256(self.wire_bytes())

    @classmethod
    def from_wire(cls, data: bytes) -> "Transaction":
        reader = _Reader(data)
        fields = _decode_from(reader)
        if not reader.done() or not isinstance(fields, list) or len(fields) != 5:
            raise ChainImportError("malformed transaction wire encoding")
        kind, tx_id, timestamp, payload, sigs = fields
        return cls(
            kind=TxKind(kind),
            tx_id=tx_id,
            timestamp=timestamp,
            payload=payload,
            signatures=tuple((signer, sig) for signer, sig in sigs),
        )


def sign_tx(tx: Transaction, signer_id: str, key: KeyPair) -> Transaction:
    """Return a copy of ``tx`` with ``signer_id``'s signature appended."""
    signature = key.sign(tx.signing_digest())
    return replace(tx, signatures=tx.signatures + ((signer_id, signature),))


# --- blocks -------------------------------------------------------------------

@dataclass(frozen=True)
class Block:
    height: int
    prev_hash: bytes
    transactions: tuple[Transaction, ...]
    state_root: bytes
    block_hash: bytes

    @staticmethod
    def compute_hash(
        height: int,
        prev_hash: bytes,
        transactions: Iterable[Transaction],
        state_root: bytes,
    ) -> bytes:
        tx_digest = sha256(b"".join(tx.tx_hash() for tx in transactions))
        return sha256(
            height.to_bytes(8, "big") + prev_hash + tx_digest + state_root
        )


# --- world state -----------------------------------------------------------------

class WorldState:
    """Materialised key-value view: participants, assets, contracts, alerts."""

    def __init__(self):
        self.participants: dict[str, Any] = {}
        self.assets: dict[str, Any] = {}
        self.contracts: dict[str, Any] = {}
        self.alerts: dict[str, dict] = {}

    def to_record(self) -> dict:
        return {
            "participants": {k: v.to_record() for k, v in self.participants.items()},
            "assets": {k: v.to_record() for k, v in self.assets.items()},
            "contracts": {k: v.to_record() for k, v in self.contracts.items()},
            "alerts": dict(self.alerts),
        }

    def state_root(self) -> bytes:
        return sha256(canonical_encode(self.to_record()))


# --- events and receipts -----------------------------------------------------------

@dataclass(frozen=True)
class Event:
    """Structured contract event: alerts and score changes."""

    kind: str
    subject: str
    epoch: int
    data: dict


@dataclass(frozen=True)
class Receipt:
    tx_id: str
    accepted: bool
    error: str | None = None
    message: str | None = None
    events: tuple[Event, ...] = ()
    result: Any = None


class OffChainStore:
    """Local content-addressed store; only hashes go on-chain."""

    def __init__(self):
        self._blobs: dict[bytes, bytes] = {}

    def put(self, data: bytes) -> bytes:
        digest = sha256(data)
        self._blobs[digest] = data
        return digest

    def get(self, digest: bytes) -> bytes:
        return self._blobs[digest]

    def __contains__(self, digest: bytes) -> bool:
        return digest in self._blobs


# --- ledger -------------------------------------------------------------------

@dataclass
class HandlerContext:
    """What a contract handler may rely on besides the transaction itself."""

    verified_signers: tuple[str, ...]
    genesis: bool
    events: list[Event] = field(default_factory=list)

    def emit(self, event: Event) -> None:
        self.events.append(event)


Handler = Callable[[WorldState, Transaction, HandlerContext], Any]


class Ledger:
    """Single-writer ordering node over a handler registry.

    ``submit`` validates membership and signatures, runs the matching
    handler, and queues accepted transactions; ``seal_block`` commits the
    pending queue in FIFO order. Authority self-registrations are only
    accepted while the genesis block is still open.
    """

    def __init__(self, handlers: dict[TxKind, Handler]):
        self._handlers = handlers
        self._lock = threading.Lock()
        self.state = WorldState()
        self.blocks: list[Block] = []
        self.pending: list[Transaction] = []
        self.off_chain = OffChainStore()
        self.receipts: list[Receipt] = []

    # -- membership -------------------------------------------------------

    def _public_key_of(self, participant_id: str) -> bytes | None:
        record = self.state.participants.get(participant_id)
        if record is None:
            return None
        return record.public_key

    def _resolve_signer_key(self, tx: Transaction, signer: str) -> bytes:
        key = self._public_key_of(signer)
        if key is not None:
            return key
        # Genesis bootstrap: an authority may self-sign its own admission.
        if (
            tx.kind is TxKind.REGISTER
            and not self.blocks
            and signer == tx.payload.get("participant_id")
            and tx.payload.get("authority")
        ):
            embedded = tx.payload.get("public_key")
            if isinstance(embedded, bytes):
                return embedded
        raise UnknownSigner(f"signer {signer!r} is not an admitted member")

    def _verify_signatures(self, tx: Transaction) -> tuple[str, ...]:
        if tx.kind is TxKind.QUERY:
            if tx.signatures:
                raise InvalidSignature("query transactions are unsigned")
            return ()
        if not tx.signatures:
            raise InvalidSignature("transaction carries no signature")
        digest = tx.signing_digest()
        verified = []
        for signer, signature in tx.signatures:
            key = self._resolve_signer_key(tx, signer)
            if not verify_signature(key, digest, signature):
                raise InvalidSignature(f"signature of {signer!r} does not verify")
            verified.append(signer)
        return tuple(verified)

    # -- write path ---------------------------------------------------------

    def submit(self, tx: Transaction) -> Receipt:
        with self._lock:
            try:
                signers = self._verify_signatures(tx)
                ctx = HandlerContext(
                    verified_signers=signers, genesis=not self.blocks
                )
                handler = self._handlers.get(tx.kind)
                if handler is None:
                    raise ChainImportError(f"no handler for kind {tx.kind.value}")
                result = handler(self.state, tx, ctx)
            except ChainTrustError as exc:
                receipt = Receipt(
                    tx_id=tx.tx_id, accepted=False, error=exc.code, message=str(exc)
                )
                self.receipts.append(receipt)
                return receipt
            self.pending.append(tx)
            receipt = Receipt(
                tx_id=tx.tx_id,
                accepted=True,
                events=tuple(ctx.events),
                result=result,
            )
            self.receipts.append(receipt)
            return receipt

    def seal_block(self) -> Block:
        with self._lock:
            height = len(self.blocks)
            prev_hash = self.blocks[-1].block_hash if self.blocks else ZERO_DIGEST
            txs = tuple(self.pending)
            self.pending = []
            state_root = self.state.state_root()
            block = Block(
                height=height,
                prev_hash=prev_hash,
                transactions=txs,
                state_root=state_root,
                block_hash=Block.compute_hash(height, prev_hash, txs, state_root),
            )
            self.blocks.append(block)
            return block

    # -- audit ---------------------------------------------------------------

    def validate_chain(self) -> bool:
        """Check hash linkage and every transaction signature from genesis."""
        return validate_blocks(self.blocks)

    # -- export / import -------------------------------------------------------

    def export_chain(self, path: str | Path) -> None:
        """Write the committed chain as a line-delimited record file."""
        export_blocks(self.blocks, path)


def validate_blocks(blocks: list[Block]) -> bool:
    """Hash-linkage and signature audit over a block sequence from genesis."""
    known_keys: dict[str, bytes] = {}
    prev_hash = ZERO_DIGEST
    for block in blocks:
        if block.prev_hash != prev_hash:
            return False
        recomputed = Block.compute_hash(
            block.height, block.prev_hash, block.transactions, block.state_root
        )
        if recomputed != block.block_hash:
            return False
        for tx in block.transactions:
            if not _audit_tx(tx, known_keys, genesis=block.height == 0):
                return False
        prev_hash = block.block_hash
    return True


def _audit_tx(tx: Transaction, known_keys: dict[str, bytes], genesis: bool) -> bool:
    if tx.kind is TxKind.QUERY:
        return not tx.signatures
    if not tx.signatures:
        return False
    digest = tx.signing_digest()
    for signer, signature in tx.signatures:
        key = known_keys.get(signer)
        if key is None:
            if (
                tx.kind is TxKind.REGISTER
                and genesis
                and signer == tx.payload.get("participant_id")
                and tx.payload.get("authority")
            ):
                key = tx.payload.get("public_key")
            if not isinstance(key, bytes):
                return False
        if not verify_signature(key, digest, signature):
            return False
    if tx.kind is TxKind.REGISTER:
        pid = tx.payload.get("participant_id")
        pub = tx.payload.get("public_key")
        if isinstance(pid, str) and isinstance(pub, bytes):
            known_keys[pid] = pub
    return True


def export_blocks(blocks: list[Block], path: str | Path) -> None:
    """Write blocks as the line-delimited chain file format."""
    lines = [CHAIN_FILE_HEADER]
    for block in blocks:
        lines.append(
            "B {} {} {} {}".format(
                block.height,
                block.prev_hash.hex(),
                block.state_root.hex(),
                block.block_hash.hex(),
            )
        )
        for tx in block.transactions:
            lines.append(f"T {tx.wire_bytes().hex()}")
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write chain file {path}: {exc}") from exc


def import_chain(path: str | Path) -> list[Block]:
    """Load a chain file, recomputing and checking every digest."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoFailure(f"cannot read chain file {path}: {exc}") from exc
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != CHAIN_FILE_HEADER:
        raise ChainImportError("missing chain file header")
    blocks: list[Block] = []
    current: dict | None = None
    pending_txs: list[Transaction] = []

    def finish_current():
        if current is None:
            return
        txs = tuple(pending_txs)
        recomputed = Block.compute_hash(
            current["height"], current["prev"], txs, current["root"]
        )
        if recomputed != current["hash"]:
            raise ChainImportError(
                f"block {current['height']} hash does not match its contents"
            )
        blocks.append(
            Block(
                height=current["height"],
                prev_hash=current["prev"],
                transactions=txs,
                state_root=current["root"],
                block_hash=current["hash"],
            )
        )

    for line in lines[1:]:
        tag, _, rest = line.partition(" ")
        if tag == "B":
            finish_current()
            pending_txs = []
            try:
                height_s, prev_hex, root_hex, hash_hex = rest.split()
                current = {
                    "height": int(height_s),
                    "prev": bytes.fromhex(prev_hex),
                    "root": bytes.fromhex(root_hex),
                    "hash": bytes.fromhex(hash_hex),
                }
            except ValueError as exc:
                raise ChainImportError(f"malformed block line: {line!r}") from exc
        elif tag == "T":
            if current is None:
                raise ChainImportError("transaction before first block marker")
            try:
                pending_txs.append(Transaction.from_wire(bytes.fromhex(rest.strip())))
            except ValueError as exc:
                raise ChainImportError("malformed transaction hex") from exc
        else:
            raise ChainImportError(f"unknown record tag {tag!r}")
    finish_current()
    prev = ZERO_DIGEST
    for block in blocks:
        if block.prev_hash != prev:
            raise ChainImportError(f"broken linkage at height {block.height}")
        prev = block.block_hash
    return blocks


def replay_chain(blocks: list[Block], handlers: dict[TxKind, Handler]) -> Ledger:
    """Re-execute an imported chain from genesis on a fresh ledger.

    Raises ChainImportError if any transaction is rejected or a sealed
    block diverges from the recorded hashes/state roots.
    """
    ledger = Ledger(handlers)
    for block in blocks:
        for tx in block.transactions:
            receipt = ledger.submit(tx)
            if not receipt.accepted:
                raise ChainImportError(
                    f"replay rejected tx {tx.tx_id}: {receipt.error} ({receipt.message})"
                )
        sealed = ledger.seal_block()
        if sealed.block_hash != block.block_hash:
            raise ChainImportError(
                f"replay diverged at height {block.height}: block hash mismatch"
            )
    return ledger
