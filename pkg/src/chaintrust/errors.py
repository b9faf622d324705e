"""Exception hierarchy shared by the scoring engine, ledger, and contracts.

Every error exposes a stable ``code`` (its class name) which transaction
receipts and the CLI report verbatim, so each rejection reason stays
distinguishable.
"""

from __future__ import annotations


class ChainTrustError(Exception):
    """Base class for all package errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- scoring ---------------------------------------------------------------

class InvalidParams(ChainTrustError):
    """Model constants violate their invariants."""


class WeightsNotNormalized(InvalidParams):
    """Reputation component weights do not sum to 1."""


class EmptyNeighbourSet(ChainTrustError):
    """Evidence requested with no neighbouring observations (redundancy violated)."""


class RaggedMatrix(ChainTrustError):
    """Observation matrix rows disagree on sensor count or ordering."""


class InsufficientRedundancy(ChainTrustError):
    """Fewer sensors than the configured redundancy minimum."""


class EmptyAgreementSet(ChainTrustError):
    """Trade outcome carries no agreement terms."""


class RatingOutOfRange(ChainTrustError):
    """Endorsement rating outside [0, 1]."""


class InvalidObservation(ChainTrustError):
    """Observation fields violate their invariants (e.g. confidence outside [0, 1])."""


# --- ledger ---------------------------------------------------------------

class LedgerError(ChainTrustError):
    pass


class UnknownSigner(LedgerError):
    """Signature from a key the consortium has not admitted."""


class InvalidSignature(LedgerError):
    """Signature does not verify against the signer's registered key."""


class ChainImportError(LedgerError):
    """Chain file is malformed or fails integrity checks on import."""


class IoFailure(ChainTrustError):
    """Filesystem read/write failed."""


# --- contracts --------------------------------------------------------------

class ContractError(ChainTrustError):
    """Business-rule rejection raised by a transaction handler."""


class DuplicateId(ContractError):
    pass


class InvalidParticipant(ContractError):
    """Join request violates participant invariants (e.g. no roles)."""


class NotAnAuthority(ContractError):
    pass


class NotAProducer(ContractError):
    pass


class UnknownCommodityType(ContractError):
    pass


class DuplicateBatchId(ContractError):
    pass


class DuplicateContract(ContractError):
    pass


class InvalidThresholds(ContractError):
    pass


class MissingCounterSignature(ContractError):
    pass


class UnknownLocation(ContractError):
    pass


class UnknownSource(ContractError):
    pass


class EmptySourceSet(ContractError):
    pass


class NotOwner(ContractError):
    pass


class SourceConsumed(ContractError):
    pass


class InvalidAgreement(ContractError):
    pass


class MissingReportHash(ContractError):
    pass


class UnknownSubject(ContractError):
    pass


# --- sensor simulation -------------------------------------------------------

class UndefinedEpoch(ChainTrustError):
    """Environment has no ground-truth value for the requested location/epoch."""


class LocationMismatch(ChainTrustError):
    """Sensor polled by a gateway for a location it is not mapped to."""


# --- scenario runner ---------------------------------------------------------

class ConfigError(ChainTrustError):
    """Scenario config is invalid; ``field`` holds the offending path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class FixtureMissing(ChainTrustError):
    """Benchmark invoked without its fixture participants/assets."""
