"""Supply-chain trust and reputation scoring over a deterministic consortium-ledger simulator.

The scoring engine (``scoring``) is a pure library; ``ledger`` and
``contracts`` form the simulated consortium chain; ``sensors`` generates
observation streams; ``scenario`` wires everything into reproducible
experiments; ``api`` serves read-only queries over a committed state.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .contracts import ContractEngine, run_query
from .ledger import KeyPair, Ledger, Transaction, TxKind, sign_tx
from .network import SupplyChainNetwork
from .scenario import bench, export_csv, load_config, run_scenario
from .scoring import (
    Observation,
    ObservationMatrix,
    TradeOutcome,
    TrmParams,
    TrustState,
    commodity_trust_batch,
    commodity_trust_step,
    compute_evidence,
    endorsement_step,
    participant_trust_step,
    reputation,
    trade_score,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    "ContractEngine",
    "run_query",
    "KeyPair",
    "Ledger",
    "Transaction",
    "TxKind",
    "sign_tx",
    "SupplyChainNetwork",
    "bench",
    "export_csv",
    "load_config",
    "run_scenario",
    "Observation",
    "ObservationMatrix",
    "TradeOutcome",
    "TrmParams",
    "TrustState",
    "commodity_trust_batch",
    "commodity_trust_step",
    "compute_evidence",
    "endorsement_step",
    "participant_trust_step",
    "reputation",
    "trade_score",
]
