from __future__ import annotations

import pytest

from chaintrust.network import SupplyChainNetwork
from chaintrust.scoring import Observation, TrmParams


def build_network(params: TrmParams | None = None, key_seed: str = "test") -> SupplyChainNetwork:
    """Consortium with one authority, three participants, two commodities."""
    net = SupplyChainNetwork(params or TrmParams(), key_seed=key_seed)
    net.add_authority("fsa")
    net.seal()
    net.register_participant("farm", ["producer"], approved_by="fsa")
    net.register_participant("dairy", ["producer", "distributor"], approved_by="fsa")
    net.register_participant("shop", ["retailer"], approved_by="fsa")
    net.deploy_commodity_contract("milk", 2.0, 8.0, 1, "fsa", "farm")
    net.deploy_commodity_contract("strawberry", 2.0, 8.0, 1, "fsa", "farm")
    net.deploy_commodity_contract("yogurt", 2.0, 8.0, 1, "fsa", "dairy")
    net.seal()
    return net


@pytest.fixture
def net() -> SupplyChainNetwork:
    return build_network()


def readings(location_id: str, epoch: int, values, confidences=None):
    if confidences is None:
        confidences = [1.0] * len(values)
    return [
        Observation(f"s{i}", v, c, epoch, location_id)
        for i, (v, c) in enumerate(zip(values, confidences))
    ]
