from __future__ import annotations

from dataclasses import replace

import pytest

from ostn.system import NetworkConfig


@pytest.fixture
def baseline() -> NetworkConfig:
    return NetworkConfig()


@pytest.fixture(params=[1, 2], ids=["K1", "K2"])
def baseline_k(request) -> NetworkConfig:
    return replace(NetworkConfig(), K=request.param)
