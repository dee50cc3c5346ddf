from __future__ import annotations

import numpy as np
import pytest

from waylimit.services.bloch_service import BlochService
from waylimit.services.bounds_service import BoundsService
from waylimit.services.channel_service import ChannelService
from waylimit.services.model_service import ModelService


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture
def bloch() -> BlochService:
    return BlochService()


@pytest.fixture
def bounds(bloch: BlochService) -> BoundsService:
    return BoundsService(bloch)


@pytest.fixture
def channel(bloch: BlochService, bounds: BoundsService) -> ChannelService:
    return ChannelService(bloch, bounds)


@pytest.fixture
def models(bloch: BlochService) -> ModelService:
    return ModelService(bloch)
