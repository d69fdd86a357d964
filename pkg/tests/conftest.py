"""
Shared fixtures
"""

import numpy as np
import pytest

from src.algebra.finite_field import FieldSpec
from src.utils.config import get_settings


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test sees the defaults unless it sets SDMC_* itself"""
    for key in ('SDMC_SEED', 'SDMC_MAX_WORKERS', 'SDMC_STATE_SPACE_LIMIT', 'SDMC_PHI_RETRIES',
                'SDMC_ENTRY_BOUND', 'SDMC_LOG_FILE'):
        monkeypatch.delenv(key, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def f5():
    return FieldSpec(5)


@pytest.fixture
def f11():
    return FieldSpec(11)


@pytest.fixture
def f29():
    return FieldSpec(29)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
