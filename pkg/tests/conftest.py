from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

TESTS = Path(__file__).parent


@pytest.fixture
def golden_dir():
    return TESTS / "golden"


@pytest.fixture
def fixtures_dir():
    return TESTS / "fixtures"
