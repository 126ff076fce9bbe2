import sys
from pathlib import Path

import pytest

# Add src to path for imports
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Keep developer VLCSEC_* settings out of the tests."""
    for key in ("VLCSEC_CONFIG", "VLCSEC_TRIALS", "VLCSEC_SEED", "VLCSEC_JOBS",
                "VLCSEC_LOG_LEVEL"):
        monkeypatch.delenv(key, raising=False)
    yield


@pytest.fixture
def suite():
    from vlcsec.shared.config import SuiteConfig

    return SuiteConfig()


@pytest.fixture
def campaign(suite):
    """Default campaign shrunk to a handful of trials at a fixed eavesdropper point."""
    from vlcsec.cli import apply_overrides
    from vlcsec.sim import build_campaign

    small = apply_overrides(suite, trials=8, seed=7, eve="fixed:20,20")
    return build_campaign(small)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
