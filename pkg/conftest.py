import pytest

from core import hypergeom, painleve
from core.config import TruncationPolicy


@pytest.fixture
def pol():
    return TruncationPolicy()


@pytest.fixture
def fresh_calibration():
    """Forget both calibrated conventions before and after the test"""
    hypergeom.reset_calibration()
    painleve.reset_calibration()
    yield
    hypergeom.reset_calibration()
    painleve.reset_calibration()


@pytest.fixture
def tmp_config(tmp_path, monkeypatch):
    """ToolkitConfig reading a throwaway JSON file and a throwaway run log"""
    from core.config import ToolkitConfig

    for name in ("PVI_TERM_TOL", "PVI_MAX_TERMS", "PVI_MIN_IM_TAU", "PVI_WORKERS", "PVI_RUN_LOG"):
        monkeypatch.delenv(name, raising=False)
    return ToolkitConfig(config_path=str(tmp_path / "missing.json"),
                         run_log_file=str(tmp_path / "run_log.json"))
