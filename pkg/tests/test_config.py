import pytest

from nashforge.exceptions import ConfigError
from nashforge.utils.config import NumericDefaults


def test_defaults_without_environment(monkeypatch):
    for name in ("TOL_KKT", "GRID_RES", "STARTS", "SEED", "LOG_LEVEL"):
        monkeypatch.delenv(f"NASHFORGE_{name}", raising=False)
    defaults = NumericDefaults.from_env()
    assert defaults.tol_kkt == 1e-8
    assert defaults.grid_res == 1e-2
    assert defaults.starts == 64
    assert defaults.log_level == "INFO"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("NASHFORGE_GRID_RES", "1e-3")
    monkeypatch.setenv("NASHFORGE_STARTS", "8")
    monkeypatch.setenv("NASHFORGE_SEED", "0")
    monkeypatch.setenv("NASHFORGE_LOG_LEVEL", "debug")
    defaults = NumericDefaults.from_env()
    assert defaults.grid_res == 1e-3
    assert defaults.starts == 8
    assert defaults.seed == 0
    assert defaults.log_level == "DEBUG"


@pytest.mark.parametrize("name, value", [("TOL_KKT", "abc"), ("STARTS", "0"), ("GRID_RES", "-1")])
def test_invalid_environment(monkeypatch, name, value):
    monkeypatch.setenv(f"NASHFORGE_{name}", value)
    with pytest.raises(ConfigError):
        NumericDefaults.from_env()
