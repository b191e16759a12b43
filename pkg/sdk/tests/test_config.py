import pytest

from lacunary import LacunaryConfig
from lacunary.lac_config import DEFAULT_BAND, DEFAULT_GRID_EXP


def test_defaults(monkeypatch):
    for name in ("LACUNARY_GRID_EXP", "LACUNARY_BAND", "LACUNARY_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    config = LacunaryConfig()
    assert config.grid_exp == DEFAULT_GRID_EXP
    assert config.band == DEFAULT_BAND
    assert config.log_level == "WARNING"


def test_environment_overrides_defaults(monkeypatch):
    """Tests reading settings from LACUNARY_* variables"""
    monkeypatch.setenv("LACUNARY_GRID_EXP", "12")
    monkeypatch.setenv("LACUNARY_LOG_LEVEL", "debug")
    config = LacunaryConfig()
    assert config.grid_exp == 12
    assert config.log_level == "DEBUG"


def test_arguments_override_environment(monkeypatch):
    monkeypatch.setenv("LACUNARY_GRID_EXP", "12")
    assert LacunaryConfig(grid_exp=10).grid_exp == 10


@pytest.mark.parametrize("value", ["30", "abc"])
def test_bad_grid_exponent(monkeypatch, value):
    monkeypatch.setenv("LACUNARY_GRID_EXP", value)
    with pytest.raises(ValueError):
        LacunaryConfig()


def test_bad_arguments():
    with pytest.raises(ValueError):
        LacunaryConfig(band=0)
    with pytest.raises(ValueError):
        LacunaryConfig(polygon_sides=4)
    with pytest.raises(ValueError):
        LacunaryConfig(norm_tol=0)
