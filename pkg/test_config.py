"""
Tests for environment-driven settings
"""
import pytest

from app.config import Settings, _parse_budget


def test_defaults(monkeypatch):
    for key in ("LOG_LEVEL", "WELCH_MAX_PRIME", "WELCH_MAX_MODULUS", "WELCH_MAX_GRID", "WELCH_BUDGET", "WELCH_SEED"):
        monkeypatch.delenv(key, raising=False)
    settings = Settings()
    assert settings.log_level == "WARNING"
    assert (settings.max_prime, settings.max_modulus, settings.max_grid, settings.seed) == (10000, 10000, 10000000, 0)
    assert settings.validate_settings()


def test_budget_override(monkeypatch):
    monkeypatch.setenv("WELCH_BUDGET", "500:2000")
    settings = Settings()
    budget = settings.budget()
    assert (budget.max_modulus, budget.max_grid) == (500, 2000)


def test_budget_modulus_only(monkeypatch):
    monkeypatch.setenv("WELCH_MAX_GRID", "123")
    assert _parse_budget("700") == (700, 123)


@pytest.mark.parametrize("raw", ["", "a:b", "1:2:3", "-5"])
def test_malformed_budget(raw):
    with pytest.raises(ValueError):
        _parse_budget(raw)


def test_invalid_bounds(monkeypatch):
    monkeypatch.setenv("WELCH_MAX_PRIME", "0")
    assert not Settings().validate_settings()


def test_repr_lists_every_key():
    text = repr(Settings())
    for key in ("log_level", "log_file", "max_prime", "max_modulus", "max_grid", "seed"):
        assert key in text
