"""
Shared fixtures for the Welch equation test suite
"""
import sys
from pathlib import Path

import pytest

# Add the app directory to the Python path
sys.path.insert(0, str(Path(__file__).parent))

from app.services.welch import WelchInstance


@pytest.fixture
def make_instance():
    """Factory for WelchInstance.create(p, e, g)"""
    def _make(p: int, e: int, g: int) -> WelchInstance:
        return WelchInstance.create(p, e, g)
    return _make


@pytest.fixture
def table1_instance() -> WelchInstance:
    """p = 7, g = 2, e = 1: m = 3, the instance tabulated in full"""
    return WelchInstance.create(7, 1, 2)


@pytest.fixture
def primitive_instance() -> WelchInstance:
    """p = 7, g = 3, e = 1: 3 is a primitive root mod 7"""
    return WelchInstance.create(7, 1, 3)


@pytest.fixture
def small_instances():
    """Every WelchInstance with p in {3, 5, 7}, p^e <= 49 and 1 <= g < p"""
    instances = []
    for p in (3, 5, 7):
        e = 1
        while p ** e <= 49:
            instances.extend(WelchInstance.create(p, e, g) for g in range(1, p))
            e += 1
    return instances
