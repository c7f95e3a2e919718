"""
Shared fixtures: local rings and the named small complexes
"""
import pytest

from psi_parity.config import reload_settings
from psi_parity.lab import counterexample_complex, identity_complex, split_pair_complex
from psi_parity.pairings import tautological_pairing
from psi_parity.scalars import LocalRing


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Settings come from a clean environment in every test"""
    for key in ("PSI_SAMPLES", "PSI_SEED", "PSI_LOG_LEVEL", "PSI_REPORT_FORMAT", "PSI_DEFAULT_FIELD",
                "PSI_MAX_SUMMANDS"):
        monkeypatch.delenv(key, raising=False)
    reload_settings()
    yield
    reload_settings()


@pytest.fixture
def Q():
    """O over the rationals at s0 = 0"""
    return LocalRing.rationals()


@pytest.fixture
def F5():
    """O over F_5 at s0 = 0"""
    return LocalRing.prime(5)


@pytest.fixture
def f_id(Q):
    """0 -> O -1-> O -> 0"""
    return identity_complex(Q)


@pytest.fixture
def f_sp1(Q):
    """0 -> O^2 -> O^2 -> 0 with d = [[0, t], [-t, 0]]"""
    return split_pair_complex(Q)


@pytest.fixture
def f_sp1_pairing(f_sp1):
    return tautological_pairing(f_sp1, 0)


@pytest.fixture
def f_ce(Q):
    """0 -> O -t-> O -> 0"""
    return counterexample_complex(Q)
