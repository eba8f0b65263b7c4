import pytest

from enzyme_qssa.integration.options import IntegrationOptions
from enzyme_qssa.kinetics.parameters import ReactionConfig


@pytest.fixture
def phase_plane_config() -> ReactionConfig:
    """K_M = 20, eps_SSl = 1/24."""
    return ReactionConfig.from_values(k1=1.0, k_m1=10.0, k2=10.0, s0=100.0, e0=5.0)


@pytest.fixture
def grid_config() -> ReactionConfig:
    """One cell of the crossing-time grid: K_M = 200, eps_SSl = 1/400, C* = 8."""
    return ReactionConfig.from_values(k1=1.0, k_m1=100.0, k2=100.0, s0=200.0, e0=1.0)


@pytest.fixture
def slow_phase_config() -> ReactionConfig:
    """K_M = 100, K_S = 50, eps_RS = 0.01."""
    return ReactionConfig.from_values(k1=2.0, k_m1=100.0, k2=100.0, s0=10.0, e0=1.0)


@pytest.fixture
def options() -> IntegrationOptions:
    return IntegrationOptions(rel_tol=1e-10)
