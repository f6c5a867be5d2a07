import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fhrchaos import DelNegroParams, IntegratorConfig, attractor_sample
from fhrchaos.partition import builtin_partition, symbolize

settings.register_profile(
    "suite", deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("suite")

#: desk-scale run used by unit tests that just need a real chaotic orbit
LIGHT = IntegratorConfig(t_transient=2e4, t_record=6e4, sample_dt=0.05)


@pytest.fixture(scope="session")
def chaotic_traj():
    """One shared chaotic trajectory at a = 0.7175 (light profile)."""
    return attractor_sample(DelNegroParams(a=0.7175), LIGHT)


@pytest.fixture(scope="session")
def chaotic_seq(chaotic_traj):
    return symbolize(chaotic_traj, builtin_partition("primitive3"))


@pytest.fixture()
def rng():
    return np.random.default_rng(20260825)
