import numpy as np
import pytest

from dualtwist.scenario import default_chain_paths, default_scenario_path, load_chain, load_scenario


@pytest.fixture(scope="session")
def left_chain():
    return load_chain(default_chain_paths()[0])


@pytest.fixture(scope="session")
def right_chain():
    return load_chain(default_chain_paths()[1])


@pytest.fixture(scope="session")
def reference_scenario():
    return load_scenario(default_scenario_path())


def random_config(chain, rng):
    """Uniform random joint vector inside 80% of the limit range."""
    lo, hi = chain.lower_limits, chain.upper_limits
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return mid + 0.8 * half * rng.uniform(-1.0, 1.0, size=chain.joint_count)


def random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)
