import numpy as np
import pytest

from ladderkit.mbvd import ResonatorSpec, mbvd_from_spec


@pytest.fixture
def spec20():
    """The 20 GHz reference resonator: k2 = 0.42, Q = 50, C0 = 50 fF."""
    return ResonatorSpec(fs=20e9, k2=0.42, q=50.0, c0=50e-15)


@pytest.fixture
def params20(spec20):
    return mbvd_from_spec(spec20)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_spec(rng, q_range=(20.0, 500.0), k2_range=(0.05, 0.6)):
    return ResonatorSpec(
        fs=float(10 ** rng.uniform(9.0, 10.7)),
        k2=float(rng.uniform(*k2_range)),
        q=float(10 ** rng.uniform(np.log10(q_range[0]), np.log10(q_range[1]))),
        c0=float(10 ** rng.uniform(-14.0, -12.3)),
    )
