import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from subspace_dr.experiments import ExperimentConfig, make_rng, random_start, random_subspace_pair
from subspace_dr.subspace_core import orthonormalize

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def gaussian_subspace(rng, d, k):
    return orthonormalize(rng.standard_normal((d, k)), d)


def seeded_pair(seed, d=50):
    """Random pair from the benchmark model in R^d."""
    cfg = ExperimentConfig.scaled(d, seed=seed)
    return random_subspace_pair(cfg, make_rng(seed, 0))


def seeded_start(seed, d, norm=10.0):
    return random_start(d, norm, make_rng(seed, 99))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def subspace_pairs(draw, max_dim=7):
    """(U, V, x) with small random dimensions and a shared block."""
    d = draw(st.integers(2, max_dim))
    k = draw(st.integers(0, d // 2))
    du = draw(st.integers(k, d))
    dv = draw(st.integers(k, max(k, d - du + k)))
    seed = draw(st.integers(0, 2**32 - 1))
    r = np.random.default_rng(seed)
    W = r.standard_normal((d, k))
    U = orthonormalize(np.hstack([W, r.standard_normal((d, du - k))]), d)
    V = orthonormalize(np.hstack([W, r.standard_normal((d, dv - k))]), d)
    x = r.standard_normal(d) * draw(st.floats(0.1, 10.0))
    return U, V, x


@st.composite
def subspaces_with_vector(draw, max_dim=8):
    d = draw(st.integers(1, max_dim))
    k = draw(st.integers(0, d))
    seed = draw(st.integers(0, 2**32 - 1))
    r = np.random.default_rng(seed)
    return gaussian_subspace(r, d, k), r.standard_normal(d) * draw(st.floats(0.01, 100.0))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
