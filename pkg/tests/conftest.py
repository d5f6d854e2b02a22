import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qtransfer.transfer import ChainContext, TransferFamily, random_context

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def make_family(N, n, seed=0, u=None):
    rng = np.random.default_rng(seed)
    ctx = random_context(N, n, rng, seed=seed)
    if u is None:
        r, phi = rng.uniform(1, 3), rng.uniform(0, 2 * np.pi)
        u = r * np.exp(1j * phi)
    return TransferFamily(ctx, u)


@pytest.fixture
def family_factory():
    return make_family


@pytest.fixture
def fam_2_1():
    return make_family(2, 1, seed=11)


@pytest.fixture
def fam_3_2():
    return make_family(3, 2, seed=12)


def relres(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    scale = max(np.linalg.norm(a), np.linalg.norm(b))
    return np.linalg.norm(a - b) / scale if scale else np.linalg.norm(a - b)


__all__ = ["ChainContext", "make_family", "relres"]
