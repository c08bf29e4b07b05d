import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_params(rng, n, eps=None):
    """Sample n generic (delta, g) pairs, optionally fixing the bias."""
    from asymrabi import ModelParams

    out = []
    for _ in range(n):
        delta = float(rng.uniform(0.1, 2.5))
        g = float(rng.uniform(0.1, 2.5))
        e = float(rng.uniform(-2.0, 2.0)) if eps is None else eps
        out.append(ModelParams(delta=delta, epsilon=e, omega=1.0, g=g))
    return out
