import numpy as np
import pytest

from lapeig import laplacian
from lapeig.generate import erdos_renyi


@pytest.fixture(scope="session")
def small_random_laplacians():
    """Seeded random connected graphs for property tests."""
    rng = np.random.default_rng(987654321)
    out = []
    for _ in range(50):
        n = int(rng.integers(5, 41))
        p = min(1.0, (np.log(n) + 2.0) / n)
        g = erdos_renyi(n, p, seed=int(rng.integers(0, 2**31)))
        out.append(laplacian(g))
    return out
