import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def ptrace_loops(rho):
    """Reduced states by explicit index sums; independent of the einsum route."""
    rho_a = np.zeros((2, 2), dtype=complex)
    rho_b = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                rho_a[i, j] += rho[2 * i + k, 2 * j + k]
                rho_b[i, j] += rho[2 * k + i, 2 * k + j]
    return rho_a, rho_b
