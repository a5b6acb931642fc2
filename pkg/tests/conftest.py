import numpy as np
import pytest

from posmap.maprep import apply
from posmap.matspace import matrix_unit


def choi_oracle(phi):
    """sum_ij e_ij ⊗ phi(e_ij), built by applying the map to every matrix unit."""
    d = phi.d
    return sum(
        np.kron(matrix_unit(d, i, j), apply(phi, matrix_unit(d, i, j))) for i in range(d) for j in range(d)
    )


def random_matrix(d, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
