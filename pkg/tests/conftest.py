import numpy as np
import pytest
import scipy.sparse as sp

from mvamg.problems import AnisotropySpec, generate_anisotropic_2d


def random_spd_csr(n, density=0.2, seed=0):
    """Random sparse SPD matrix: symmetric pattern plus diagonal dominance."""
    rng = np.random.default_rng(seed)
    R = sp.random(n, n, density=density, random_state=rng, data_rvs=lambda k: rng.uniform(-1, 1, k))
    S = (R + R.T).tocsr()
    S.setdiag(0.0)
    S.eliminate_zeros()
    row_abs = np.abs(S).sum(axis=1).A1 if hasattr(np.abs(S).sum(axis=1), "A1") else np.asarray(
        np.abs(S).sum(axis=1)
    ).ravel()
    S = S + sp.diags(row_abs + 1.0)
    return S.tocsr()


def laplacian_1d(n):
    return sp.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]).tocsr()


def laplacian_2d(grid):
    T = laplacian_1d(grid)
    eye = sp.eye(grid, format="csr")
    return (sp.kron(eye, T) + sp.kron(T, eye)).tocsr()


@pytest.fixture(scope="session")
def ani1_32():
    return generate_anisotropic_2d(AnisotropySpec(0.001, 0.0, 32))


@pytest.fixture(scope="session")
def ani2_32():
    return generate_anisotropic_2d(AnisotropySpec(0.001, np.pi / 8, 32))
