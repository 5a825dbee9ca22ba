"""Anisotropic diffusion test matrices.

Linear (P1) finite elements for -div(K grad u) = f with a constant
anisotropy tensor K on the unit square, homogeneous Dirichlet boundary,
assembled on the structured triangulation obtained by splitting each
grid cell along its south-west/north-east diagonal.  The resulting SPD
matrices of size grid_n^2 reproduce the standard anisotropic stressors:
near-decoupled lines for axis-aligned anisotropy and sign-indefinite
off-diagonals (a non-M-matrix) for rotated anisotropy.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .sparse import as_csr


@dataclass(frozen=True)
class AnisotropySpec:
    """Constant diffusion tensor K = [[a, c], [c, b]] with
    a = eps + cos^2(theta), b = eps + sin^2(theta), c = cos(theta)sin(theta);
    SPD for eps > 0 with eigenvalues eps and 1 + eps."""

    epsilon: float
    theta: float
    grid_n: int

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.grid_n < 2:
            raise ValueError("grid_n must be >= 2")

    def tensor(self):
        c, s = np.cos(self.theta), np.sin(self.theta)
        return np.array([[self.epsilon + c * c, c * s], [c * s, self.epsilon + s * s]])


def _p1_local_stiffness(coords, K):
    """3x3 element stiffness for a triangle with constant tensor K."""
    p0, p1, p2 = coords
    E = np.column_stack([p1 - p0, p2 - p0])
    area = abs(np.linalg.det(E)) / 2.0
    Einv = np.linalg.inv(E)
    g1, g2 = Einv[0], Einv[1]
    grads = np.vstack([-g1 - g2, g1, g2])
    S = area * grads @ K @ grads.T
    return (S + S.T) / 2.0


def assemble_diffusion_stiffness(K, grid_n):
    """P1 stiffness matrix for tensor K on the unit square.

    Interior dofs only (boundary rows and columns eliminated); dof
    (i, j) maps to index (j - 1) * grid_n + (i - 1) with i the x index.
    The constant-coefficient P1 stiffness is scale invariant, so the
    element matrices are computed once per triangle orientation on the
    unit cell and scattered over all cells.
    """
    K = np.asarray(K, dtype=np.float64)
    N = grid_n + 2  # nodes per side including boundary
    S_lower = _p1_local_stiffness(np.array([[0, 0], [1, 0], [1, 1]], dtype=np.float64), K)
    S_upper = _p1_local_stiffness(np.array([[0, 0], [1, 1], [0, 1]], dtype=np.float64), K)

    ci, cj = np.meshgrid(np.arange(N - 1), np.arange(N - 1), indexing="ij")
    ci = ci.ravel()
    cj = cj.ravel()
    node = lambda i, j: j * N + i  # noqa: E731
    tri_lower = np.stack([node(ci, cj), node(ci + 1, cj), node(ci + 1, cj + 1)])
    tri_upper = np.stack([node(ci, cj), node(ci + 1, cj + 1), node(ci, cj + 1)])

    rows, cols, vals = [], [], []
    for tri, S in ((tri_lower, S_lower), (tri_upper, S_upper)):
        for a in range(3):
            for b in range(3):
                rows.append(tri[a])
                cols.append(tri[b])
                vals.append(np.full(tri.shape[1], S[a, b]))
    A_full = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(N * N, N * N),
    ).tocsr()
    A_full = ((A_full + A_full.T) * 0.5).tocsr()

    ii, jj = np.meshgrid(np.arange(1, grid_n + 1), np.arange(1, grid_n + 1), indexing="xy")
    interior = (jj.ravel() * N + ii.ravel()).astype(np.int64)
    return as_csr(A_full[interior][:, interior])


def generate_anisotropic_2d(spec: AnisotropySpec):
    """Stiffness matrix of the anisotropic model problem for ``spec``."""
    return assemble_diffusion_stiffness(spec.tensor(), spec.grid_n)


def ani_fixtures(grids=(64, 128, 256)):
    """The two reference anisotropy cases at the requested grid sizes.

    ANI1 has eps = 0.001 aligned with the x axis (theta = 0); ANI2 uses
    the same strength rotated by pi/8.  Keys are e.g. "ani1_64".
    """
    out = {}
    for g in grids:
        out[f"ani1_{g}"] = generate_anisotropic_2d(AnisotropySpec(0.001, 0.0, g))
        out[f"ani2_{g}"] = generate_anisotropic_2d(AnisotropySpec(0.001, np.pi / 8.0, g))
    return out
