"""Matrix Market coordinate I/O.

Supports ``%%MatrixMarket matrix coordinate real {general|symmetric}``
with 1-based indices on disk and 0-based CSR in memory.  Symmetric files
are expanded to full symmetric storage on read; duplicate coordinate
entries are summed.  Values are written with shortest round-trip
formatting so write-then-read reproduces a canonical CSR matrix bit for
bit.
"""

import numpy as np
import scipy.sparse as sp

from .exceptions import MatrixMarketError
from .sparse import as_csr


def read_matrix_market(path):
    """Read a coordinate real Matrix Market file into canonical CSR."""
    with open(path, "r", encoding="ascii") as f:
        header = f.readline()
        fields = header.strip().split()
        if len(fields) != 5 or fields[0] != "%%MatrixMarket":
            raise MatrixMarketError(f"{path}: malformed header line {header.strip()!r}")
        _, obj, fmt, field, symmetry = (t.lower() for t in fields)
        if obj != "matrix" or fmt != "coordinate":
            raise MatrixMarketError(f"{path}: only coordinate matrices are supported, got {obj}/{fmt}")
        if field != "real":
            raise MatrixMarketError(f"{path}: only the real field is supported, got {field!r}")
        if symmetry not in ("general", "symmetric"):
            raise MatrixMarketError(f"{path}: unsupported symmetry {symmetry!r}")

        line = f.readline()
        while line and line.lstrip().startswith("%"):
            line = f.readline()
        size_tokens = line.split()
        if len(size_tokens) != 3:
            raise MatrixMarketError(f"{path}: malformed size line {line.strip()!r}")
        try:
            n_rows, n_cols, n_entries = (int(t) for t in size_tokens)
        except ValueError as exc:
            raise MatrixMarketError(f"{path}: malformed size line {line.strip()!r}") from exc
        if n_rows < 0 or n_cols < 0 or n_entries < 0:
            raise MatrixMarketError(f"{path}: negative dimensions in size line")

        rows = np.empty(n_entries, dtype=np.int64)
        cols = np.empty(n_entries, dtype=np.int64)
        vals = np.empty(n_entries, dtype=np.float64)
        for k in range(n_entries):
            line = f.readline()
            if not line:
                raise MatrixMarketError(f"{path}: expected {n_entries} entries, file ended after {k}")
            tokens = line.split()
            if len(tokens) != 3:
                raise MatrixMarketError(f"{path}: malformed entry line {line.strip()!r}")
            try:
                i = int(tokens[0])
                j = int(tokens[1])
                v = float(tokens[2])
            except ValueError as exc:
                raise MatrixMarketError(f"{path}: non-real entry {line.strip()!r}") from exc
            if not (1 <= i <= n_rows and 1 <= j <= n_cols):
                raise MatrixMarketError(
                    f"{path}: index ({i}, {j}) outside declared {n_rows}x{n_cols} bounds"
                )
            rows[k] = i - 1
            cols[k] = j - 1
            vals[k] = v

    if symmetry == "symmetric":
        if n_rows != n_cols:
            raise MatrixMarketError(f"{path}: symmetric matrix must be square")
        off = rows != cols
        rows, cols, vals = (
            np.concatenate([rows, cols[off]]),
            np.concatenate([cols, rows[off]]),
            np.concatenate([vals, vals[off]]),
        )

    return as_csr(sp.coo_matrix((vals, (rows, cols)), shape=(n_rows, n_cols)))


def write_matrix_market(A, path, symmetric=None):
    """Write a CSR matrix in coordinate real format.

    With ``symmetric=None`` the symmetry header is chosen automatically:
    square matrices whose stored entries satisfy a_ij == a_ji exactly are
    written in symmetric (lower-triangle) storage.
    """
    A = as_csr(A)
    if symmetric is None:
        symmetric = A.shape[0] == A.shape[1] and (A != A.T).nnz == 0
    coo = A.tocoo()
    rows, cols, vals = coo.row, coo.col, coo.data
    if symmetric:
        keep = rows >= cols
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    kind = "symmetric" if symmetric else "general"
    with open(path, "w", encoding="ascii") as f:
        f.write(f"%%MatrixMarket matrix coordinate real {kind}\n")
        f.write(f"{A.shape[0]} {A.shape[1]} {len(vals)}\n")
        for i, j, v in zip(rows, cols, vals):
            f.write(f"{i + 1} {j + 1} {float(v)!r}\n")
