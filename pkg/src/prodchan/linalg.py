"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Bipartite
spaces use the row-major (Kronecker) basis ordering: the basis vector
``|i_a> (x) |i_b>`` sits at index ``i_a * d_b + i_b``. Partial traces, the
swap operator and Choi matrices all rely on this single convention.
"""

from __future__ import annotations

import numpy as np

from .errors import NotHermitianError, ShapeError

HERMITIAN_TOL = 1e-9

ComplexMatrix = np.ndarray


def as_matrix(m) -> ComplexMatrix:
    """Coerce ``m`` to a 2-D complex128 array, raising ``ShapeError`` otherwise."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    return arr


def adjoint(m: ComplexMatrix) -> ComplexMatrix:
    return np.conj(as_matrix(m)).T


def tensor(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Kronecker product with index ``(i_a, i_b) -> i_a * b.rows + i_b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def _check_bipartite(m: ComplexMatrix, d_a: int, d_b: int) -> ComplexMatrix:
    m = as_matrix(m)
    d = d_a * d_b
    if d_a < 1 or d_b < 1 or m.shape != (d, d):
        raise ShapeError(f"matrix of shape {m.shape} is not ({d_a}*{d_b})x({d_a}*{d_b})")
    return m


def partial_trace_a(m: ComplexMatrix, d_a: int, d_b: int) -> ComplexMatrix:
    """Trace out the first factor, returning a ``d_b x d_b`` matrix."""
    m = _check_bipartite(m, d_a, d_b)
    return np.einsum("ijik->jk", m.reshape(d_a, d_b, d_a, d_b))


def partial_trace_b(m: ComplexMatrix, d_a: int, d_b: int) -> ComplexMatrix:
    """Trace out the second factor, returning a ``d_a x d_a`` matrix."""
    m = _check_bipartite(m, d_a, d_b)
    return np.einsum("ijkj->ik", m.reshape(d_a, d_b, d_a, d_b))


def trace_norm(m: ComplexMatrix) -> float:
    """Sum of singular values of a square matrix."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"trace norm needs a square matrix, got {m.shape}")
    return float(np.linalg.svd(m, compute_uv=False).sum())


def hermitian_defect(m: ComplexMatrix) -> float:
    """Largest absolute entry of ``m - m^dagger``."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got {m.shape}")
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m: ComplexMatrix, tol: float = HERMITIAN_TOL) -> bool:
    return hermitian_defect(m) <= tol


def _fix_phases(vecs: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    # first component with |v_k| > tol made real and positive, column by column
    vecs = vecs.copy()
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        nz = np.flatnonzero(np.abs(col) > tol)
        if nz.size:
            lead = col[nz[0]]
            vecs[:, k] = col * (abs(lead) / lead)
    return vecs


def eigh(m: ComplexMatrix, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, ComplexMatrix]:
    """Spectral decomposition of a Hermitian matrix.

    The input is symmetrized as ``(M + M^dagger)/2`` before decomposing.
    Eigenvalues come back in non-increasing order; each eigenvector column is
    rotated so its first nonzero component is real and positive.

    Raises:
        NotHermitianError: if ``max|M - M^dagger| > tol``.
    """
    m = as_matrix(m)
    defect = hermitian_defect(m)
    if defect > tol:
        raise NotHermitianError(f"matrix is not Hermitian (max defect {defect:.3e})")
    vals, vecs = np.linalg.eigh(0.5 * (m + m.conj().T))
    return vals[::-1].copy(), _fix_phases(vecs[:, ::-1])


def swap_operator(d_a: int, d_b: int) -> ComplexMatrix:
    """The isometry ``F: H_b (x) H_a -> H_a (x) H_b``.

    ``F (|psi_b> (x) |psi_a>) = |psi_a> (x) |psi_b>``, so the result has shape
    ``(d_a*d_b, d_b*d_a)``.
    """
    if d_a < 1 or d_b < 1:
        raise ShapeError("swap dimensions must be positive")
    f = np.zeros((d_a * d_b, d_b * d_a), dtype=np.complex128)
    for i in range(d_a):
        for j in range(d_b):
            f[i * d_b + j, j * d_a + i] = 1.0
    return f


def matrix_to_json(m: ComplexMatrix) -> dict:
    m = as_matrix(m)
    flat = m.reshape(-1)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj: dict) -> ComplexMatrix:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ShapeError(f"malformed matrix object: {exc}") from exc
    if rows < 1 or cols < 1 or len(data) != rows * cols:
        raise ShapeError(f"matrix data has {len(data)} entries, expected {rows}x{cols}")
    arr = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    return arr.reshape(rows, cols)
