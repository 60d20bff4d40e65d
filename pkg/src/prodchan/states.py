"""Density matrices, product-state detection and entropies."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .errors import InvalidStateError, NoSplitError, RankError, ShapeError

STATE_TOL = 1e-9
PRODUCT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A quantum state, optionally tagged with a bipartite split ``(d_a, d_b)``.

    Construction checks Hermiticity, unit trace and positivity to ``1e-9``.
    The stored matrix is read-only.
    """

    mat: np.ndarray
    split: Optional[tuple[int, int]] = None

    def __post_init__(self):
        m = linalg.as_matrix(self.mat)
        if m.shape[0] != m.shape[1]:
            raise ShapeError(f"density matrix must be square, got {m.shape}")
        if self.split is not None:
            d_a, d_b = (int(x) for x in self.split)
            if d_a < 1 or d_b < 1 or d_a * d_b != m.shape[0]:
                raise ShapeError(f"split {self.split} does not factor dimension {m.shape[0]}")
            object.__setattr__(self, "split", (d_a, d_b))
        herm = linalg.hermitian_defect(m)
        if herm > STATE_TOL:
            raise InvalidStateError(f"not Hermitian (defect {herm:.3e})")
        tr = np.trace(m)
        if abs(tr - 1.0) > STATE_TOL:
            raise InvalidStateError(f"trace is {tr.real:.12g}, expected 1")
        lmin = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
        if lmin < -STATE_TOL:
            raise InvalidStateError(f"negative eigenvalue {lmin:.3e}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def with_split(self, d_a: int, d_b: int) -> "DensityMatrix":
        return DensityMatrix(self.mat, (d_a, d_b))

    def _require_split(self) -> tuple[int, int]:
        if self.split is None:
            raise NoSplitError("state has no bipartite split")
        return self.split

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, split={self.split})"


def product_state(rho: DensityMatrix, delta: DensityMatrix) -> DensityMatrix:
    """``rho (x) delta`` with the split set."""
    return DensityMatrix(linalg.tensor(rho.mat, delta.mat), (rho.dim, delta.dim))


def pure_state(vec, split=None) -> DensityMatrix:
    v = np.asarray(vec, dtype=np.complex128).reshape(-1)
    v = v / np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()), split)


def bell_state() -> DensityMatrix:
    """``|Phi+> = (|00> + |11>)/sqrt(2)`` on two qubits."""
    return pure_state([1, 0, 0, 1], (2, 2))


def maximally_mixed(d: int, split=None) -> DensityMatrix:
    return DensityMatrix(np.eye(d, dtype=np.complex128) / d, split)


def marginals(s: DensityMatrix) -> tuple[DensityMatrix, DensityMatrix]:
    d_a, d_b = s._require_split()
    return (
        DensityMatrix(linalg.partial_trace_b(s.mat, d_a, d_b)),
        DensityMatrix(linalg.partial_trace_a(s.mat, d_a, d_b)),
    )


def _product_distances(mats: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    """Batched ``||s - s_a (x) s_b||_1`` over a stack of Hermitian matrices."""
    mats = np.asarray(mats, dtype=np.complex128)
    n = mats.shape[0]
    t = mats.reshape(n, d_a, d_b, d_a, d_b)
    rho_a = np.einsum("nijkj->nik", t)
    rho_b = np.einsum("nijil->njl", t)
    prod = np.einsum("nik,njl->nijkl", rho_a, rho_b).reshape(mats.shape)
    diff = mats - prod
    diff = 0.5 * (diff + np.conj(np.swapaxes(diff, 1, 2)))
    return np.abs(np.linalg.eigvalsh(diff)).sum(axis=1)


def product_distance(s: DensityMatrix) -> float:
    """Trace-norm distance between ``s`` and the product of its marginals.

    Vanishes exactly on product states, so a positive value certifies
    correlation.
    """
    d_a, d_b = s._require_split()
    return float(_product_distances(s.mat[None], d_a, d_b)[0])


def is_product(s: DensityMatrix, tol: float = PRODUCT_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return product_distance(s) <= tol


def _entropy_of_spectrum(vals: np.ndarray) -> float:
    vals = np.asarray(vals, dtype=float)
    if vals.min() < -STATE_TOL:
        raise InvalidStateError(f"negative eigenvalue {vals.min():.3e}")
    vals = vals[vals > 0]
    return float(-np.sum(vals * np.log(vals)))


def von_neumann_entropy(s) -> float:
    """``-Tr(s ln s)`` in nats; accepts a ``DensityMatrix`` or a matrix."""
    m = s.mat if isinstance(s, DensityMatrix) else linalg.as_matrix(s)
    return _entropy_of_spectrum(np.linalg.eigvalsh(0.5 * (m + m.conj().T)))


def mutual_information(s: DensityMatrix) -> float:
    """``S(s_a) + S(s_b) - S(s)`` in nats."""
    rho_a, rho_b = marginals(s)
    return von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b) - von_neumann_entropy(s)


def _gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _random_density_matrix(rng: np.random.Generator, dim: int, rank: int) -> np.ndarray:
    g = _gaussian(rng, (dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def _random_pure_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = _gaussian(rng, dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rank: int, seed, split=None) -> DensityMatrix:
    """Random state ``G G^dagger / Tr(G G^dagger)`` with ``G`` a ``dim x rank``
    complex Gaussian matrix. ``seed`` may be an int or a ``numpy`` Generator."""
    if not 1 <= rank <= dim:
        raise RankError(f"rank {rank} outside [1, {dim}]")
    rng = np.random.default_rng(seed)
    return DensityMatrix(_random_density_matrix(rng, dim, rank), split)


def random_pure_product(d_a: int, d_b: int, seed) -> DensityMatrix:
    rng = np.random.default_rng(seed)
    u = _random_pure_vector(rng, d_a)
    v = _random_pure_vector(rng, d_b)
    w = np.kron(u, v)
    return DensityMatrix(np.outer(w, w.conj()), (d_a, d_b))


def probe_matrices(d: int) -> np.ndarray:
    """The ``d**2`` probe projectors of :func:`probe_basis` as a ``(d*d, d, d)`` stack."""
    if d < 1:
        raise ShapeError("dimension must be positive")
    eye = np.eye(d, dtype=np.complex128)
    vecs = [eye[m] for m in range(d)]
    pairs = [(m, n) for m in range(d) for n in range(m + 1, d)]
    vecs += [eye[m] + eye[n] for m, n in pairs]
    vecs += [eye[m] + 1j * eye[n] for m, n in pairs]
    out = np.empty((d * d, d, d), dtype=np.complex128)
    for k, v in enumerate(vecs):
        v = v / np.linalg.norm(v)
        out[k] = np.outer(v, v.conj())
    return out


def probe_basis(d: int) -> list[DensityMatrix]:
    """Informationally complete family of ``d**2`` pure states.

    Order: ``|m><m|`` for ascending ``m``; then ``(|m>+|n>)/sqrt2`` for
    ``m < n``; then ``(|m>+i|n>)/sqrt2`` for ``m < n``. Their real span is
    every Hermitian ``d x d`` matrix.
    """
    return [DensityMatrix(p) for p in probe_matrices(d)]


def matrix_units_from_probes(values: np.ndarray, d: int) -> np.ndarray:
    """Recover ``f(|m><n|)`` for a linear ``f`` from its values on the probes.

    ``values[k]`` is ``f`` evaluated on probe ``k`` (any trailing shape).
    Returns an array indexed ``[m, n, ...]``. Uses
    ``|m><n| = ((2R - D) + i(2I - D)) / 2`` where ``R``/``I`` are the real/imaginary
    pair probes and ``D = |m><m| + |n><n|``.
    """
    values = np.asarray(values)
    out = np.empty((d, d) + values.shape[1:], dtype=np.complex128)
    for m in range(d):
        out[m, m] = values[m]
    pairs = [(m, n) for m in range(d) for n in range(m + 1, d)]
    npairs = len(pairs)
    for k, (m, n) in enumerate(pairs):
        diag = values[m] + values[n]
        re = 2 * values[d + k] - diag
        im = 2 * values[d + npairs + k] - diag
        out[m, n] = 0.5 * (re + 1j * im)
        out[n, m] = 0.5 * (re - 1j * im)
    return out


def state_to_json(s: DensityMatrix) -> dict:
    return {
        "dim": s.dim,
        "split": list(s.split) if s.split is not None else None,
        "mat": linalg.matrix_to_json(s.mat),
    }


def state_from_json(obj: dict) -> DensityMatrix:
    try:
        mat = linalg.matrix_from_json(obj["mat"])
        split = obj.get("split")
        dim = int(obj["dim"])
    except (KeyError, TypeError, AttributeError) as exc:
        raise ShapeError(f"malformed state object: {exc}") from exc
    if mat.shape != (dim, dim):
        raise ShapeError(f"declared dim {dim} does not match matrix {mat.shape}")
    return DensityMatrix(mat, tuple(split) if split is not None else None)
