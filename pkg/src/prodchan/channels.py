"""Kraus and Choi representations of channels, and the channel constructors.

The Choi matrix of a map ``ch: M_in -> M_out`` is
``J = sum_{mn} |m><n| (x) ch(|m><n|)``, input factor first. Complete
positivity is ``J >= 0``; trace preservation is ``Tr_out J = I_in``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import linalg
from .errors import NotCPError, NotTPError, ShapeError
from .states import DensityMatrix

TP_TOL = 1e-8
CP_TOL = 1e-9
CHOI_RANK_TOL = 1e-10
CHANNEL_EQ_TOL = 1e-8


def _split(value) -> Optional[tuple[int, int]]:
    if value is None:
        return None
    d_a, d_b = (int(x) for x in value)
    return d_a, d_b


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A linear map ``s -> sum_i X_i s X_i^dagger``.

    Only the Kraus shapes are checked on construction; use :func:`validate`
    for trace preservation.
    """

    kraus: tuple
    dim_in: int
    dim_out: int
    split_in: Optional[tuple[int, int]] = None
    split_out: Optional[tuple[int, int]] = None

    def __post_init__(self):
        ops = [linalg.as_matrix(k).copy() for k in self.kraus]
        if not ops:
            raise ShapeError("a channel needs at least one Kraus operator")
        for k in ops:
            if k.shape != (self.dim_out, self.dim_in):
                raise ShapeError(
                    f"Kraus operator of shape {k.shape}, expected ({self.dim_out}, {self.dim_in})"
                )
            k.setflags(write=False)
        object.__setattr__(self, "kraus", tuple(ops))
        for name, dim in (("split_in", self.dim_in), ("split_out", self.dim_out)):
            sp = _split(getattr(self, name))
            if sp is not None and sp[0] * sp[1] != dim:
                raise ShapeError(f"{name} {sp} does not factor dimension {dim}")
            object.__setattr__(self, name, sp)

    @classmethod
    def from_kraus(cls, kraus: Sequence, split_in=None, split_out=None) -> "KrausChannel":
        ops = [linalg.as_matrix(k) for k in kraus]
        if not ops:
            raise ShapeError("a channel needs at least one Kraus operator")
        dim_out, dim_in = ops[0].shape
        return cls(tuple(ops), dim_in, dim_out, split_in, split_out)

    @property
    def stacked(self) -> np.ndarray:
        return np.stack(self.kraus)

    def with_splits(self, split_in=None, split_out=None) -> "KrausChannel":
        return KrausChannel(self.kraus, self.dim_in, self.dim_out, split_in, split_out)

    def __repr__(self):
        return (
            f"KrausChannel({self.dim_in}->{self.dim_out}, {len(self.kraus)} ops, "
            f"split_in={self.split_in}, split_out={self.split_out})"
        )


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    mat: np.ndarray
    dim_in: int
    dim_out: int

    def __post_init__(self):
        m = linalg.as_matrix(self.mat).copy()
        d = self.dim_in * self.dim_out
        if m.shape != (d, d):
            raise ShapeError(f"Choi matrix of shape {m.shape}, expected ({d}, {d})")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)


class ValidationReport(NamedTuple):
    tp_defect: float
    cp_defect: float

    @property
    def accepted(self) -> bool:
        return self.tp_defect <= TP_TOL and self.cp_defect <= CP_TOL


def _apply_matrix(ch: KrausChannel, m: np.ndarray) -> np.ndarray:
    k = ch.stacked
    return np.einsum("kij,jl,kml->im", k, m, k.conj())


def apply_batch(ch: KrausChannel, mats: np.ndarray) -> np.ndarray:
    """Apply ``ch`` to a stack of matrices of shape ``(n, dim_in, dim_in)``."""
    k = ch.stacked
    return np.einsum("kij,njl,kml->nim", k, mats, k.conj(), optimize=True)


def apply(ch: KrausChannel, s: DensityMatrix) -> DensityMatrix:
    if s.dim != ch.dim_in:
        raise ShapeError(f"state of dim {s.dim} fed to channel with dim_in {ch.dim_in}")
    return DensityMatrix(_apply_matrix(ch, s.mat), ch.split_out)


def choi(ch: KrausChannel) -> ChoiMatrix:
    # column of (I (x) K)|Omega> has entry K[j, m] at index m*dim_out + j
    vecs = np.stack([k.T.reshape(-1) for k in ch.kraus], axis=1)
    return ChoiMatrix(vecs @ vecs.conj().T, ch.dim_in, ch.dim_out)


def choi_from_matrix_units(units: np.ndarray) -> np.ndarray:
    """Assemble ``sum_{mn} |m><n| (x) units[m, n]`` from an array ``[m, n, i, j]``."""
    d_in, _, d_out, _ = units.shape
    return np.transpose(units, (0, 2, 1, 3)).reshape(d_in * d_out, d_in * d_out)


def choi_to_kraus(c: ChoiMatrix, rank_tol: float = CHOI_RANK_TOL) -> KrausChannel:
    """Kraus operators from the eigenvectors of a Choi matrix.

    Eigenpairs with eigenvalue ``<= rank_tol`` are dropped.

    Raises:
        NotCPError: if an eigenvalue is below ``-1e-9``.
        NotTPError: if ``Tr_out J`` differs from identity by more than ``1e-8``.
    """
    d_in, d_out = c.dim_in, c.dim_out
    tp = linalg.trace_norm(linalg.partial_trace_b(c.mat, d_in, d_out) - np.eye(d_in))
    if tp > TP_TOL:
        raise NotTPError(f"Choi partial trace deviates from identity by {tp:.3e}")
    vals, vecs = linalg.eigh(c.mat)
    if vals[-1] < -CP_TOL:
        raise NotCPError(f"Choi matrix has eigenvalue {vals[-1]:.3e}")
    ops = [
        np.sqrt(lam) * vecs[:, k].reshape(d_in, d_out).T
        for k, lam in enumerate(vals)
        if lam > rank_tol
    ]
    if not ops:
        raise NotTPError("Choi matrix has no eigenvalue above rank_tol")
    return KrausChannel(tuple(ops), d_in, d_out)


def apply_via_choi(c: ChoiMatrix, m: np.ndarray) -> np.ndarray:
    """``sum_{mn} m[m, n] J_{mn}``, i.e. ``Tr_in[(m^T (x) I) J]``."""
    j = c.mat.reshape(c.dim_in, c.dim_out, c.dim_in, c.dim_out)
    return np.einsum("mn,mink->ik", np.asarray(m), j)


def validate(ch: KrausChannel) -> ValidationReport:
    """``tp_defect = ||sum X^dag X - I||_1``, ``cp_defect = max(0, -lambda_min(J))``."""
    k = ch.stacked
    gram = np.einsum("kji,kjl->il", k.conj(), k)
    tp = linalg.trace_norm(gram - np.eye(ch.dim_in))
    lmin = float(np.linalg.eigvalsh(choi(ch).mat)[0])
    return ValidationReport(tp, max(0.0, -lmin))


def identity_channel(d: int, split=None) -> KrausChannel:
    return KrausChannel((np.eye(d),), d, d, split, split)


def unitary_channel(u, split=None) -> KrausChannel:
    u = linalg.as_matrix(u)
    return KrausChannel((u,), u.shape[1], u.shape[0], split, split)


def tensor_channel(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """``a (x) b`` acting on ``H_a (x) H_b``."""
    ops = tuple(np.kron(x, y) for x in a.kraus for y in b.kraus)
    return KrausChannel(
        ops,
        a.dim_in * b.dim_in,
        a.dim_out * b.dim_out,
        (a.dim_in, b.dim_in),
        (a.dim_out, b.dim_out),
    )


def flip_channel(psi_a: KrausChannel, psi_b: KrausChannel) -> KrausChannel:
    """Swap composed with ``psi_a (x) psi_b``.

    ``psi_a: H_a -> H_b'`` and ``psi_b: H_b -> H_a'``; the output lives on
    ``H_a' (x) H_b'`` and sends ``rho (x) delta`` to ``psi_b(delta) (x) psi_a(rho)``.
    """
    d_a_out, d_b_out = psi_b.dim_out, psi_a.dim_out
    f = linalg.swap_operator(d_a_out, d_b_out)
    ops = tuple(f @ np.kron(x, y) for x in psi_a.kraus for y in psi_b.kraus)
    return KrausChannel(
        ops,
        psi_a.dim_in * psi_b.dim_in,
        d_a_out * d_b_out,
        (psi_a.dim_in, psi_b.dim_in),
        (d_a_out, d_b_out),
    )


def contractive_channel(omega0: DensityMatrix, dim_in: int) -> KrausChannel:
    """The completely contractive channel ``s -> Tr(s) omega0``."""
    vals, vecs = linalg.eigh(omega0.mat)
    eye = np.eye(dim_in)
    ops = tuple(
        np.sqrt(lam) * np.outer(vecs[:, k], eye[m])
        for k, lam in enumerate(vals)
        if lam > 0
        for m in range(dim_in)
    )
    return KrausChannel(ops, dim_in, omega0.dim, None, omega0.split)


def partial_trace_channel(d_a: int, d_b: int, keep: str = "b") -> KrausChannel:
    """``Tr_a`` (``keep='b'``) or ``Tr_b`` (``keep='a'``) as a channel."""
    if keep == "b":
        ops = tuple(np.kron(np.eye(d_a)[m][None, :], np.eye(d_b)) for m in range(d_a))
        out = d_b
    elif keep == "a":
        ops = tuple(np.kron(np.eye(d_a), np.eye(d_b)[m][None, :]) for m in range(d_b))
        out = d_a
    else:
        raise ValueError("keep must be 'a' or 'b'")
    return KrausChannel(ops, d_a * d_b, out, (d_a, d_b), None)


def _state_kraus_factors(s: DensityMatrix) -> list[np.ndarray]:
    vals, vecs = linalg.eigh(s.mat)
    return [np.sqrt(lam) * vecs[:, [k]] for k, lam in enumerate(vals) if lam > 0]


def fixed_a_channel(sigma: DensityMatrix, lambda_b: KrausChannel) -> KrausChannel:
    """``s -> sigma (x) lambda_b(s)``; ``lambda_b`` maps ``H_a (x) H_b -> H_b``."""
    d_a, d_b = sigma.dim, lambda_b.dim_out
    if lambda_b.dim_in != d_a * d_b:
        raise ShapeError(f"lambda_b takes dim {lambda_b.dim_in}, expected {d_a * d_b}")
    ops = tuple(np.kron(v, y) for v in _state_kraus_factors(sigma) for y in lambda_b.kraus)
    return KrausChannel(ops, d_a * d_b, d_a * d_b, (d_a, d_b), (d_a, d_b))


def fixed_b_channel(lambda_a: KrausChannel, tau: DensityMatrix) -> KrausChannel:
    """``s -> lambda_a(s) (x) tau``; ``lambda_a`` maps ``H_a (x) H_b -> H_a``."""
    d_a, d_b = lambda_a.dim_out, tau.dim
    if lambda_a.dim_in != d_a * d_b:
        raise ShapeError(f"lambda_a takes dim {lambda_a.dim_in}, expected {d_a * d_b}")
    ops = tuple(np.kron(x, v) for x in lambda_a.kraus for v in _state_kraus_factors(tau))
    return KrausChannel(ops, d_a * d_b, d_a * d_b, (d_a, d_b), (d_a, d_b))


def compose(f: KrausChannel, g: KrausChannel) -> KrausChannel:
    """``f o g`` (apply ``g`` first)."""
    if g.dim_out != f.dim_in:
        raise ShapeError(f"cannot compose: g outputs dim {g.dim_out}, f takes {f.dim_in}")
    ops = tuple(x @ y for x in f.kraus for y in g.kraus)
    return KrausChannel(ops, g.dim_in, f.dim_out, g.split_in, f.split_out)


def choi_distance(a: ChoiMatrix, b: ChoiMatrix) -> float:
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        raise ShapeError("Choi matrices of different dimensions")
    diff = a.mat - b.mat
    return float(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())


def channel_distance(a: KrausChannel, b: KrausChannel) -> float:
    """Trace-norm distance between Choi matrices."""
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        raise ShapeError(
            f"channels {a.dim_in}->{a.dim_out} and {b.dim_in}->{b.dim_out} are not comparable"
        )
    return choi_distance(choi(a), choi(b))


def channel_to_json(ch: KrausChannel) -> dict:
    return {
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "split_in": list(ch.split_in) if ch.split_in else None,
        "split_out": list(ch.split_out) if ch.split_out else None,
        "kraus": [linalg.matrix_to_json(k) for k in ch.kraus],
    }


def channel_from_json(obj: dict) -> KrausChannel:
    try:
        ops = tuple(linalg.matrix_from_json(k) for k in obj["kraus"])
        return KrausChannel(
            ops,
            int(obj["dim_in"]),
            int(obj["dim_out"]),
            obj.get("split_in"),
            obj.get("split_out"),
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ShapeError(f"malformed channel object: {exc}") from exc
