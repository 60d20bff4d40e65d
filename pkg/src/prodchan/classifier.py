"""Decide whether a bipartite channel maps product states to product states.

A channel with this property is exactly one of

* ``i``   local: ``phi_a (x) phi_b``
* ``ii``  flipped: ``swap o (psi_a (x) psi_b)`` with ``psi_a: A -> B``, ``psi_b: B -> A``
* ``iii`` ``s -> sigma (x) Lambda_b(s)`` for a fixed state ``sigma`` on A
* ``iv``  ``s -> Lambda_a(s) (x) tau`` for a fixed state ``tau`` on B

:func:`classify` pushes an informationally complete family of product probes
through the channel, rebuilds a candidate of each kind from the probe
outputs, and keeps the candidates whose Choi matrix matches the channel's.
Because the list above is exhaustive, no match means the channel is not
product preserving; a product input with non-product output is then
searched for and returned as a witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import channels as chn
from .errors import NoSplitError, NotCPError, NotCPTPError, NotTPError, ShapeError
from .states import (
    PRODUCT_TOL,
    DensityMatrix,
    _product_distances,
    _random_density_matrix,
    _random_pure_vector,
    matrix_units_from_probes,
    probe_matrices,
    state_to_json,
)

PRESERVING = "preserving"
NOT_PRESERVING = "not_preserving"
FORM_ORDER = ("iii", "iv", "i", "ii")
WITNESS_BELOW_TOL = "witness-below-tol"
_TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FormFit:
    """One canonical form that reproduces the channel.

    ``components`` maps names to channels or states:
    ``phi_a, phi_b`` (i), ``psi_a, psi_b`` (ii), ``sigma, lambda_b`` (iii),
    ``lambda_a, tau`` (iv). ``channel`` is the rebuilt channel and
    ``residual`` its Choi distance to the input.
    """

    form: str
    components: dict
    residual: float
    channel: chn.KrausChannel


@dataclass(frozen=True, eq=False)
class Classification:
    verdict: str
    forms: tuple = ()
    witness: Optional[DensityMatrix] = None
    witness_violation: Optional[float] = None
    flags: tuple = field(default_factory=tuple)

    @property
    def preserving(self) -> bool:
        return self.verdict == PRESERVING

    def form_names(self) -> list[str]:
        return [f.form for f in self.forms]

    def get(self, form: str) -> Optional[FormFit]:
        for f in self.forms:
            if f.form == form:
                return f
        return None


class PreservationReport(NamedTuple):
    max_violation: float
    argmax: DensityMatrix
    violations: int
    n: int


def bipartite_dims(ch: chn.KrausChannel) -> tuple[int, int]:
    """The ``(d_a, d_b)`` split of a channel on ``H_a (x) H_b``."""
    if ch.split_in is None:
        raise NoSplitError("channel has no input split")
    split_out = ch.split_out if ch.split_out is not None else ch.split_in
    if split_out != ch.split_in:
        raise ShapeError(f"input split {ch.split_in} differs from output split {split_out}")
    return ch.split_in


def _probe_product_stack(d_a: int, d_b: int) -> np.ndarray:
    pa, pb = probe_matrices(d_a), probe_matrices(d_b)
    return np.einsum("iab,jcd->ijacbd", pa, pb).reshape(len(pa), len(pb), d_a * d_b, d_a * d_b)


def _probe_table(ch: chn.KrausChannel) -> np.ndarray:
    d_a, d_b = bipartite_dims(ch)
    inputs = _probe_product_stack(d_a, d_b)
    na, nb = inputs.shape[:2]
    d = d_a * d_b
    return chn.apply_batch(ch, inputs.reshape(na * nb, d, d)).reshape(na, nb, d, d)


def probe_outputs(ch: chn.KrausChannel) -> list[list[DensityMatrix]]:
    """``table[i][j] = ch(rho_i (x) delta_j)`` over the probe families of A and B."""
    split = bipartite_dims(ch)
    return [[DensityMatrix(m, split) for m in row] for row in _probe_table(ch)]


def _tr_a(t: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    return np.einsum("...ijik->...jk", t.reshape(t.shape[:-2] + (d_a, d_b, d_a, d_b)))


def _tr_b(t: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    return np.einsum("...ijkj->...ik", t.reshape(t.shape[:-2] + (d_a, d_b, d_a, d_b)))


def _channel_from_probe_values(values: np.ndarray, d_in: int) -> chn.KrausChannel:
    units = matrix_units_from_probes(values, d_in)
    c = chn.ChoiMatrix(chn.choi_from_matrix_units(units), d_in, units.shape[2])
    return chn.choi_to_kraus(c)


def _valid(*channels: chn.KrausChannel) -> bool:
    return all(chn.validate(c).accepted for c in channels)


def _candidates(ch: chn.KrausChannel, table: np.ndarray):
    """Yield ``(form, components, rebuilt_channel)`` for every form that can be built."""
    d_a, d_b = bipartite_dims(ch)
    # diagonal probes come first, so these slices average to the maximally mixed reference
    on_a_with_mixed_b = table[:, :d_b].mean(axis=1)  # ch(rho_i (x) I/d_b)
    on_b_with_mixed_a = table[:d_a, :].mean(axis=0)  # ch(I/d_a (x) delta_j)
    both_mixed = table[:d_a, :d_b].mean(axis=(0, 1))

    sigma = DensityMatrix(_tr_b(both_mixed, d_a, d_b))
    lambda_b = chn.compose(chn.partial_trace_channel(d_a, d_b, keep="b"), ch)
    yield "iii", {"sigma": sigma, "lambda_b": lambda_b}, chn.fixed_a_channel(sigma, lambda_b)

    tau = DensityMatrix(_tr_a(both_mixed, d_a, d_b))
    lambda_a = chn.compose(chn.partial_trace_channel(d_a, d_b, keep="a"), ch)
    yield "iv", {"lambda_a": lambda_a, "tau": tau}, chn.fixed_b_channel(lambda_a, tau)

    for form, a_part, b_part in (
        ("i", _tr_b(on_a_with_mixed_b, d_a, d_b), _tr_a(on_b_with_mixed_a, d_a, d_b)),
        ("ii", _tr_a(on_a_with_mixed_b, d_a, d_b), _tr_b(on_b_with_mixed_a, d_a, d_b)),
    ):
        try:
            f_a = _channel_from_probe_values(a_part, d_a)
            f_b = _channel_from_probe_values(b_part, d_b)
        except (NotCPError, NotTPError):
            continue  # a factor that is not a channel rules the form out
        if not _valid(f_a, f_b):
            continue
        if form == "i":
            yield form, {"phi_a": f_a, "phi_b": f_b}, chn.tensor_channel(f_a, f_b)
        else:
            yield form, {"psi_a": f_a, "psi_b": f_b}, chn.flip_channel(f_a, f_b)


def _first_argmax(values: np.ndarray) -> int:
    return int(np.flatnonzero(values >= values.max() - _TIE_TOL)[0])


def _pair_mixtures(probes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Weights and states for every ``(p_i + p_k)/2`` with ``i <= k``."""
    n = len(probes)
    weights = []
    for i in range(n):
        for k in range(i, n):
            w = np.zeros(n)
            w[i] += 0.5
            w[k] += 0.5
            weights.append(w)
    weights = np.array(weights)
    return weights, np.einsum("pi,iab->pab", weights, probes)


def _random_product_inputs(rng: np.random.Generator, d_a: int, d_b: int, n: int) -> np.ndarray:
    """``n`` product states cycling through pure(x)pure, mixed(x)mixed, mixed(x)pure."""
    out = np.empty((n, d_a * d_b, d_a * d_b), dtype=np.complex128)
    for k in range(n):
        kind = k % 3
        if kind == 0:
            u, v = _random_pure_vector(rng, d_a), _random_pure_vector(rng, d_b)
            rho, delta = np.outer(u, u.conj()), np.outer(v, v.conj())
        elif kind == 1:
            rho = _random_density_matrix(rng, d_a, int(rng.integers(1, d_a + 1)))
            delta = _random_density_matrix(rng, d_b, int(rng.integers(1, d_b + 1)))
        else:
            rho = _random_density_matrix(rng, d_a, d_a)
            v = _random_pure_vector(rng, d_b)
            delta = np.outer(v, v.conj())
        out[k] = np.kron(rho, delta)
    return out


def _witness_search(ch, table, samples: int, seed) -> tuple[np.ndarray, float]:
    d_a, d_b = bipartite_dims(ch)
    pa, pb = probe_matrices(d_a), probe_matrices(d_b)
    wa, mix_a = _pair_mixtures(pa)
    wb, mix_b = _pair_mixtures(pb)
    d = d_a * d_b
    # linearity: the image of a mixture of probes is the same mixture of probe images
    mix_out = np.einsum("pi,qj,ijab->pqab", wa, wb, table).reshape(-1, d, d)
    mix_in = np.einsum("pab,qcd->pqacbd", mix_a, mix_b).reshape(-1, d, d)

    rng = np.random.default_rng(seed)
    rand_in = _random_product_inputs(rng, d_a, d_b, samples)
    rand_out = chn.apply_batch(ch, rand_in) if samples else rand_in

    inputs = np.concatenate([mix_in, rand_in])
    dist = _product_distances(np.concatenate([mix_out, rand_out]), d_a, d_b)
    k = _first_argmax(dist)
    return inputs[k], float(dist[k])


def classify(
    ch: chn.KrausChannel,
    tol: float = PRODUCT_TOL,
    tol_choi: float = chn.CHANNEL_EQ_TOL,
    witness_samples: int = 2000,
    seed=0,
) -> Classification:
    """Classify ``ch`` as product preserving (with every fitting form) or not.

    Raises:
        NotCPTPError: if ``ch`` fails :func:`prodchan.channels.validate`.
        NoSplitError: if the channel carries no bipartite split.
    """
    d_a, d_b = bipartite_dims(ch)
    report = chn.validate(ch)
    if not report.accepted:
        raise NotCPTPError(
            f"channel is not CPTP (tp_defect={report.tp_defect:.3e}, "
            f"cp_defect={report.cp_defect:.3e})"
        )
    split = (d_a, d_b)
    table = _probe_table(ch)
    d = d_a * d_b

    dist = _product_distances(table.reshape(-1, d, d), d_a, d_b)
    if dist.max() > tol:
        k = _first_argmax(dist)
        witness = DensityMatrix(_probe_product_stack(d_a, d_b).reshape(-1, d, d)[k], split)
        return Classification(
            NOT_PRESERVING, witness=witness, witness_violation=witness_violation(ch, witness)
        )

    fits = []
    for form, components, rebuilt in _candidates(ch, table):
        residual = chn.channel_distance(rebuilt, ch)
        if residual <= tol_choi:
            fits.append(FormFit(form, components, residual, rebuilt))
    if fits:
        fits.sort(key=lambda f: FORM_ORDER.index(f.form))
        return Classification(PRESERVING, forms=tuple(fits))

    found, _ = _witness_search(ch, table, witness_samples, seed)
    witness = DensityMatrix(found, split)
    violation = witness_violation(ch, witness)
    flags = () if violation > tol else (WITNESS_BELOW_TOL,)
    return Classification(NOT_PRESERVING, witness=witness, witness_violation=violation, flags=flags)


def witness_violation(ch: chn.KrausChannel, witness: DensityMatrix) -> float:
    """Product distance of ``ch(witness)``, computed the same way :func:`classify` does."""
    d_a, d_b = bipartite_dims(ch)
    return float(_product_distances(chn.apply_batch(ch, witness.mat[None]), d_a, d_b)[0])


def verify_preservation(
    ch: chn.KrausChannel, n: int = 1000, tol: float = PRODUCT_TOL, seed=0
) -> PreservationReport:
    """Monte Carlo check over ``n`` random product inputs.

    Independent of :func:`classify`: it only applies the channel and measures
    output product distances.
    """
    d_a, d_b = bipartite_dims(ch)
    rng = np.random.default_rng(seed)
    inputs = _random_product_inputs(rng, d_a, d_b, n)
    dist = _product_distances(chn.apply_batch(ch, inputs), d_a, d_b)
    k = _first_argmax(dist)
    return PreservationReport(
        float(dist[k]), DensityMatrix(inputs[k], (d_a, d_b)), int((dist > tol).sum()), n
    )


def _random_joint_inputs(rng: np.random.Generator, d_a: int, d_b: int, n: int) -> np.ndarray:
    d = d_a * d_b
    out = np.empty((n, d, d), dtype=np.complex128)
    for k in range(n):
        if k == 0:
            # maximally entangled on the smaller factor
            r = min(d_a, d_b)
            v = np.zeros(d, dtype=np.complex128)
            for m in range(r):
                v[m * d_b + m] = 1.0
            v /= np.linalg.norm(v)
            out[k] = np.outer(v, v.conj())
        elif k % 2:
            v = _random_pure_vector(rng, d)
            out[k] = np.outer(v, v.conj())
        else:
            out[k] = _random_density_matrix(rng, d, int(rng.integers(1, d + 1)))
    return out


def check_proposition1(ch: chn.KrausChannel, n: int = 500, seed=0) -> PreservationReport:
    """Push ``n`` arbitrary (mostly entangled) states through ``ch``.

    Channels of form ``iii``/``iv`` send every state to a product state;
    any other channel maps some entangled input to a correlated output.
    """
    d_a, d_b = bipartite_dims(ch)
    rng = np.random.default_rng(seed)
    inputs = _random_joint_inputs(rng, d_a, d_b, n)
    dist = _product_distances(chn.apply_batch(ch, inputs), d_a, d_b)
    k = _first_argmax(dist)
    return PreservationReport(
        float(dist[k]), DensityMatrix(inputs[k], (d_a, d_b)), int((dist > PRODUCT_TOL).sum()), n
    )


def _component_to_json(value):
    if isinstance(value, DensityMatrix):
        return state_to_json(value)
    return chn.channel_to_json(value)


def classification_to_json(c: Classification) -> dict:
    return {
        "verdict": c.verdict,
        "forms": [
            {
                "form": f.form,
                "residual": f.residual,
                "components": {k: _component_to_json(v) for k, v in f.components.items()},
            }
            for f in c.forms
        ],
        "witness": state_to_json(c.witness) if c.witness is not None else None,
        "witness_violation": c.witness_violation,
        "flags": list(c.flags),
    }
