"""Labeled channel generators and standard single-system noise channels."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import channels as chn
from .classifier import (
    NOT_PRESERVING,
    WITNESS_BELOW_TOL,
    classify,
    verify_preservation,
    witness_violation,
)
from .errors import LabelUnconfirmedError, ParamError, ShapeError
from .states import PRODUCT_TOL, DensityMatrix, _gaussian, _random_density_matrix

FORMS = ("i", "ii", "iii", "iv", "unitary_entangling", "random")
CORPUS_DIMS = ((2, 2), (2, 3), (3, 2), (3, 3))
ENTANGLING_RETRIES = 8
ORACLE_SAMPLES = 1000
ORACLE_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class CorpusEntry:
    label: str
    channel: chn.KrausChannel
    seed: int
    notes: str = ""


def _haar_isometry(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    q, r = np.linalg.qr(_gaussian(rng, (rows, cols)))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_channel(dim_in: int, dim_out: int, kraus_count: int, seed) -> chn.KrausChannel:
    """Random channel whose Kraus operators are the blocks of a Haar isometry.

    Needs ``dim_out * kraus_count >= dim_in`` so the isometry exists.
    """
    if kraus_count < 1:
        raise ParamError("kraus_count must be at least 1")
    if dim_out * kraus_count < dim_in:
        raise ParamError(
            f"no isometry {dim_in} -> {dim_out}*{kraus_count}; raise kraus_count"
        )
    rng = np.random.default_rng(seed)
    v = _haar_isometry(rng, dim_out * kraus_count, dim_in)
    ops = tuple(v[k * dim_out:(k + 1) * dim_out] for k in range(kraus_count))
    return chn.KrausChannel(ops, dim_in, dim_out)


def _min_kraus(dim_in: int, dim_out: int) -> int:
    return -(-dim_in // dim_out)


def _component(rng, dim_in: int, dim_out: int) -> chn.KrausChannel:
    k = _min_kraus(dim_in, dim_out) + int(rng.integers(0, 3))
    return random_channel(dim_in, dim_out, k, rng)


def _random_state(rng, d: int) -> DensityMatrix:
    return DensityMatrix(_random_density_matrix(rng, d, int(rng.integers(1, d + 1))))


def _confirmed_not_preserving(build, rng, label_form: str, split, seed: int) -> CorpusEntry:
    for attempt in range(ENTANGLING_RETRIES):
        ch = build(rng)
        report = verify_preservation(ch, n=500, seed=rng)
        if report.max_violation > PRODUCT_TOL:
            notes = f"{label_form}; oracle violation {report.max_violation:.6g} (attempt {attempt})"
            return CorpusEntry(NOT_PRESERVING, ch, seed, notes)
    raise LabelUnconfirmedError(
        f"{label_form} at {split}: no violation found after {ENTANGLING_RETRIES} draws"
    )


def generate(form: str, d_a: int, d_b: int, seed: int) -> CorpusEntry:
    """Build a labeled bipartite channel on ``H_a (x) H_b``.

    ``i``-``iv`` are labeled by construction. ``unitary_entangling`` and
    ``random`` are labeled ``not_preserving`` only once a Monte Carlo search
    finds a product input with correlated output.
    """
    if d_a < 1 or d_b < 1:
        raise ShapeError("dimensions must be positive")
    rng = np.random.default_rng(seed)
    d = d_a * d_b
    split = (d_a, d_b)
    if form == "i":
        ch = chn.tensor_channel(_component(rng, d_a, d_a), _component(rng, d_b, d_b))
    elif form == "ii":
        ch = chn.flip_channel(_component(rng, d_a, d_b), _component(rng, d_b, d_a))
    elif form == "iii":
        ch = chn.fixed_a_channel(_random_state(rng, d_a), _component(rng, d, d_b))
    elif form == "iv":
        ch = chn.fixed_b_channel(_component(rng, d, d_a), _random_state(rng, d_b))
    elif form == "unitary_entangling":
        return _confirmed_not_preserving(
            lambda r: random_channel(d, d, 1, r).with_splits(split, split), rng, form, split, seed
        )
    elif form == "random":
        return _confirmed_not_preserving(
            lambda r: _component(r, d, d).with_splits(split, split), rng, form, split, seed
        )
    else:
        raise ParamError(f"unknown form {form!r}; expected one of {FORMS}")
    return CorpusEntry(form, ch, seed, f"form {form} at {split}")


def cnot_channel() -> chn.KrausChannel:
    u = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128)
    return chn.unitary_channel(u, (2, 2))


def _weyl_operators(d: int) -> list[np.ndarray]:
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [
        np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
        for a in range(d)
        for b in range(d)
    ]


def noise_zoo(name: str, d: int, param: float) -> chn.KrausChannel:
    """Textbook noise channels.

    ``depolarizing`` (any ``d``): ``s -> (1-p) s + p Tr(s) I/d``.
    ``dephasing`` (qubit): off-diagonals scaled by ``1-p``.
    ``amplitude_damping`` (qubit): ``|1> -> |0>`` with probability ``gamma``.
    """
    if not 0.0 <= param <= 1.0:
        raise ParamError(f"parameter {param} outside [0, 1]")
    if d < 1 or (name in ("dephasing", "amplitude_damping") and d != 2):
        raise ParamError(f"{name} is not defined for d={d}")
    if name == "depolarizing":
        weights = np.full(d * d, param / d**2)
        weights[0] += 1.0 - param
        ops = [np.sqrt(w) * u for w, u in zip(weights, _weyl_operators(d)) if w > 0]
    elif name == "dephasing":
        ops = [np.sqrt(1 - param / 2) * np.eye(2), np.sqrt(param / 2) * np.diag([1.0, -1.0])]
        ops = [k for k in ops if np.any(k)]
    elif name == "amplitude_damping":
        ops = [
            np.array([[1.0, 0.0], [0.0, np.sqrt(1 - param)]]),
            np.array([[0.0, np.sqrt(param)], [0.0, 0.0]]),
        ]
        ops = [k for k in ops if np.any(k)]
    else:
        raise ParamError(f"unknown noise channel {name!r}")
    return chn.KrausChannel.from_kraus(ops)


def entry_to_json(e: CorpusEntry) -> dict:
    return {
        "label": e.label,
        "seed": e.seed,
        "notes": e.notes,
        "channel": chn.channel_to_json(e.channel),
    }


def entry_from_json(obj: dict) -> CorpusEntry:
    try:
        return CorpusEntry(
            str(obj["label"]),
            chn.channel_from_json(obj["channel"]),
            int(obj.get("seed", 0)),
            str(obj.get("notes", "")),
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ShapeError(f"malformed corpus entry: {exc}") from exc


def build_corpus(seeds=(0, 1, 2)) -> list[CorpusEntry]:
    """The committed fixture: every form at every corpus dimension, plus CNOT."""
    entries = []
    for d_a, d_b in CORPUS_DIMS:
        for form in ("i", "ii", "iii", "iv"):
            for s in seeds:
                entries.append(generate(form, d_a, d_b, 1000 * d_a + 100 * d_b + s))
    for d_a, d_b in ((2, 2), (2, 3)):
        for form in ("unitary_entangling", "random"):
            for s in seeds:
                entries.append(generate(form, d_a, d_b, 1000 * d_a + 100 * d_b + s))
    entries.append(CorpusEntry(NOT_PRESERVING, cnot_channel(), 0, "CNOT"))
    return entries


def save_corpus(entries, path) -> None:
    Path(path).write_text(json.dumps([entry_to_json(e) for e in entries]))


def load_corpus(path) -> list[CorpusEntry]:
    obj = json.loads(Path(path).read_text())
    if isinstance(obj, dict):
        obj = [obj]
    return [entry_from_json(o) for o in obj]


def default_corpus_path() -> Path:
    return Path(__file__).with_name("data") / "corpus.json"


def check_entry(entry: CorpusEntry, oracle_samples: int = ORACLE_SAMPLES) -> dict:
    """Classify one entry and cross-check the verdict with the Monte Carlo oracle.

    Passes when the label is reproduced and the oracle agrees: preserving
    channels show no violation above ``1e-7``; for non-preserving ones the
    recorded witness violation is reproduced exactly.
    """
    ch = entry.channel
    result = classify(ch, seed=entry.seed)
    oracle = verify_preservation(ch, n=oracle_samples, seed=entry.seed)
    row = {
        "label": entry.label,
        "verdict": result.verdict,
        "forms": result.form_names(),
        "residual": None,
        "witness_violation": result.witness_violation,
        "oracle_max_violation": oracle.max_violation,
    }
    if entry.label == NOT_PRESERVING:
        ok = (
            not result.preserving
            and WITNESS_BELOW_TOL not in result.flags
            and witness_violation(ch, result.witness) == result.witness_violation
        )
    else:
        fit = result.get(entry.label)
        ok = fit is not None and oracle.max_violation <= ORACLE_TOL
        if fit is not None:
            row["residual"] = fit.residual
    row["pass"] = bool(ok)
    return row
