"""Command-line front end.

Exit status: 0 for success or a positive answer, 1 for a negative answer
(not product, not preserving, failed acceptance), 2 for unreadable or
invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import channels as chn
from . import corpus
from .classifier import classification_to_json, classify
from .errors import ProdChanError
from .states import (
    PRODUCT_TOL,
    mutual_information,
    product_distance,
    state_from_json,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _round12(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round12(v) for v in obj]
    return obj


def _emit(obj) -> None:
    print(json.dumps(_round12(obj)))


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_channel(path) -> chn.KrausChannel:
    obj = _read_json(path)
    # accept a bare channel, a corpus entry, or a one-entry corpus
    if isinstance(obj, list) and len(obj) == 1:
        obj = obj[0]
    if isinstance(obj, dict) and "channel" in obj:
        obj = obj["channel"]
    if not isinstance(obj, dict):
        raise InputError(f"{path} does not hold a channel object")
    return chn.channel_from_json(obj)


def cmd_validate(args) -> int:
    ch = _load_channel(args.channel)
    report = chn.validate(ch)
    _emit({"tp_defect": report.tp_defect, "cp_defect": report.cp_defect})
    return EXIT_OK if report.accepted else EXIT_INPUT


def cmd_check_product(args) -> int:
    obj = _read_json(args.state)
    if not isinstance(obj, dict):
        raise InputError(f"{args.state} does not hold a state object")
    if obj.get("split") is None:
        raise InputError("state has no split field")
    s = state_from_json(obj)
    dist = product_distance(s)
    out = {"product_distance": dist, "mutual_information": mutual_information(s)}
    out["product"] = dist <= args.tol
    if args.json:
        _emit(out)
    else:
        print(
            f"product_distance   {dist:.12g}\n"
            f"mutual_information {out['mutual_information']:.12g} nats\n"
            f"product            {'yes' if out['product'] else 'no'} (tol {args.tol:g})"
        )
    return EXIT_OK if out["product"] else EXIT_NEGATIVE


def cmd_classify(args) -> int:
    ch = _load_channel(args.channel)
    result = classify(ch, args.tol, args.tol_choi, args.samples, args.seed)
    if args.json:
        _emit(classification_to_json(result))
    else:
        print(f"verdict: {result.verdict}")
        for fit in result.forms:
            print(f"  form {fit.form:>3}  residual {fit.residual:.12g}")
        if result.witness is not None:
            print(f"  witness output product distance {result.witness_violation:.12g}")
        for flag in result.flags:
            print(f"  flag: {flag}")
    return EXIT_OK if result.preserving else EXIT_NEGATIVE


def cmd_generate(args) -> int:
    entry = corpus.generate(args.form, args.da, args.db, args.seed)
    Path(args.out).write_text(json.dumps(corpus.entry_to_json(entry), indent=1))
    print(f"wrote {entry.label} entry ({args.da}x{args.db}, seed {args.seed}) to {args.out}")
    return EXIT_OK


def cmd_acceptance(args) -> int:
    obj = _read_json(args.corpus)
    if isinstance(obj, dict):
        obj = [obj]
    if not isinstance(obj, list):
        raise InputError(f"{args.corpus} does not hold a corpus array")
    entries = [corpus.entry_from_json(o) for o in obj]
    rows = [corpus.check_entry(e) for e in entries]
    report = {"entries": rows, "pass": all(r["pass"] for r in rows)}
    Path(args.report).write_text(json.dumps(report, indent=1))
    failed = [k for k, r in enumerate(rows) if not r["pass"]]
    print(f"{len(rows) - len(failed)}/{len(rows)} entries pass")
    for k in failed:
        print(f"  FAIL entry {k}: label {rows[k]['label']}, verdict {rows[k]['verdict']}")
    return EXIT_OK if report["pass"] else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prodchan", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="report trace-preservation and CP defects")
    v.add_argument("--channel", required=True)
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("check-product", help="test whether a bipartite state is a product")
    c.add_argument("--state", required=True)
    c.add_argument("--tol", type=float, default=PRODUCT_TOL)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check_product)

    k = sub.add_parser("classify", help="decide product preservation and fit canonical forms")
    k.add_argument("--channel", required=True)
    k.add_argument("--tol", type=float, default=PRODUCT_TOL)
    k.add_argument("--tol-choi", type=float, default=chn.CHANNEL_EQ_TOL)
    k.add_argument("--samples", type=int, default=2000)
    k.add_argument("--seed", type=int, required=True)
    k.add_argument("--json", action="store_true")
    k.set_defaults(func=cmd_classify)

    g = sub.add_parser("generate", help="write a labeled corpus entry")
    g.add_argument("--form", required=True, choices=corpus.FORMS)
    g.add_argument("--da", type=int, required=True)
    g.add_argument("--db", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("acceptance", help="classify a corpus and cross-check with the oracle")
    a.add_argument("--corpus", required=True)
    a.add_argument("--report", required=True)
    a.set_defaults(func=cmd_acceptance)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ProdChanError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
