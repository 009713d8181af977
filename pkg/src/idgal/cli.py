"""Command-line front end.

Subcommands mirror the library surface: axiom verification, IDE file
checking, tower degree certification, constants searches with optional
group-scheme recognition, the three worked-example pipelines, and the
aggregate suite runner.  Every subcommand accepts --json for a canonical
(sorted-key) machine-readable report; identical configuration yields
byte-identical output.  The IDGAL_SEED environment variable seeds any
randomized digit streams.
"""

from __future__ import annotations

import argparse
import json
import sys

from .charp import PAdicDigits, PrimeField
from .derivations import MonomialModel, SeriesModel, verify_axioms
from .errors import IdgalError
from .examples import (
    CANONICAL_EX2,
    ExampleConfig,
    default_suite,
    example2_tensor_square,
    run_pipeline,
    run_suite,
    stream_tensor_square,
)
from .groupscheme import BialgebraData, constants_search, recognize
from .ide import ide_from_json, validate
from .towers import verify_tower_degrees


def _parse_digits(text: str) -> list:
    return [int(d) for d in text.split(",") if d.strip() != ""]


def _parse_streams(text: str) -> list:
    return [_parse_digits(part) for part in text.split(";") if part.strip() != ""]


def _parse_window(text: str) -> tuple:
    lo, hi = text.split(",")
    return (int(lo), int(hi))


def _emit(obj: dict, as_json: bool, lines=None) -> int:
    if as_json:
        print(json.dumps(obj, sort_keys=True, default=_json_default))
    else:
        for line in lines or []:
            print(line)
    return 0 if obj.get("ok", False) else 1


def _json_default(value):
    if isinstance(value, BialgebraData):
        return {
            "p": value.p,
            "labels": [list(e) for e in value.labels],
            "unit": list(value.unit),
            "mul": {_label_pair(k): _sparse(v) for k, v in value.mul.items()},
            "comul": {_label(k): {_label_pair(kk): c for kk, c in v.items()}
                      for k, v in value.comul.items()},
            "counit": {_label(k): v for k, v in value.counit.items()},
        }
    if isinstance(value, tuple):
        return list(value)
    return str(value)


def _label(e) -> str:
    return ",".join(str(x) for x in e)


def _label_pair(pair) -> str:
    return _label(pair[0]) + "|" + _label(pair[1])


def _sparse(vec: dict) -> dict:
    return {_label(k): v for k, v in vec.items()}


def _assertion_lines(report: dict) -> list:
    lines = []
    for a in report["assertions"]:
        status = "PASS" if a["status"] == "pass" else "FAIL"
        extras = []
        if "order" in a:
            extras.append(f"order {a['order']}")
        if "window" in a:
            extras.append(f"window [{a['window'][0]}, {a['window'][1]})")
        suffix = " (" + ", ".join(extras) + ")" if extras else ""
        line = f"[{status}] {a['formula_tag']}{suffix}"
        if a["status"] != "pass" and "witness" in a:
            line += f"  witness: {a['witness']}"
        lines.append(line)
    lines.append(f"{report['label']}: {'ok' if report['ok'] else 'FAILED'}")
    return lines


def cmd_verify_axioms(args) -> int:
    model = SeriesModel(PrimeField(args.p), working_order=args.order)
    rep = verify_axioms(model, args.order)
    obj = {
        "ok": rep.ok,
        "order": rep.order,
        "passed": rep.passed,
        "violations": rep.violations,
    }
    return _emit(obj, args.json, [rep.summary()])


def cmd_ide(args) -> int:
    if args.action != "check":
        raise SystemExit(f"unknown ide action {args.action!r}")
    with open(args.file, "r", encoding="utf-8") as fh:
        ide = ide_from_json(json.load(fh))
    order = args.order if args.order is not None else ide.order
    rep = validate(ide, order)
    lines = [
        f"iterativity to order {rep['order']}: "
        f"{'ok' if rep['ok'] else 'FAILED'} "
        f"({rep['checked_pairs']} index pairs)"
    ]
    for v in rep["violations"][:8]:
        lines.append(f"  violation: {v}")
    return _emit(rep, args.json, lines)


def cmd_tower(args) -> int:
    K = PrimeField(args.p)
    model = MonomialModel(K, args.m)
    rep = verify_tower_degrees(model, args.ell, args.ansatz_deg)
    lines = []
    if rep["ok"]:
        lines.append(
            f"level {args.ell}: degree p^m = {rep['degree']} certified "
            f"in box degree {rep['box_degree']}"
        )
        lines.append(
            "basis exponents: "
            + ", ".join(str(tuple(e)) for e in rep["basis_exponents"])
        )
    else:
        lines.append(f"level {args.ell}: FAILED ({rep.get('reason', 'see report')})")
    return _emit(rep, args.json, lines)


def cmd_constants(args) -> int:
    K = PrimeField(args.p)
    streams = [PAdicDigits(K, tuple(s)) for s in _parse_streams(args.streams)]
    lo, hi = args.window
    if args.example == 3:
        depth = min(s.depth for s in streams)
        sq = stream_tensor_square(K, args.ell, [s.digits for s in streams], depth,
                                  working_order=max(args.order, K.p ** (args.ell + 1)))
    elif args.example == 2:
        if len(streams) != 1:
            raise SystemExit("the sparse-exponent family takes exactly one stream")
        sq = example2_tensor_square(K, streams[0], args.ell,
                                    working_order=max(args.order, 16))
    else:
        raise SystemExit("constants searches run on example 2 or 3")
    found = constants_search(sq, lo, hi, args.order)
    obj = {
        "ok": True,
        "example": args.example,
        "p": args.p,
        "ell": args.ell,
        "order": args.order,
        "coeff_window": list(found["coeff_window"]),
        "dim": found["dim"],
        "basis": [str(b) for b in found["basis"]],
        "dropped_unknown_coordinates": found["dropped_unknown_coordinates"],
        "note": found["note"],
    }
    lines = [f"constants dimension {found['dim']} "
             f"(window [{lo}, {hi}), order {args.order})"]
    lines += [f"  {b}" for b in obj["basis"]]
    if found["dropped_unknown_coordinates"]:
        lines.append(
            f"  caution: {found['dropped_unknown_coordinates']} coordinates "
            "beyond visible precision were dropped; the dimension is an "
            "upper bound relative to the remaining evidence"
        )
    if args.recognize:
        if args.example != 3:
            raise SystemExit("recognition runs on the Frobenius-stream family only")
        rec = recognize(sq)
        obj["recognition"] = {
            "ok": rec["ok"],
            "dim": rec["dim"],
            "height": rec.get("height"),
            "matches_frobenius_kernel": rec["matches_frobenius_kernel"],
            "bialgebra_ok": rec["bialgebra"]["ok"],
            "structure_constants": rec["structure_constants"],
        }
        obj["ok"] = rec["ok"]
        lines.append(
            f"recognition: {'ok' if rec['ok'] else 'FAILED'} "
            f"(dim {rec['dim']}, height {rec.get('height')}, "
            f"Frobenius kernel match {rec['matches_frobenius_kernel']})"
        )
    return _emit(obj, args.json, lines)


def cmd_example(args, which: int) -> int:
    kwargs = {"which": which, "p": args.p}
    if which == 1:
        kwargs["streams"] = []
        kwargs["degree"] = args.degree
        kwargs["ell_max"] = args.ell_max
    elif which == 2:
        digits = _parse_digits(args.digits) if args.digits else list(CANONICAL_EX2[args.p])
        kwargs["streams"] = [digits]
        kwargs["window"] = (-16, args.prec)
        kwargs["j_max"] = args.j_max
        kwargs["ell_max"] = args.ell_max
        if args.constants:
            kwargs["constants_window"] = (-6, 7)
    else:
        kwargs["streams"] = _parse_streams(args.streams)
        kwargs["ell_min"] = args.ell
        kwargs["ell_max"] = args.ell
    rep = run_pipeline(ExampleConfig(**kwargs))
    return _emit(rep, args.json, _assertion_lines(rep))


def cmd_suite(args) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            entries = json.load(fh)
        configs = [ExampleConfig(**entry) for entry in entries]
    else:
        configs = default_suite()
    res = run_suite(configs)
    lines = []
    for rep in res["reports"]:
        lines.extend(_assertion_lines(rep))
    lines.append(f"suite: {res['count']} pipelines, "
                 f"{'all ok' if res['ok'] else 'FAILURES'}")
    return _emit(res, args.json, lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="idgal",
        description="Exact iterative-derivation algebra in characteristic p; "
        "set IDGAL_SEED to seed randomized digit streams.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    q = sub.add_parser("verify-axioms", help="check derivation axioms on K((t))")
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--order", type=int, default=16)
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_verify_axioms)

    q = sub.add_parser("ide", help="operate on an IDE JSON file")
    q.add_argument("action", choices=["check"])
    q.add_argument("--file", required=True)
    q.add_argument("--order", type=int, default=None)
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_ide)

    q = sub.add_parser("tower", help="certify tower degrees in a monomial box")
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--m", type=int, default=1)
    q.add_argument("--ell", type=int, default=1)
    q.add_argument("--ansatz-deg", type=int, required=True)
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_tower)

    q = sub.add_parser("constants", help="bounded constants search on a tensor square")
    q.add_argument("--example", type=int, choices=[2, 3], required=True)
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--streams", required=True,
                   help="semicolon-separated digit streams, lowest digit first")
    q.add_argument("--ell", type=int, default=1)
    q.add_argument("--order", type=int, default=8)
    q.add_argument("--window", type=_parse_window, default=(-6, 7),
                   help="t-degree window lo,hi (half-open)")
    q.add_argument("--recognize", action="store_true",
                   help="also run the group-scheme recognition pipeline")
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_constants)

    q = sub.add_parser("example1", help="rational-model pipeline")
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--degree", type=int, default=8)
    q.add_argument("--ell-max", type=int, default=2)
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=lambda a: cmd_example(a, 1))

    q = sub.add_parser("example2", help="sparse-exponent-series pipeline")
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--digits", default=None,
                   help="comma-separated digit stream, lowest digit first")
    q.add_argument("--prec", type=int, default=64)
    q.add_argument("--j-max", type=int, default=3)
    q.add_argument("--ell-max", type=int, default=2)
    q.add_argument("--constants", action="store_true",
                   help="also run the scalar tensor-constants search")
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=lambda a: cmd_example(a, 2))

    q = sub.add_parser("example3", help="Frobenius-stream pipeline")
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--streams", required=True,
                   help="semicolon-separated digit streams, lowest digit first")
    q.add_argument("--ell", type=int, default=1)
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=lambda a: cmd_example(a, 3))

    q = sub.add_parser("suite", help="run a pipeline suite from a config file")
    q.add_argument("--config", default=None,
                   help="JSON list of pipeline configurations; default suite if absent")
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_suite)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IdgalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
