"""Command-line front-end: parse, compile, verify, and evaluate in batch.

Exit codes: 0 success, 1 property failure, 2 domain error, 3 input error.
All randomness flows from one seed (flag --seed, env NCREAL_SEED, default 0)
and the seed is echoed in every report, so runs are reproducible
byte-for-byte.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor

from . import selftest as selftest_mod
from .calculus import Word, delta_block, delta_closed_form, lla_check, \
    tt_coefficient, NotNilpotent
from .expr import NcDomainError, ParseError, eval_expr, parse
from .io import load_matrix_tuple, matrix_to_text
from .linalg import Mat
from .realization import (FMRealization, ScalarStructureViolation,
                          SingularPencil, eval_at_level_n, eval_realization,
                          in_domain, mat_to_json, realization_from_json,
                          realization_to_json)
from .synthesis import CentreSingular, find_similarity, minimize, realize_expr

OK, FAILURE, DOMAIN_ERROR, INPUT_ERROR = 0, 1, 2, 3


def _seed_from(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("NCREAL_SEED")
    return int(env) if env else 0


def _emit_matrix(m: Mat, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(mat_to_json(m)))
    else:
        print(matrix_to_text(m))


def _load_realization(path: str) -> FMRealization:
    with open(path) as fh:
        return realization_from_json(fh.read())


def _function_from_args(args):
    """Return (callable point -> Mat, realization or None)."""
    if getattr(args, "realization", None):
        r = _load_realization(args.realization)
        return (lambda x: eval_realization(r, x)), r
    if getattr(args, "expr", None):
        e = parse(args.expr)
        return (lambda x: eval_expr(e, x)), None
    raise SystemExit(INPUT_ERROR)


def cmd_eval(args) -> int:
    point = load_matrix_tuple(args.point)
    try:
        if args.realization:
            r = _load_realization(args.realization)
            n = point[0].rows
            value = (eval_realization(r, point) if n % r.s == 0
                     else eval_at_level_n(r, point))
        else:
            value = eval_expr(parse(args.expr), point)
    except (NcDomainError, SingularPencil) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return DOMAIN_ERROR
    except ScalarStructureViolation as exc:
        print(f"property failure: {exc}", file=sys.stderr)
        return FAILURE
    _emit_matrix(value, args.format)
    return OK


def cmd_realize(args) -> int:
    centre = load_matrix_tuple(args.centre)
    try:
        e = parse(args.expr)
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    try:
        r = realize_expr(e, centre, minimize_result=not args.no_minimize)
    except CentreSingular as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return DOMAIN_ERROR
    text = realization_to_json(r, indent=2 if args.format == "text" else None)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote realization (L={r.L}) to {args.output}")
    else:
        print(text)
    return OK


def cmd_minimize(args) -> int:
    r = _load_realization(args.realization)
    m = minimize(r)
    text = realization_to_json(m, indent=2 if args.format == "text" else None)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote minimized realization (L={r.L} -> L={m.L}) to {args.output}")
    else:
        print(text)
    return OK


def cmd_similar(args) -> int:
    r1 = _load_realization(args.realizations[0])
    r2 = _load_realization(args.realizations[1])
    t = find_similarity(r1, r2)
    if t is None:
        print("not uniquely similar")
        return FAILURE
    _emit_matrix(t, args.format)
    return OK


def cmd_check_lla(args) -> int:
    r = _load_realization(args.realization)
    report = lla_check(r)
    payload = {
        "pass": report.passed,
        "violations": [
            {"equation": v.equation, "S": list(v.S),
             "Z1": list(v.Z1) if v.Z1 else None,
             "Z2": list(v.Z2) if v.Z2 else None,
             "i1": v.i1, "i2": v.i2,
             "residual": mat_to_json(v.residual)}
            for v in report.violations],
    }
    print(json.dumps(payload))
    return OK if report.passed else FAILURE


def cmd_domain(args) -> int:
    point = load_matrix_tuple(args.point)
    if args.realization:
        r = _load_realization(args.realization)
        inside = in_domain(r, point)
    else:
        try:
            eval_expr(parse(args.expr), point)
            inside = True
        except NcDomainError:
            inside = False
    print(f"in-domain: {'true' if inside else 'false'}")
    return OK


def cmd_taylor(args) -> int:
    r = _load_realization(args.realization)
    word = Word.parse(args.word)
    if args.dirs:
        dirs = list(load_matrix_tuple(args.dirs))
    else:
        dirs = [Mat.identity(r.s) for _ in range(len(word))]
    if len(dirs) != len(word):
        print(f"input error: word length {len(word)} needs {len(word)} "
              f"direction matrices", file=sys.stderr)
        return INPUT_ERROR
    _emit_matrix(tt_coefficient(r, word, dirs), args.format)
    return OK


def cmd_derive(args) -> int:
    word = Word.parse(args.word)
    point = load_matrix_tuple(args.point)
    k = len(word)
    try:
        if args.realization:
            r = _load_realization(args.realization)
            n = point[0].rows
            dirs = (list(load_matrix_tuple(args.dirs)) if args.dirs
                    else [Mat.identity(n) for _ in range(k)])
            value = delta_closed_form(r, word, point, dirs)
        else:
            e = parse(args.expr)
            n = point[0].rows
            dirs = (list(load_matrix_tuple(args.dirs)) if args.dirs
                    else [Mat.identity(n) for _ in range(k)])
            value = delta_block(lambda x: eval_expr(e, x), word,
                                [point] * (k + 1), dirs)
    except (NcDomainError, SingularPencil) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return DOMAIN_ERROR
    _emit_matrix(value, args.format)
    return OK


def cmd_selftest(args) -> int:
    seed = _seed_from(args)
    print(f"selftest seed={seed} trials={args.trials} jobs={args.jobs}")
    suites = selftest_mod.all_suites()
    results = []
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futs = [pool.submit(selftest_mod.run_suite, name, seed, args.trials,
                                args.bound)
                    for name in suites]
            results = [f.result() for f in futs]
    else:
        results = [selftest_mod.run_suite(name, seed, args.trials, args.bound)
                   for name in suites]
    worst = OK
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        if not ok:
            worst = FAILURE
    return worst


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="ncreal", description=__doc__)
    top.add_argument("--seed", type=int, default=None,
                     help="RNG seed (fallback: env NCREAL_SEED, then 0)")
    top.add_argument("--format", choices=["text", "json"], default="text")
    top.add_argument("--trials", type=int, default=25)
    top.add_argument("--bound", type=int, default=4,
                     help="entry magnitude for random sampling")
    top.add_argument("--levels", type=str, default="1,2",
                     help="comma-separated matrix levels for sampling commands")
    top.add_argument("--jobs", type=int, default=1,
                     help="parallel workers for independent trials")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate an expression or realization at a point")
    p.add_argument("--expr")
    p.add_argument("--realization")
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("realize", help="compile an expression to a realization")
    p.add_argument("--expr", required=True)
    p.add_argument("--centre", required=True)
    p.add_argument("--no-minimize", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("minimize", help="minimize a realization JSON file")
    p.add_argument("realization")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("similar", help="find the similarity between two realizations")
    p.add_argument("realizations", nargs=2)
    p.set_defaults(func=cmd_similar)

    p = sub.add_parser("check-lla", help="verify the linearized compatibility equations")
    p.add_argument("realization")
    p.set_defaults(func=cmd_check_lla)

    p = sub.add_parser("domain", help="test domain membership at a point")
    p.add_argument("--expr")
    p.add_argument("--realization")
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_domain)

    p = sub.add_parser("taylor", help="evaluate a series coefficient")
    p.add_argument("realization")
    p.add_argument("--word", required=True)
    p.add_argument("--dirs", help="JSON file with one matrix per letter")
    p.set_defaults(func=cmd_taylor)

    p = sub.add_parser("derive", help="evaluate a nc derivative")
    p.add_argument("--expr")
    p.add_argument("--realization")
    p.add_argument("--word", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--dirs")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("selftest", help="run the seeded invariant suites")
    p.set_defaults(func=cmd_selftest)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "expr", None) and getattr(args, "realization", None):
        print("input error: give --expr or --realization, not both", file=sys.stderr)
        return INPUT_ERROR
    if args.command in ("eval", "domain", "derive") \
            and not (getattr(args, "expr", None) or getattr(args, "realization", None)):
        print("input error: need --expr or --realization", file=sys.stderr)
        return INPUT_ERROR
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except (FileNotFoundError, ValueError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except NotNilpotent as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return DOMAIN_ERROR


if __name__ == "__main__":
    sys.exit(main())
