"""Command-line front end.

Exit status: 0 when the formula holds, 1 when it does not, 2 on any error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

from . import engines, reductions, satenc
from .errors import PolError
from .logic import parse_formula, to_text
from .model import dumps_model, load_model, validate

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR = 0, 1, 2
FIXTURES = ("traffic.json", "message.json", "drone.json")


class UsageError(Exception):
    pass


def fixture_path(name: str) -> str:
    return str(resources.files("polcheck").joinpath("fixtures", name))


def resolve_model_path(path: str) -> str:
    """A path that does not exist locally may name a bundled fixture."""
    if os.path.exists(path):
        return path
    base = os.path.basename(path)
    for candidate in (base, base + ".json"):
        if candidate in FIXTURES:
            return fixture_path(candidate)
    return path


def _load(path: str):
    m = load_model(resolve_model_path(path))
    problems = validate(m)
    if problems:
        raise UsageError("invalid model:\n  " + "\n  ".join(problems))
    return m


def _point(m, world):
    if world is None:
        return m.worlds[0]
    m.check_world(world)
    return world


def _word_text(word) -> str:
    return " ".join(word) if word else "eps"


def cmd_check(args) -> int:
    m = _load(args.model)
    f = parse_formula(args.formula)
    s = _point(m, args.world)
    solver = None
    if args.solver:
        if args.solver[0] == "external":
            if len(args.solver) != 2:
                raise UsageError("--solver external needs a solver path")
            solver = args.solver[1]
        elif args.solver != ["internal"]:
            raise UsageError("--solver takes 'internal' or 'external PATH'")
    engine = args.engine
    if engine == "auto":
        engine = engines.auto_engine(f, prefer_sat=args.sat)
    if engine == "sat":
        v = satenc.check_via_sat(m, s, f, solver_path=solver)
    else:
        v = engines.check(m, s, f, engine=engine, bound=args.bound)
    print("TRUE" if v.truth else "FALSE")
    print(f"engine: {v.engine}")
    if args.witness and v.witness is not None:
        print(f"witness: {_word_text(v.witness)}")
    if args.stats:
        for key, value in sorted(v.stats.items()):
            print(f"{key}: {value}")
    return EXIT_TRUE if v.truth else EXIT_FALSE


def cmd_worlds(args) -> int:
    m = _load(args.model)
    f = parse_formula(args.formula)
    for w in engines.worlds_satisfying(m, f, engine=args.engine):
        print(w)
    return EXIT_TRUE


def cmd_encode(args) -> int:
    m = _load(args.model)
    f = parse_formula(args.formula)
    s = _point(m, args.world)
    for c in satenc.encodings(m, s, f):
        path = f"{args.out}.k{c.k}.cnf"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(satenc.emit_dimacs(c))
        print(f"{path}: {c.var_count} variables, {len(c.clauses)} clauses")
    return EXIT_TRUE


def cmd_reduce(args) -> int:
    with open(args.instance, encoding="utf-8") as fh:
        text = fh.read()
    if args.kind == "3sat":
        n, clauses = reductions.read_dimacs(text)
        m, s, f = reductions.from_3sat(clauses, n)
    elif args.kind == "qbf":
        m, s, f = reductions.from_qbf(reductions.read_qdimacs(text))
    else:
        m, s, f = reductions.from_dfa_intersection(reductions.read_dfa_family(json.loads(text)))
    with open(f"{args.out}.json", "w", encoding="utf-8") as fh:
        fh.write(dumps_model(m))
    with open(f"{args.out}.formula", "w", encoding="utf-8") as fh:
        fh.write(to_text(f) + "\n")
    print(f"model: {args.out}.json ({len(m.worlds)} worlds)")
    print(f"world: {s}")
    print(f"formula: {to_text(f)}")
    return EXIT_TRUE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polcheck", description="Model checker for public observation logic.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="decide whether a formula holds at a world")
    c.add_argument("model", help="model JSON file or bundled fixture name")
    c.add_argument("formula")
    c.add_argument("--world", "-w", help="point of evaluation (default: first world)")
    c.add_argument("--engine", default="auto", choices=["auto", "brute", "full", "word", "sfe", "sat"])
    c.add_argument("--sat", action="store_true", help="let auto pick the SAT encoding when it applies")
    c.add_argument("--witness", action="store_true", help="print the word realising an outermost diamond")
    c.add_argument("--stats", action="store_true")
    c.add_argument("--bound", type=int, help="word length bound for the brute engine")
    c.add_argument("--solver", nargs="+", metavar="ARG", help="'internal' (default) or 'external PATH'")
    c.set_defaults(func=cmd_check)

    w = sub.add_parser("worlds", help="list the worlds where a formula holds")
    w.add_argument("model")
    w.add_argument("formula")
    w.add_argument("--engine", default="auto", choices=["auto", "full", "word", "sfe"])
    w.set_defaults(func=cmd_worlds)

    e = sub.add_parser("encode", help="write one DIMACS file per word length")
    e.add_argument("model")
    e.add_argument("formula")
    e.add_argument("--world", "-w")
    e.add_argument("--out", default="out", help="file prefix (default: out)")
    e.set_defaults(func=cmd_encode)

    r = sub.add_parser("reduce", help="turn a 3-SAT, QBF or DFA instance into a model and formula")
    r.add_argument("kind", choices=["3sat", "qbf", "dfa"])
    r.add_argument("instance", help="DIMACS, QDIMACS or DFA-family JSON file")
    r.add_argument("--out", default="reduced", help="file prefix (default: reduced)")
    r.set_defaults(func=cmd_reduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PolError, UsageError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
