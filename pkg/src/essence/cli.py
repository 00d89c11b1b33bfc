"""``essence`` command line tool.

Exit codes: 0 success, 1 user or input error, 2 internal error.
"""

from __future__ import annotations

import argparse
import os
import shutil
import sys
import warnings
from importlib import metadata
from pathlib import Path

from . import ast as A
from .errors import EssenceError
from .parser import parse_model, parse_param
from .printer import PrintConfig, print_model, print_solution, print_statement
from .solver import (SolveConfig, SolveTimeout, check_solution, instantiate,
                     solve, solution_values)
from .typecheck import check_model

UNSUPPORTED = ("modelling", "translate-parameter", "translate-solution", "split",
               "symmetry-detection", "parameter-generator", "model-strengthening",
               "ide", "autoig", "boost", "streamlining", "lsp", "print-info")


class UserError(Exception):
    pass


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.0.0"


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise UserError(f"cannot read {path}: {err.strerror or err}") from None


def _load_model(path: str, typecheck: bool = True) -> A.Model:
    m = parse_model(_read(path))
    if typecheck:
        check_model(m)
    return m


def _type_names(m: A.Model) -> tuple[set[str], set[str]]:
    enums, unnamed = set(), set()
    for s in m.statements:
        match s:
            case A.LettingEnum(n, _) | A.GivenEnum(n):
                enums.add(n)
            case A.LettingUnnamed(n, _):
                unnamed.add(n)
    return enums, unnamed


def _load_lettings(path: str, m: A.Model) -> list[A.Statement]:
    enums, unnamed = _type_names(m)
    return parse_param(_read(path), enums, unnamed)


def _solution_count(text: str) -> int | None:
    if text == "all":
        return None
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a positive integer or 'all'") from None
    if n < 1:
        raise argparse.ArgumentTypeError("expected a positive integer or 'all'")
    return n


def _line_width(text: str) -> int:
    n = int(text)
    if n < 20:
        raise argparse.ArgumentTypeError("line width must be at least 20")
    return n


# ---------------------------------------------------------------- commands

def cmd_solve(args: argparse.Namespace) -> int:
    model = _load_model(args.essence)
    base = Path(args.essence).stem
    out_dir = Path(args.output_directory)
    runs = [(p, f"{base}-{Path(p).stem}") for p in args.params] or [(None, base)]
    cfg = SolveConfig(number_of_solutions=args.number_of_solutions,
                      time_limit=args.limit_time)
    pcfg = PrintConfig(line_width=args.line_width)
    for param, stem in runs:
        params = _load_lettings(param, model) if param else []
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            inst = instantiate(model, params)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        try:
            sols = solve(inst, cfg)
        except SolveTimeout:
            raise UserError(f"time limit of {args.limit_time} seconds reached") from None
        if args.validate_solutions:
            for sol in sols:
                problems = check_solution(inst, dict(sol))
                if problems:
                    raise RuntimeError("invalid solution produced: " + "; ".join(problems))
        names = ([f"{stem}.solution"] if len(sols) == 1 else
                 [f"{stem}-{i:06d}.solution" for i in range(1, len(sols) + 1)])
        out_dir.mkdir(parents=True, exist_ok=True)
        beside = Path(args.essence).parent
        for name, sol in zip(names, sols):
            target = out_dir / name
            target.write_text(print_solution(sol, pcfg), encoding="utf-8")
            if args.copy_solutions and beside.resolve() != out_dir.resolve():
                shutil.copyfile(target, beside / name)
        label = "solution" if len(sols) == 1 else "solutions"
        where = f" for {param}" if param else ""
        print(f"{len(sols)} {label} found{where}")
        for name in names:
            print(f"  {beside / name if args.copy_solutions else out_dir / name}")
    return 0


def cmd_type_check(args: argparse.Namespace) -> int:
    _load_model(args.essence)
    return 0


def cmd_pretty(args: argparse.Namespace) -> int:
    m = _load_model(args.essence, typecheck=False)
    cfg = PrintConfig(line_width=args.line_width, remove_unused=args.remove_unused,
                      normalise_quantified=args.normalise_quantified)
    sys.stdout.write(print_model(m, cfg))
    return 0


def _letting_only(m: A.Model) -> bool:
    return all(isinstance(s, (A.LettingExpr, A.LettingDomain, A.LettingEnum, A.LettingUnnamed))
               for s in m.statements)


def cmd_diff(args: argparse.Namespace) -> int:
    a = _load_model(args.first, typecheck=False)
    b = _load_model(args.second, typecheck=False)
    left, right = list(a.statements), list(b.statements)
    if _letting_only(a) and _letting_only(b):
        # bindings are unordered; compare by name
        left = sorted(left, key=lambda s: s.name)
        right = sorted(right, key=lambda s: s.name)
    report: list[str] = []
    if a.language != b.language:
        report.append(f"language differs: {a.language} vs {b.language}")
    only_a = [s for s in left if s not in right]
    only_b = [s for s in right if s not in left]
    for s in only_a:
        report.append("- " + print_statement(s, args.line_width).replace("\n", "\n  "))
    for s in only_b:
        report.append("+ " + print_statement(s, args.line_width).replace("\n", "\n  "))
    if not report and left != right:
        report.append("the same statements appear in a different order")
    if report:
        print("\n".join(report))
        return 1
    return 0


def cmd_validate_solution(args: argparse.Namespace) -> int:
    model = _load_model(args.essence)
    params = _load_lettings(args.param, model) if args.param else []
    sol = _load_lettings(args.solution, model)
    inst = instantiate(model, params)
    problems = check_solution(inst, solution_values(inst, sol))
    if problems:
        for p in problems:
            print(p)
        return 1
    print("solution is valid")
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="essence", description="Parse, check, print and solve Essence models.")
    ap.add_argument("--version", action="version", version=f"essence {_version()}")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")

    def width(p):
        p.add_argument("--line-width", type=_line_width, default=120, metavar="INT",
                       help="line width for pretty printing (default 120)")

    def limit(p):
        p.add_argument("--limit-time", type=float, default=None, metavar="SECONDS",
                       help="abort after this many seconds of wall-clock time")

    p = sub.add_parser("solve", help="solve a model, writing one file per solution")
    p.add_argument("essence", metavar="ESSENCE_FILE")
    p.add_argument("params", nargs="*", metavar="PARAMETER_FILE")
    p.add_argument("--number-of-solutions", type=_solution_count, default=1, metavar="ITEM",
                   help="a positive integer or 'all' (default 1)")
    p.add_argument("-o", "--output-directory", default="conjure-output", metavar="DIR")
    p.add_argument("--copy-solutions", action=argparse.BooleanOptionalAction, default=True,
                   help="copy solutions next to the model file (default on)")
    p.add_argument("--validate-solutions", action="store_true",
                   help="check every solution against the model before writing it")
    width(p)
    limit(p)
    p.set_defaults(run=cmd_solve)

    p = sub.add_parser("type-check", help="parse and type check a model")
    p.add_argument("essence", metavar="ESSENCE_FILE")
    limit(p)
    p.set_defaults(run=cmd_type_check)

    p = sub.add_parser("pretty", help="pretty print a model to standard output")
    p.add_argument("essence", metavar="ESSENCE_FILE")
    p.add_argument("--remove-unused", action="store_true", help="remove unused declarations")
    p.add_argument("--normalise-quantified", action="store_true",
                   help="rename quantified variables to q1, q2, ...")
    width(p)
    limit(p)
    p.set_defaults(run=cmd_pretty)

    p = sub.add_parser("diff", help="compare two models, parameter or solution files")
    p.add_argument("first", metavar="FILE")
    p.add_argument("second", metavar="FILE")
    width(p)
    limit(p)
    p.set_defaults(run=cmd_diff)

    p = sub.add_parser("validate-solution", help="check a solution against a model")
    p.add_argument("--essence", required=True, metavar="ESSENCE_FILE")
    p.add_argument("--param", default=None, metavar="FILE")
    p.add_argument("--solution", required=True, metavar="FILE")
    limit(p)
    p.set_defaults(run=cmd_validate_solution)

    return ap


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    # recognised but unimplemented commands are kept out of --help
    if argv and argv[0] in UNSUPPORTED:
        print(f"essence: {argv[0]} is not supported in this implementation", file=sys.stderr)
        return 1
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exit_:
        code = exit_.code
        return 0 if code in (0, None) else 1
    if args.command is None:
        ap.print_usage(sys.stderr)
        print("essence: error: a command is required", file=sys.stderr)
        return 1
    try:
        return args.run(args)
    except (EssenceError, UserError) as err:
        print(f"essence: error: {err}", file=sys.stderr)
        return 1
    except RecursionError:
        print("essence: error: input is nested too deeply", file=sys.stderr)
        return 1
    except Exception as err:  # anything else is our bug
        print(f"essence: internal error: {type(err).__name__}: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
