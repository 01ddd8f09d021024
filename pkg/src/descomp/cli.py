"""Command-line frontend.

Subcommands: solve, verify, bench, export.  Exit codes: 0 success /
verified, 1 unrealizable, 2 verification failure, 3 usage or input error,
4 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from .engine import (
    DEFAULT_STATE_BUDGET,
    ControlProblem,
    ResourceBudgetExceeded,
    comp_synthesis,
    heuristic_first_two,
    monolithic_synthesis,
)
from .generators import BenchSpec, generate
from .lts import Lts, Unrealizable, UsageError
from .textio import (
    ParseError,
    ProblemFile,
    format_controllers,
    parse_controllers,
    parse_problem,
    print_problem,
    to_dot,
)
from .verify import check_solution

EXIT_OK = 0
EXIT_UNREALIZABLE = 1
EXIT_VERIFICATION = 2
EXIT_USAGE = 3
EXIT_BUDGET = 4


def _load_problem(args) -> tuple[ControlProblem, str]:
    """Problem from a file or a benchmark family; returns (problem, text)."""
    if args.family:
        problem = generate(
            BenchSpec(family=args.family, n=args.n, k=args.k, seed=args.seed)
        )
        names = tuple(f"P{i}" for i in range(len(problem.parts)))
        snames = tuple(
            tuple(f"s{j}" for j in range(p.n_states)) for p in problem.parts
        )
        text = print_problem(
            ProblemFile(problem=problem, lts_names=names, state_names=snames)
        )
        return problem, text
    if not args.problem:
        raise UsageError("pass a problem file or --family")
    text = Path(args.problem).read_text()
    return parse_problem(text).problem, text


def _problem_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _emit_solution(args, problem: ControlProblem, controllers: list[Lts], stats, text: str):
    serialized = format_controllers(controllers, problem.table)
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "controllers.lts").write_text(serialized)
        (outdir / "problem.lts").write_text(text)
        with open(outdir / "stats.jsonl", "w") as fh:
            for s in stats:
                fh.write(json.dumps(s.as_dict(), sort_keys=True) + "\n")
        manifest = {
            "files": ["controllers.lts", "problem.lts", "stats.jsonl"],
            "problem_sha256": _problem_hash(text),
            "mode": args.mode,
            "controllers": len(controllers),
        }
        (outdir / "bundle.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
        print(f"realizable: {len(controllers)} controller(s) written to {outdir}")
    else:
        sys.stdout.write(serialized)
        for s in stats:
            print(json.dumps(s.as_dict(), sort_keys=True), file=sys.stderr)


def _cmd_solve(args) -> int:
    problem, text = _load_problem(args)
    if args.mode == "mono":
        verdict = monolithic_synthesis(problem, budget=args.budget)
        if not verdict.realizable:
            print("unrealizable")
            return EXIT_UNREALIZABLE
        controllers = [verdict.controller]
        stats = []
    else:
        try:
            bundle = comp_synthesis(
                problem, h=heuristic_first_two(), budget=args.budget
            )
        except Unrealizable:
            print("unrealizable")
            return EXIT_UNREALIZABLE
        controllers = bundle.controllers
        stats = bundle.stats
    _emit_solution(args, problem, controllers, stats, text)
    return EXIT_OK


def _cmd_verify(args) -> int:
    text = Path(args.problem).read_text()
    problem = parse_problem(text).problem
    controllers = parse_controllers(Path(args.controllers).read_text(), problem.table)
    report = check_solution(problem, controllers, budget=args.budget)
    if report.ok:
        print("verified")
        return EXIT_OK
    if not report.legal:
        print("verification failed: controller disables an uncontrollable event")
        if report.legality_trace is not None:
            print(json.dumps({"trace": _names(problem, report.legality_trace)}))
    elif not report.deadlock_free:
        print("verification failed: closed loop deadlocks")
        if report.deadlock_trace is not None:
            print(json.dumps({"trace": _names(problem, report.deadlock_trace)}))
    else:
        print("verification failed: goal violated")
        w = report.witness
        if w is not None:
            print(
                json.dumps(
                    {
                        "prefix": _names(problem, w.prefix),
                        "cycle": _names(problem, w.cycle),
                        "violated_guarantee": w.violated_guarantee,
                    },
                    sort_keys=True,
                )
            )
    return EXIT_VERIFICATION


def _names(problem: ControlProblem, trace) -> list[str]:
    return [problem.table.name_of(e) for e in trace]


def _cmd_bench(args) -> int:
    for n in args.n_values:
        problem = generate(
            BenchSpec(family=args.family, n=n, k=args.k, seed=args.seed)
        )
        try:
            bundle = comp_synthesis(problem, budget=args.budget)
            for s in bundle.stats:
                row = {"family": args.family, "n": n, **s.as_dict()}
                print(json.dumps(row, sort_keys=True))
        except Unrealizable:
            print(json.dumps({"family": args.family, "n": n, "unrealizable": True}))
    return EXIT_OK


def _cmd_export(args) -> int:
    text = Path(args.problem).read_text()
    pf = parse_problem(text)
    if args.format == "dot":
        for lts, name in zip(pf.problem.parts, pf.lts_names):
            sys.stdout.write(to_dot(lts, name))
    else:
        doc = {
            "events": list(pf.problem.table.names),
            "controllable": [
                n for n, c in zip(pf.problem.table.names, pf.problem.table.controllable) if c
            ],
            "lts": [
                {
                    "name": name,
                    "states": lts.n_states,
                    "initial": lts.initial,
                    "transitions": [
                        [s, pf.problem.table.name_of(e), t]
                        for s in range(lts.n_states)
                        for e, t in lts.edges[s]
                    ],
                }
                for lts, name in zip(pf.problem.parts, pf.lts_names)
            ],
            "goal": pf.problem.goal.render(pf.problem.table),
        }
        print(json.dumps(doc, sort_keys=True, indent=2))
    return EXIT_OK


def _add_bench_args(p: argparse.ArgumentParser):
    p.add_argument("--family", choices=["DP", "TL", "RANDOM", "EXAMPLE3"])
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="descomp")
    sub = ap.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="synthesize controllers")
    ps.add_argument("problem", nargs="?", help="problem file")
    _add_bench_args(ps)
    ps.add_argument("--mode", choices=["mono", "comp"], default="comp")
    ps.add_argument("--heuristic", choices=["first-two"], default="first-two")
    ps.add_argument("--budget", type=int, default=DEFAULT_STATE_BUDGET)
    ps.add_argument("--out", help="output directory for the solution bundle")
    ps.set_defaults(fn=_cmd_solve)

    pv = sub.add_parser("verify", help="check a serialized solution")
    pv.add_argument("problem")
    pv.add_argument("controllers")
    pv.add_argument("--budget", type=int, default=DEFAULT_STATE_BUDGET)
    pv.set_defaults(fn=_cmd_verify)

    pb = sub.add_parser("bench", help="run a benchmark family sweep")
    pb.add_argument("family", choices=["DP", "TL", "RANDOM"])
    pb.add_argument("n_values", nargs="+", type=int)
    pb.add_argument("--k", type=int, default=None)
    pb.add_argument("--seed", type=int, default=None)
    pb.add_argument("--budget", type=int, default=DEFAULT_STATE_BUDGET)
    pb.set_defaults(fn=_cmd_bench)

    pe = sub.add_parser("export", help="export a problem file")
    pe.add_argument("problem")
    pe.add_argument("--format", choices=["dot", "json"], default="dot")
    pe.set_defaults(fn=_cmd_export)
    return ap


def run_cli(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, FileNotFoundError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceBudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except Unrealizable:
        print("unrealizable")
        return EXIT_UNREALIZABLE


def main() -> None:
    sys.exit(run_cli())
