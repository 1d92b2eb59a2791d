"""Command line interface.

Exit codes: 0 success, 2 usage, 3 input or parse error, 4 capacity error
or a timeout treated as failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import PRESETS, BenchConfig, brute_force_optimum, full_bb, rows_to_csv, run_benchmark
from .errors import CapacityError, InputError, SpniError, UnreachableError
from .graph import UNREACHABLE, calc_length
from .instance import budget_from_fraction, generate_grid, read_instance, write_instance
from .qubo import build_full_qubo, build_sub_qubo, dumps_qubo
from .refine import RefineConfig, refine, solve_spni
from .subsolve import BBExact, QuboAnneal, QuboExhaustive, make_spec

EXIT_USAGE, EXIT_INPUT, EXIT_CAPACITY = 2, 3, 4


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def solution_json(inst, arcs) -> str:
    arcs = sorted(arcs)
    length = calc_length(inst, arcs)
    doc = {
        "interdicted": arcs,
        "length": None if length is UNREACHABLE else length,
        "budget_used": len(arcs),
    }
    return json.dumps(doc) + "\n"


def _subsolver(args):
    if args.subsolver == "bb":
        return BBExact()
    if args.subsolver == "qubo-exhaustive":
        return QuboExhaustive(max_bits=args.max_bits)
    return QuboAnneal(sweeps=args.sweeps, restarts=args.restarts)


def _add_subsolver_flags(p):
    p.add_argument("--subsolver", choices=("bb", "qubo-exhaustive", "qubo-anneal"), default="bb")
    p.add_argument("--max-bits", type=int, default=24, help="variable limit for qubo-exhaustive")
    p.add_argument("--sweeps", type=int, default=1000, help="annealing sweeps per restart")
    p.add_argument("--restarts", type=int, default=4, help="annealing restarts")


def cmd_generate(args, parser) -> int:
    if args.rows < 2 or args.cols < 2:
        parser.error("--rows and --cols must be >= 2")
    inst = generate_grid(args.rows, args.cols, args.seed)
    m = inst.network.arc_count
    if args.budget_frac is not None:
        budget = budget_from_fraction(m, args.budget_frac)
    else:
        budget = args.budget
    if not 0 <= budget <= m:
        parser.error(f"budget must be in [0, {m}]")
    inst = inst.with_budget(budget)
    write_instance(inst, args.out)
    print(f"nodes {inst.network.node_count} arcs {m} budget {budget}")
    return 0


def cmd_solve(args, parser) -> int:
    inst = read_instance(args.instance)
    cfg = RefineConfig(args.n, args.lam, _subsolver(args), args.seed, args.workers)
    if args.start:
        start = json.loads(Path(args.start).read_text())["interdicted"]
        sol = refine(inst, cfg, start)
        trace = None
    else:
        sol, trace = solve_spni(inst, cfg)
    if args.trace_out and trace is not None:
        trace.write_csv(args.trace_out)
    _emit(solution_json(inst, sol), args.out)
    return 0


def cmd_baseline(args, parser) -> int:
    inst = read_instance(args.instance)
    if args.mode == "bruteforce":
        sol, f = brute_force_optimum(inst, args.cap)
        optimal = True
    else:
        sol, f, optimal = full_bb(inst, args.timeout)
    print(f"f={f} optimal={'true' if optimal else 'false'} interdicted={sorted(sol)}")
    if args.out:
        Path(args.out).write_text(solution_json(inst, sol))
    if args.fail_on_timeout and not optimal:
        return EXIT_CAPACITY
    return 0


def _parse_sub(text: str, parser):
    try:
        nodes, sink = text.split(",")
        return [int(v) for v in nodes.split()], int(sink)
    except ValueError:
        parser.error(f"--sub expects '<node list>,<sink>', got {text!r}")


def cmd_export_qubo(args, parser) -> int:
    inst = read_instance(args.instance)
    if args.sub:
        nodes, sink = _parse_sub(args.sub, parser)
        base = [int(k) for k in args.base.split()] if args.base else []
        q = build_sub_qubo(make_spec(inst, nodes, sink, base), args.penalty)
    else:
        q = build_full_qubo(inst, args.penalty)
    _emit(dumps_qubo(q, args.sense), args.out)
    print(f"variables {q.var_count}", file=sys.stderr)
    return 0


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def cmd_bench(args, parser) -> int:
    try:
        sizes, seeds = _int_list(args.sizes), _int_list(args.seeds)
    except ValueError:
        parser.error("--sizes and --seeds take comma separated integers or ranges like 0-9")
    if not sizes:
        parser.error("--sizes must list at least one grid side")
    if not seeds:
        parser.error("--seeds must list at least one seed")
    if any(s < 2 for s in sizes):
        parser.error("grid sides must be >= 2")
    preset = PRESETS[args.preset] if args.preset else None
    frac = args.budget_frac if args.budget_frac is not None else (preset.budget_fraction if preset else 0.0025)
    cfg = BenchConfig(
        sizes=sizes,
        seeds=seeds,
        budget_fraction=frac,
        budget=args.budget,
        n=args.n if args.n is not None else (preset.n if preset else 20),
        lam=args.lam if args.lam is not None else (preset.lam if preset else 50),
        subsolver=_subsolver(args),
        timeout_mode=args.timeout_mode,
        timeout=args.timeout,
    )
    _emit(rows_to_csv(run_benchmark(cfg)), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spni", description="Shortest path network interdiction by decomposition")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random grid instance")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--budget", type=int, default=0)
    g.add_argument("--budget-frac", type=float, default=None, help="budget as a fraction of |A| (floored at 1)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="greedy start plus refinement")
    p.add_argument("--instance", required=True)
    p.add_argument("--n", type=int, default=20, help="target block size")
    p.add_argument("--lambda", dest="lam", type=int, default=50, help="refinement iterations")
    _add_subsolver_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--start", help="refine this solution file instead of the greedy start")
    p.add_argument("--trace-out")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("baseline", help="whole-problem solve")
    p.add_argument("--instance", required=True)
    p.add_argument("--mode", choices=("bruteforce", "bb"), default="bb")
    p.add_argument("--timeout", type=float, default=None, help="seconds (bb mode)")
    p.add_argument("--cap", type=int, default=2_000_000, help="max sets to enumerate (bruteforce mode)")
    p.add_argument("--fail-on-timeout", action="store_true", help="exit 4 when bb times out")
    p.add_argument("--out")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("export-qubo", help="write the full or a block QUBO")
    p.add_argument("--instance", required=True)
    p.add_argument("--sub", help="block as '<space separated nodes>,<sink>'")
    p.add_argument("--base", help="space separated arc ids of the current solution (with --sub)")
    p.add_argument("--penalty", type=int, default=None)
    p.add_argument("--sense", choices=("max", "min"), default="max")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_qubo)

    p = sub.add_parser("bench", help="refinement vs baseline on square grids")
    p.add_argument("--sizes", required=True, help="grid sides, e.g. '5,7' or '5-8'")
    p.add_argument("--seeds", default="0")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--budget-frac", type=float, default=None)
    p.add_argument("--budget", type=int, default=None, help="fixed budget, overrides the fraction")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=int, default=None)
    _add_subsolver_flags(p)
    p.add_argument("--timeout-mode", choices=("refine", "fixed", "oracle"), default="refine")
    p.add_argument("--timeout", type=float, default=60.0, help="seconds for --timeout-mode fixed")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args, parser)
    except CapacityError as e:
        print(f"spni: capacity error: {e}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InputError, UnreachableError, OSError) as e:
        print(f"spni: {e}", file=sys.stderr)
        return EXIT_INPUT
    except SpniError as e:
        print(f"spni: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
