"""Command line interface.

Exit codes: 0 success, 1 usage or config error, 2 infeasible solution,
3 exact solve stopped by its time limit without proving optimality.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import bench, duo, exact, instance
from .bounds import lower_bound
from .errors import ConfigError, InstanceParseError, InstanceValidationError, InvalidArgumentError, SizeLimitError
from .render import render_solution

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_TIMEOUT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wingmate", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--grid", type=float, default=500.0)
    g.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="solve an instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--method", choices=["approx", "heuristic", "exact", "brute"], required=True)
    s.add_argument("--align", action="store_true", help="re-link the tours by their best alignment")
    s.add_argument("--time-limit", type=float, default=600.0)
    s.add_argument("--out", required=True)

    b = sub.add_parser("bound", help="print lower bounds")
    b.add_argument("--instance", required=True)

    v = sub.add_parser("validate", help="check a solution file")
    v.add_argument("--instance", required=True)
    v.add_argument("--solution", required=True)

    r = sub.add_parser("bench", help="run a benchmark suite")
    r.add_argument("--config", required=True)
    r.add_argument("--out-dir", required=True)

    rep = sub.add_parser("report", help="print the aggregated tables of a bench run")
    rep.add_argument("--dir", required=True)

    d = sub.add_parser("render", help="draw a solution as SVG")
    d.add_argument("--instance", required=True)
    d.add_argument("--solution", required=True)
    d.add_argument("--out", required=True)
    return p


def _solve(args) -> int:
    inst = instance.load(args.instance)
    code = EXIT_OK
    if args.method in ("exact", "brute"):
        res = exact.exact_solve(inst, args.time_limit) if args.method == "exact" else exact.brute_force_solve(inst)
        sol = duo.realign(inst, res.solution) if args.align else res.solution
        print(f"optimal={res.optimal} best_bound={res.best_bound!r} nodes={res.nodes_explored} runtime={res.runtime:.3f}s")
        if not res.optimal:
            code = EXIT_TIMEOUT
    elif args.method == "approx":
        sol = duo.approx_solve(inst, align=args.align)
    else:
        sol = duo.heuristic_solve(inst, align=args.align)
    report = duo.validate(inst, sol)
    duo.save_solution(sol, args.out)
    print(f"travel={sol.travel_cost!r} comm={sol.comm_cost!r} total={sol.total_cost!r}")
    if not report.feasible:
        print(report, file=sys.stderr)
        return EXIT_INFEASIBLE
    return code


def _bench(args) -> int:
    config = bench.BenchConfig.load(args.config)
    records = bench.run_suite(config, args.out_dir)
    print(bench.format_report(args.out_dir))
    bad = [r.instance_id for r in records if not r.feasible]
    if bad:
        print(f"infeasible solver output on {bad}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            instance.save(instance.generate_random(args.n, args.seed, args.grid), args.out)
            return EXIT_OK
        if args.command == "solve":
            return _solve(args)
        if args.command == "bound":
            print(json.dumps(asdict(lower_bound(instance.load(args.instance))), indent=2))
            return EXIT_OK
        if args.command == "validate":
            inst = instance.load(args.instance)
            report = duo.validate(inst, duo.load_solution(inst, args.solution))
            print(report)
            return EXIT_OK if report.feasible else EXIT_INFEASIBLE
        if args.command == "bench":
            return _bench(args)
        if args.command == "report":
            print(bench.format_report(args.dir))
            return EXIT_OK
        if args.command == "render":
            inst = instance.load(args.instance)
            report = render_solution(inst, duo.load_solution(inst, args.solution), args.out)
            if not report.feasible:
                print(report, file=sys.stderr)
                return EXIT_INFEASIBLE
            return EXIT_OK
    except (ConfigError, InstanceParseError, InstanceValidationError, InvalidArgumentError, SizeLimitError, OSError) as e:
        print(f"wingmate: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
