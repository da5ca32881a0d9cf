"""Command line: ``cabb generate | solve | oracle | bench``.

Exit codes: 0 success, 1 error or bad usage, 2 when ``solve`` stopped at a
node or time limit (the printed value is then only a lower bound).
"""
from __future__ import annotations

import argparse
import json
import sys

from . import bench, fileformat, generators, model
from .heuristics import Criterion, default_portfolio
from .solver import SolverConfig, solve


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _criterion(text):
    try:
        return Criterion.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _family(text):
    try:
        return generators.family_name(text)
    except generators.SpecError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _key_value(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cabb", description="Winner determination for "
                "multi-unit combinatorial auctions by LP-bounded branch and bound.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a random instance file")
    g.add_argument("--family", required=True, type=_family,
                   help=f"one of {', '.join(generators.FAMILIES)}")
    g.add_argument("--goods", required=True, type=int)
    g.add_argument("--bids", required=True, type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--set-size", type=int, help="uniform family bundle size")
    g.add_argument("--alpha", type=float, help="decay family continuation probability")
    g.add_argument("--param", action="append", type=_key_value, default=[],
                   metavar="KEY=VALUE", help="any other generator parameter")

    s = sub.add_parser("solve", help="solve an instance file to optimality")
    s.add_argument("path")
    s.add_argument("--branching", type=_criterion, default=Criterion.parse("SquareRoot"))
    s.add_argument("--bound", choices=("lp", "extnorm"), default="lp")
    s.add_argument("--node-limit", type=int, default=0)
    s.add_argument("--time-limit", type=float, default=0.0)
    s.add_argument("--no-reuse", action="store_true",
                   help="always re-solve the LP in the deny branch")
    s.add_argument("--no-lp-adaptive", action="store_true",
                   help="drop the adaptive LP heuristic from initialization")
    s.add_argument("--stats-out", help="write search statistics as JSON")

    o = sub.add_parser("oracle", help="exhaustive search (small instances only)")
    o.add_argument("path")
    o.add_argument("--cap", type=int, default=model.ORACLE_CAP)

    b = sub.add_parser("bench", help="run an experiment plan")
    b.add_argument("--plan", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--workers", type=int, help="override the plan's worker count")
    return p


def _print_allocation(auction, alloc):
    print(f"value {model.format_ticks(alloc.value_ticks, auction.decimals)}")
    print("granted " + " ".join(str(i) for i in alloc.granted))


def cmd_generate(args) -> int:
    params = dict(args.param)
    params.update(family=args.family, num_goods=args.goods,
                  num_bids=args.bids, seed=args.seed)
    if args.set_size is not None:
        params["set_size"] = args.set_size
    if args.alpha is not None:
        params["alpha"] = args.alpha
    spec = generators.GeneratorSpec.from_dict(params)
    generators.generate_file(spec, args.out)
    return 0


def cmd_solve(args) -> int:
    auction = fileformat.read_instance(args.path)
    config = SolverConfig(branching=args.branching, bound=args.bound,
                          reuse_lp=not args.no_reuse, node_limit=args.node_limit,
                          time_limit=args.time_limit,
                          portfolio=default_portfolio(not args.no_lp_adaptive))
    alloc, stats = solve(auction, config)
    _print_allocation(auction, alloc)
    print(f"status {'optimal' if stats.proven_optimal else 'limit-' + stats.limit_hit}")
    print(f"nodes {stats.nodes_visited} lp_calls {stats.lp_calls} "
          f"lp_calls_saved {stats.lp_calls_saved} prunes {stats.prunes}")
    if args.stats_out:
        with open(args.stats_out, "w", encoding="utf-8") as f:
            json.dump(stats.as_dict(), f, indent=2)
    return 0 if stats.proven_optimal else 2


def cmd_oracle(args) -> int:
    auction = fileformat.read_instance(args.path)
    alloc = model.brute_force_optimum(auction, cap=args.cap)
    _print_allocation(auction, alloc)
    return 0


def cmd_bench(args) -> int:
    plan = bench.load_plan(args.plan)
    if args.workers is not None:
        plan = bench.ExperimentPlan(**{**plan.__dict__, "workers": args.workers})
    result = bench.run_plan(plan, args.out)
    failed = sum(1 for r in result.rows if r.error)
    print(f"{len(result.rows)} runs written to {args.out} ({failed} with errors)")
    return 0


COMMANDS = {"generate": cmd_generate, "solve": cmd_solve,
            "oracle": cmd_oracle, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"cabb {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
