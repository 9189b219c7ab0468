import functools
import logging

from config import BUDGET_CARD, BUDGET_DEPTH
from intertype.constraints import format_substitution, holds, parse_constraints, parse_substitution
from intertype.matching import brute_force_sat, parse_dimacs, solve_3sat_by_matching
from intertype.rank1 import solve_rank1
from utils import read_text, run_parallel, write_text

logger = logging.getLogger(__name__)


def cmd_verify(args):
    cs = parse_constraints(read_text(args.constraints))
    s = parse_substitution(read_text(args.substitution))
    failing = [(i, c) for i, c in enumerate(cs, start=1) if not holds(s, c)]
    if not failing:
        print(f"yes ({len(cs)} constraints hold)")
        return 0
    print("no")
    for i, c in failing:
        print(f"  constraint {i} fails: {c}")
    return 1


def match_file(path, single_constant=False, oracle=False):
    """Answer for one DIMACS file; top level so it can run in a worker process."""
    f = parse_dimacs(read_text(path))
    valuation = solve_3sat_by_matching(f, single_constant=single_constant)
    result = {"path": path, "valuation": valuation, "agrees": None}
    if oracle:
        result["agrees"] = (valuation is None) == (brute_force_sat(f) is None)
    return result


def cmd_match(args):
    check = functools.partial(match_file, single_constant=args.single_constant, oracle=args.oracle)
    results = run_parallel(check, args.files, args.jobs)
    status = 0
    for r in results:
        valuation = r["valuation"]
        if valuation is None:
            line = f"{r['path']}: unsat"
            status = max(status, 1)
        else:
            assigned = " ".join(f"{x}={int(v)}" for x, v in valuation.items())
            line = f"{r['path']}: sat {assigned}"
        if r["agrees"] is False:
            line += "  (brute force DISAGREES)"
            status = 2
        print(line)
    return status


def cmd_rank1(args):
    cs = parse_constraints(read_text(args.constraints))
    s = solve_rank1(cs, card=args.budget_card, max_depth=args.budget_depth)
    if s is None:
        print("no solution within budget")
        return 1
    text = format_substitution(s)
    if args.output:
        write_text(args.output, text)
        logger.info(f"✓ substitution written to {args.output}")
    print(text, end="")
    return 0


def setup(subparsers):
    p = subparsers.add_parser("verify", help="check a substitution against a constraint file")
    p.add_argument("constraints")
    p.add_argument("substitution")
    p.set_defaults(handler=cmd_verify)

    p = subparsers.add_parser("match", help="solve 3-SAT instances through their matching image")
    p.add_argument("files", nargs="+", help="DIMACS files with three literals per clause")
    p.add_argument("--single-constant", action="store_true", help="encode literals as towers over one constant")
    p.add_argument("--oracle", action="store_true", help="cross-check with brute force")
    p.set_defaults(handler=cmd_match)

    p = subparsers.add_parser("rank1", help="search a rank-1 solution of a constraint file")
    p.add_argument("constraints")
    p.add_argument("--budget-card", type=int, default=BUDGET_CARD, help="largest set per variable")
    p.add_argument("--budget-depth", type=int, default=BUDGET_DEPTH, help="deepest simple type")
    p.add_argument("-o", "--output", help="write the substitution here")
    p.set_defaults(handler=cmd_rank1)
