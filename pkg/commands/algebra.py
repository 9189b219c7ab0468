import functools
import logging

from intertype.equational import SCHEMAS, fuzz_schema, get_schema
from intertype.subtyping import subtype, type_equal
from intertype.type_algebra import organize, parse_type, print_type
from utils import run_parallel

logger = logging.getLogger(__name__)


def _answer(value):
    print("yes" if value else "no")
    return 0 if value else 1


def cmd_subtype(args):
    return _answer(subtype(parse_type(args.left), parse_type(args.right)))


def cmd_equal(args):
    return _answer(type_equal(parse_type(args.left), parse_type(args.right)))


def cmd_organize(args):
    print(print_type(organize(parse_type(args.type))))
    return 0


def cmd_axioms(args):
    names = [get_schema(n).name for n in args.schema] if args.schema else list(SCHEMAS)
    check = functools.partial(fuzz_schema, count=args.count, seed=args.seed, max_depth=args.max_depth)
    results = run_parallel(check, names, args.jobs)
    failed = 0
    for name, failures in zip(names, results):
        if failures:
            failed += 1
            print(f"{name}: {len(failures)} of {args.count} instances fail")
            for line in failures[:args.show]:
                print(f"  {line}")
        else:
            print(f"{name}: ok ({args.count} instances)")
    return 1 if failed else 0


def setup(subparsers):
    p = subparsers.add_parser("subtype", help="decide LEFT <= RIGHT")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(handler=cmd_subtype)

    p = subparsers.add_parser("equal", help="decide LEFT <= RIGHT and RIGHT <= LEFT")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(handler=cmd_equal)

    p = subparsers.add_parser("organize", help="print an equal intersection of paths")
    p.add_argument("type")
    p.set_defaults(handler=cmd_organize)

    p = subparsers.add_parser("axioms", help="fuzz the axiom schemas against the subtyping decider")
    p.add_argument("--schema", action="append", help="schema name, repeatable; default all")
    p.add_argument("--count", type=int, default=1000, help="instances per schema")
    p.add_argument("--max-depth", type=int, default=4)
    p.add_argument("--show", type=int, default=3, help="failing instances printed per schema")
    p.set_defaults(handler=cmd_axioms)
