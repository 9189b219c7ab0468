import logging
from collections import Counter

from intertype.constraints import format_constraints, format_substitution, parse_substitution
from intertype.lb_reduction import (
    VARIANTS, CT, RandomSpoiler, ScriptedSpoiler, build_constraints, compile_strategy, encode_tiles_unary,
    exhaustive_playouts, extract_play, first_tile_spoiler,
)
from intertype.tiling_games import parse_tiling, solve_spiral_game
from utils import read_text, write_text

logger = logging.getLogger(__name__)


def _load(path):
    return parse_tiling(read_text(path))


def _emit(text, output):
    if output:
        write_text(output, text)
        logger.info(f"✓ written to {output}")
    else:
        print(text, end="")


def cmd_solve_game(args):
    t = _load(args.tiling)
    tree = solve_spiral_game(t, max_len=args.horizon)
    if tree is None:
        print("Constructor has no winning strategy")
        return 1
    print(f"Constructor wins; strategy depth {tree.depth}, {len(tree.nodes)} nodes")
    print(tree.render(), end="")
    return 0


def cmd_reduce(args):
    t = _load(args.tiling)
    cs = build_constraints(t, args.variant)
    if args.unary:
        cs = encode_tiles_unary(cs, t)
    _emit(format_constraints(cs), args.output)
    return 0


def cmd_compile_strategy(args):
    t = _load(args.tiling)
    tree = solve_spiral_game(t, max_len=args.horizon)
    if tree is None:
        print("Constructor has no winning strategy")
        return 1
    s = compile_strategy(t, tree, args.variant, allow_large=args.allow_large)
    _emit(format_substitution(s), args.output)
    return 0


def cmd_play(args):
    t = _load(args.tiling)
    s = parse_substitution(read_text(args.substitution))
    if args.spoiler == "exhaustive":
        outcomes = exhaustive_playouts(t, s, args.variant)
        reasons = Counter(o.reason.value for o in outcomes)
        longest = max(len(o.moves) for o in outcomes)
        summary = ", ".join(f"{n} {r}" for r, n in sorted(reasons.items()))
        print(f"Constructor wins all {len(outcomes)} plays ({summary}); longest adds {longest} tiles")
        return 0
    if args.script is not None:
        spoiler = ScriptedSpoiler(args.script.split())
    elif args.spoiler == "random":
        spoiler = RandomSpoiler(args.seed)
    else:
        spoiler = first_tile_spoiler
    outcome = extract_play(t, s, spoiler, args.variant)
    print(f"Constructor wins ({outcome.reason.value}): {' '.join(t.bottom)} | {' '.join(outcome.moves)}")
    return 0


def setup(subparsers):
    p = subparsers.add_parser("solve-game", help="find a winning Constructor strategy for a spiral game")
    p.add_argument("tiling")
    p.add_argument("--horizon", type=int, help="longest sequence considered, bottom row included")
    p.set_defaults(handler=cmd_solve_game)

    p = subparsers.add_parser("reduce", help="constraint set satisfiable iff Constructor wins")
    p.add_argument("tiling")
    p.add_argument("--variant", choices=VARIANTS, default=CT)
    p.add_argument("--unary", action="store_true", help="encode tiles as towers over one constant")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_reduce)

    p = subparsers.add_parser("compile-strategy", help="solution of the reduction from a winning strategy")
    p.add_argument("tiling")
    p.add_argument("--variant", choices=VARIANTS, default=CT)
    p.add_argument("--horizon", type=int)
    p.add_argument("--allow-large", action="store_true", help="lift the size limits")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_compile_strategy)

    p = subparsers.add_parser("play", help="play Constructor from a solution of the reduction")
    p.add_argument("tiling")
    p.add_argument("substitution")
    p.add_argument("--variant", choices=VARIANTS, default=CT)
    p.add_argument("--spoiler", choices=["first", "random", "exhaustive"], default="first")
    p.add_argument("--script", help="Spoiler tiles separated by spaces")
    p.set_defaults(handler=cmd_play)
