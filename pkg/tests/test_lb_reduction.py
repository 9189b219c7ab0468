import itertools
from collections import defaultdict

import pytest
from hypothesis import assume, given, settings

from conftest import data_file, spiral1_rules, tiling_systems
from intertype.constraints import constants_of, leq, variables_of, verify
from intertype.lb_reduction import (
    CT, CT_PRIME, PlayExtractor, RandomSpoiler, ScriptedSpoiler, alpha_component_count, build_constraints, build_CT,
    build_CT_prime, compile_strategy, encode_tiles_unary, exhaustive_playouts, extract_play, position_type,
    reduction_gadgets, strategy_substitution,
)
from intertype.tiling_games import (
    LeafReason, Node, PlayOutcome, StrategyTree, TilingSystem, all_pairs, leaf_reason, legal_move, parse_tiling,
    solve_spiral_game,
)
from intertype.type_algebra import OMEGA, Const, as_path, components, contains_omega, is_rank1, parse_type
from utils import BudgetExceededError, ExtractionError, InvalidStrategyError, PreconditionError, read_text


def load(name):
    return parse_tiling(read_text(data_file(name)))


def ladder(n):
    """spiral2's rules at width n: b never sits below a."""
    v = {("a", "a"), ("a", "b"), ("b", "b")}
    return TilingSystem(("a", "b"), all_pairs(("a", "b")), v, ("a",) * n, ("b",) * n, n)


def constraint_types(cs):
    return [side for c in cs for side in (c.lhs, c.rhs)]


# ─── Constraint sets ─────────────────────────────────────────────────────────

def test_ct_shape():
    t = ladder(3)
    cs = build_CT(t)
    assert len(cs) == 3
    g = reduction_gadgets(t, CT)
    assert g.bot_h is OMEGA
    assert len(as_path(g.bot_v).arguments) == 4
    assert len(components(cs[0].rhs)) == 5
    assert variables_of(cs) == {"alpha", "beta_a", "beta_b"}
    assert constants_of(cs) == {"a", "b", "bullet"}


def test_ct_gadgets():
    g = reduction_gadgets(ladder(3), CT)
    assert g.sigma_b == parse_type("a -> a -> a -> bullet")
    assert g.sigma_t == parse_type("(b -> b -> b -> 'alpha) & (omega -> b -> b -> b -> 'alpha)")
    assert g.bot_v == parse_type("a -> omega -> omega -> b -> 'alpha")


def test_ct_prime_shape():
    t = load("spiral2.tiling")
    cs = build_CT_prime(t)
    assert len(cs) == 3 + len(t.tiles) + len(t.tiles) * (t.n - 1) == 13
    assert not any(contains_omega(side) for side in constraint_types(cs))
    gammas = {f"gamma_{d}_{i}" for d in t.tiles for i in range(1, t.n + 1)}
    assert variables_of(cs) == {"alpha", "beta_a", "beta_b"} | gammas


def test_ct_prime_without_h_or_v():
    t = TilingSystem(("a", "b"), all_pairs(("a", "b")), set(), ("a",), ("b",), 1)
    [c] = build_CT_prime(t)
    assert c == leq(Const("bullet"), parse_type("bullet -> bullet"))
    assert not verify({}, [c])
    assert solve_spiral_game(t) is None
    assert len(build_CT(t)) == 3

    finished = TilingSystem(("a",), set(), all_pairs(("a",)), ("a",), ("a",), 1)
    assert build_CT_prime(finished) == []
    assert solve_spiral_game(finished) is not None


def test_reduction_preconditions():
    with pytest.raises(PreconditionError):
        build_CT(load("spiral1.tiling"))
    t = TilingSystem(("bullet",), all_pairs(("bullet",)), all_pairs(("bullet",)), ("bullet",), ("bullet",), 1)
    with pytest.raises(PreconditionError):
        build_CT(t)
    with pytest.raises(PreconditionError):
        build_constraints(load("trivial.tiling"), variant="ct-double-prime")


def test_single_constant_encoding():
    cs = encode_tiles_unary(build_CT(load("trivial.tiling")), load("trivial.tiling"))
    assert constants_of(cs) == {"bullet"}


def test_position_type():
    assert position_type(()) == Const("bullet")
    assert position_type(("a", "b")) == parse_type("b -> a -> bullet")


# ─── Strategies to solutions ─────────────────────────────────────────────────

@pytest.mark.parametrize("variant", [CT, CT_PRIME])
def test_trivial_strategy_compiles_to_a_solution(variant):
    t = load("trivial.tiling")
    tree = solve_spiral_game(t)
    s = compile_strategy(t, tree, variant)
    assert alpha_component_count(t, tree) == 15
    assert len(components(s["alpha"])) == 15
    assert s["beta_b"] == position_type(("a",))
    assert s["beta_a"] is OMEGA
    assert verify(s, build_constraints(t, variant))


def test_ct_solution_is_rank1():
    t = load("trivial.tiling")
    s = compile_strategy(t, solve_spiral_game(t), CT)
    assert all(is_rank1(value) for value in s.values())


def test_bottom_equal_to_top():
    t = TilingSystem(("a",), all_pairs(("a",)), all_pairs(("a",)), ("a",), ("a",), 1)
    s = compile_strategy(t, solve_spiral_game(t))
    assert s["beta_a"] is OMEGA
    assert verify(s, build_CT(t))
    assert extract_play(t, s) == PlayOutcome(LeafReason.FINISHED, ())


def test_compile_limits():
    t = load("trivial.tiling")
    tree = solve_spiral_game(t)
    with pytest.raises(BudgetExceededError):
        compile_strategy(t, tree, max_components=10)
    s = compile_strategy(t, tree, allow_large=True, max_components=10)
    assert len(components(s["alpha"])) == 15


def test_compile_limits_the_span():
    t = load("spiral2.tiling")
    tree = solve_spiral_game(t)
    assert tree.depth + t.n == 15
    with pytest.raises(BudgetExceededError):
        compile_strategy(t, tree)


def test_compile_checks_the_tree():
    t = load("trivial.tiling")
    tree = solve_spiral_game(t)
    del tree.nodes[("b", "b")]
    with pytest.raises(InvalidStrategyError):
        compile_strategy(t, tree)


@pytest.mark.parametrize("variant", [CT, CT_PRIME])
def test_losing_strategy_is_not_a_solution(variant):
    t = spiral1_rules(bottom=("b", "a", "b"))
    tree = StrategyTree(t.bottom, {(): Node("C", move="a"), ("a",): Node("S")})
    s = strategy_substitution(t, tree, variant)
    assert not verify(s, build_constraints(t, variant))


# ─── Solutions to plays ──────────────────────────────────────────────────────

def trivial_solution(variant=CT):
    t = load("trivial.tiling")
    return t, compile_strategy(t, solve_spiral_game(t), variant)


def test_extractor_bound():
    t, s = trivial_solution()
    assert PlayExtractor(t, s).bound == 3


@pytest.mark.parametrize("variant", [CT, CT_PRIME])
def test_extract_play_against_the_first_tile(variant):
    t, s = trivial_solution(variant)
    outcome = extract_play(t, s, variant=variant)
    assert outcome == PlayOutcome(LeafReason.LATE_MOVE, ("b", "a"))


def test_extract_play_with_a_script():
    t, s = trivial_solution()
    assert extract_play(t, s, ScriptedSpoiler(["b"])) == PlayOutcome(LeafReason.FINISHED, ("b", "b"))
    with pytest.raises(ExtractionError):
        extract_play(t, s, ScriptedSpoiler([]))
    with pytest.raises(PreconditionError):
        extract_play(t, s, ScriptedSpoiler(["c"]))


def test_extract_play_with_a_random_spoiler():
    t, s = trivial_solution()
    outcome = extract_play(t, s, RandomSpoiler(3))
    assert outcome.reason in (LeafReason.LATE_MOVE, LeafReason.FINISHED)
    assert outcome.moves[0] == "b"


def test_exhaustive_playouts():
    t, s = trivial_solution()
    outcomes = exhaustive_playouts(t, s)
    assert sorted(outcomes, key=lambda o: o.moves) == [
        PlayOutcome(LeafReason.LATE_MOVE, ("b", "a")),
        PlayOutcome(LeafReason.FINISHED, ("b", "b")),
    ]


def test_non_solution_fails_extraction():
    t = load("trivial.tiling")
    s = {"alpha": OMEGA, "beta_a": OMEGA, "beta_b": OMEGA}
    with pytest.raises(ExtractionError):
        extract_play(t, s)


# ─── Larger systems ──────────────────────────────────────────────────────────

def assert_constructor_won(t, outcome):
    """The play is legal for Constructor and ends where Constructor has won."""
    for i in range(0, len(outcome.moves), 2):
        assert legal_move(t, t.bottom + outcome.moves[:i], outcome.moves[i])
    assert leaf_reason(t, t.bottom + outcome.moves) is not None


@pytest.fixture(scope="module")
def spiral2():
    t = load("spiral2.tiling")
    return t, solve_spiral_game(t)


@pytest.mark.slow
def test_spiral2_end_to_end(spiral2):
    t, tree = spiral2
    s = compile_strategy(t, tree, allow_large=True)
    assert alpha_component_count(t, tree) == 2 ** 16 - 1
    assert verify(s, build_CT(t))
    outcome = extract_play(t, s, ScriptedSpoiler(["a", "a", "b", "b", "a"]))
    assert outcome.moves == ("b", "a", "b", "a", "b", "b", "b", "b", "b", "a")
    assert outcome.reason in (LeafReason.LATE_MOVE, LeafReason.V_VIOLATION)
    outcomes = exhaustive_playouts(t, s)
    assert len({o.moves for o in outcomes}) == len(outcomes) > 1
    for outcome in outcomes:
        assert_constructor_won(t, outcome)


@pytest.mark.slow
def test_spiral2_without_omega(spiral2):
    t, tree = spiral2
    cs = build_CT_prime(t)
    assert not any(contains_omega(side) for side in constraint_types(cs))
    s = compile_strategy(t, tree, CT_PRIME, allow_large=True)
    assert verify(s, cs)
    for outcome in exhaustive_playouts(t, s, CT_PRIME):
        assert_constructor_won(t, outcome)


def small_systems():
    """Every tiling system over at most two tiles and width at most two with H-consistent rows."""
    for tiles in (("a",), ("a", "b")):
        pairs = sorted(all_pairs(tiles))
        relations = [frozenset(c) for k in range(len(pairs) + 1) for c in itertools.combinations(pairs, k)]
        for n in (1, 2):
            rows = list(itertools.product(tiles, repeat=n))
            for h, v, bottom, top in itertools.product(relations, relations, rows, rows):
                t = TilingSystem(tiles, h, v, bottom, top, n)
                if t.h_consistent(bottom) and t.h_consistent(top):
                    yield t


@pytest.mark.slow
def test_small_systems_are_won_exactly_when_their_constraints_are_solvable():
    trees = defaultdict(dict)  # system without H and V -> distinct winning trees
    losers = []
    for t in small_systems():
        assert not any(contains_omega(side) for side in constraint_types(build_CT_prime(t)))
        tree = solve_spiral_game(t)
        if tree is None:
            losers.append(t)
            continue
        trees[t.tiles, t.n, t.bottom, t.top][frozenset(tree.nodes.items())] = tree
        for variant in (CT, CT_PRIME):
            s = compile_strategy(t, tree, variant, allow_large=True)
            assert verify(s, build_constraints(t, variant))
        s = compile_strategy(t, tree, allow_large=True)
        assert all(is_rank1(value) for value in s.values())
        for outcome in exhaustive_playouts(t, s):
            assert_constructor_won(t, outcome)
    assert losers
    # a losing system is solved by no substitution, in particular none compiled for a neighbour
    for t in losers:
        for tree in trees[t.tiles, t.n, t.bottom, t.top].values():
            if tree.depth > 6:
                continue
            for variant in (CT, CT_PRIME):
                assert not verify(strategy_substitution(t, tree, variant), build_constraints(t, variant))


@pytest.mark.slow
@settings(max_examples=20)
@given(tiling_systems(max_tiles=2, max_n=2))
def test_winning_strategies_compile_to_solutions(t):
    assume(t.h_consistent(t.bottom) and t.h_consistent(t.top))
    tree = solve_spiral_game(t)
    assume(tree is not None)
    for variant in (CT, CT_PRIME):
        s = compile_strategy(t, tree, variant, allow_large=True)
        assert verify(s, build_constraints(t, variant))
        if variant == CT or (t.h and t.v):
            for outcome in exhaustive_playouts(t, s, variant):
                assert_constructor_won(t, outcome)


def test_every_spoiler_sequence_ends_the_trivial_game():
    t, s = trivial_solution()
    for script in itertools.product(t.tiles, repeat=2):
        outcome = extract_play(t, s, ScriptedSpoiler(script))
        assert outcome.moves[0] == "b"
