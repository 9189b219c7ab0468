import statistics
import time

import pytest
from hypothesis import assume, given, strategies as st

from conftest import types
from intertype.subtyping import (
    beta_indices, collapse, join_arrows, nested_family, subtype, subtype_organized, type_equal,
)
from intertype.type_algebra import (
    OMEGA, Arrow, as_path, components, depth, inter, is_omega_equal, organize, parse_type, size,
)
from utils import JoinUndefinedError


def T(text):
    return parse_type(text)


@pytest.mark.parametrize("left, right, expected", [
    ("a & b", "a", True),
    ("(a -> b) & (a -> c)", "a -> b & c", True),
    ("omega", "omega -> omega", True),
    ("a -> b", "a & c -> b", True),
    ("a", "b", False),
    ("a", "a & b", False),
    ("a & c -> b", "a -> b", False),
    ("'x", "'x", True),
    ("'x", "a", False),
    ("a -> omega", "b -> omega", True),
    ("(a -> b) & (c -> d)", "a & c -> b & d", True),
    ("(a -> b) & (c -> d)", "a -> b & d", False),
])
def test_subtype_cases(left, right, expected):
    assert subtype(T(left), T(right)) is expected


@pytest.mark.parametrize("left, right, expected", [
    ("a & a", "a", True),
    ("a -> omega", "omega", True),
    ("a -> b", "b -> a", False),
    ("omega -> omega", "omega", True),
    ("(a -> b & c) & d", "d & (a -> c) & (a -> b)", True),
])
def test_type_equal_cases(left, right, expected):
    assert type_equal(T(left), T(right)) is expected


def test_collapse_removes_omega_parts():
    assert collapse(T("(a -> omega) & b")) == T("b")
    assert collapse(T("c -> (a -> omega) & b")) == T("c -> b")
    assert collapse(T("a -> omega")) is OMEGA


@given(types(variables=("x",)))
def test_reflexive(t):
    assert subtype(t, t)
    assert subtype(t, OMEGA)


@given(types(), types(), types())
def test_transitive(s, t, r):
    if subtype(s, t) and subtype(t, r):
        assert subtype(s, r)


@given(types(), types())
def test_meet_is_lower_bound(s, t):
    assert subtype(inter([s, t]), s)
    assert subtype(inter([s, t]), t)


@given(types(), types(), types(), types(), types(), st.lists(types(), max_size=2))
def test_arrow_components_witness_arrow_subtyping(s1, t1, s2, t2, extra_source, rest):
    s = inter(rest + [Arrow(s1, t1), Arrow(s2, t2)])
    target = inter([t1, t2])
    t = Arrow(inter([s1, s2, extra_source]), target)
    assume(not is_omega_equal(t))
    assert subtype(s, t)
    chosen = beta_indices(s, t)
    assert chosen
    assert subtype(inter(components(s)[i].target for i in chosen), t.target)


@given(types(variables=("x",)), types(variables=("x",)))
def test_pathwise_subtyping_of_organized_types(s, t):
    s, t = organize(s), organize(t)
    assert subtype_organized(s, t) == subtype(s, t)


@given(types(), types(), types())
def test_path_below_intersection_is_below_a_part(s, t, p):
    paths = [c for c in components(organize(p)) if as_path(c) is not None]
    assume(paths)
    pi = paths[0]
    assert subtype(inter([s, t]), pi) == (subtype(s, pi) or subtype(t, pi))


# ─── Joins ───────────────────────────────────────────────────────────────────

def test_join_arrows():
    assert join_arrows(T("a -> c"), T("b -> c")) == T("a & b -> c")
    assert type_equal(join_arrows(T("a -> c"), T("a -> c")), T("a -> c"))
    assert type_equal(join_arrows(T("omega -> c"), T("a -> c")), T("a -> c"))


def test_join_is_partial():
    with pytest.raises(JoinUndefinedError):
        join_arrows(T("a"), T("b -> c"))
    with pytest.raises(JoinUndefinedError):
        join_arrows(T("a -> b"), T("a -> c"))


@given(types(), types(), types(), types())
def test_join_is_least_arrow_upper_bound(s1, s2, t, other):
    left, right = Arrow(s1, t), Arrow(s2, t)
    j = join_arrows(left, right)
    assert subtype(left, j) and subtype(right, j)
    bound = Arrow(other, t)
    if subtype(left, bound) and subtype(right, bound):
        assert subtype(j, bound)


# ─── Scaling ─────────────────────────────────────────────────────────────────

def test_nested_family_is_equal():
    left, right = nested_family(16)
    assert type_equal(left, right)
    assert size(left) == 12 * 16 - 5
    assert size(right) == 10 * 16 - 5
    assert depth(left) == 2 + 4


def test_nested_families_of_different_width_differ():
    left, right = nested_family(2)
    assert left != right
    assert not subtype(left, nested_family(3)[1])


def _median_time(k, repeats=9):
    left, right = nested_family(k)
    timings = []
    for _ in range(repeats):
        start = time.perf_counter()
        assert subtype(left, right)
        timings.append(time.perf_counter() - start)
    return statistics.median(timings)


@pytest.mark.slow
@pytest.mark.parametrize("k", [2 ** e for e in range(8, 13)])
def test_decision_time_grows_at_most_quadratically(k):
    assert _median_time(2 * k) <= 4.5 * _median_time(k)


def test_long_intersections_find_their_own_components():
    s = inter(T(f"a{i} -> b{i}") for i in range(6))
    for c in components(s):
        assert subtype(s, c)
        assert subtype(s, T(str(c)))
    assert not subtype(s, T("a0 -> b1"))
