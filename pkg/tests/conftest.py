import os
import itertools

from hypothesis import HealthCheck, settings, strategies as st

from intertype.tiling_games import TilingSystem
from intertype.type_algebra import OMEGA, Arrow, Const, Var, inter

settings.register_profile("dev", max_examples=100, deadline=None)
settings.register_profile(
    "acceptance",
    max_examples=10_000,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
PROFILE = os.getenv("HYPOTHESIS_PROFILE", "dev")
settings.load_profile(PROFILE)


def trials(acceptance, dev):
    """Example count for searches too costly to run 10_000 times."""
    return acceptance if PROFILE == "acceptance" else dev


DATA = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


def data_file(name):
    return os.path.join(DATA, name)


# ─── Types ───────────────────────────────────────────────────────────────────

def atoms(constants=("a", "b", "c"), variables=()):
    names = [Const(c) for c in constants] + [Var(v) for v in variables]
    return st.sampled_from(names)


def types(constants=("a", "b", "c"), variables=(), omega=True, max_leaves=10):
    leaves = atoms(constants, variables)
    if omega:
        leaves = leaves | st.just(OMEGA)
    return st.recursive(
        leaves,
        lambda inner: st.builds(Arrow, inner, inner) | st.lists(inner, min_size=2, max_size=3).map(inter),
        max_leaves=max_leaves,
    )


def simple_types(constants=("a", "b"), max_leaves=6):
    return st.recursive(
        atoms(constants),
        lambda inner: st.builds(Arrow, inner, inner),
        max_leaves=max_leaves,
    )


def rank1_types(constants=("a", "b"), max_size=4):
    return st.lists(simple_types(constants), max_size=max_size).map(inter)


# ─── Tiling systems ──────────────────────────────────────────────────────────

@st.composite
def tiling_systems(draw, max_tiles=2, max_n=2):
    tiles = ("a", "b", "c")[:draw(st.integers(1, max_tiles))]
    pairs = list(itertools.product(tiles, repeat=2))
    h = draw(st.sets(st.sampled_from(pairs)))
    v = draw(st.sets(st.sampled_from(pairs)))
    n = draw(st.integers(1, max_n))
    row = st.lists(st.sampled_from(tiles), min_size=n, max_size=n).map(tuple)
    return TilingSystem(tiles, h, v, draw(row), draw(row), n)


def spiral1_rules(bottom=("a", "a", "a")):
    """The three-wide system over a, b where a never follows a; Constructor cannot win."""
    h = {("a", "b"), ("b", "a"), ("b", "b")}
    v = set(itertools.product("ab", repeat=2))
    return TilingSystem(("a", "b"), h, v, bottom, ("b", "b", "b"), 3)
