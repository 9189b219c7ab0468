"""
Axiom schemas of type equality
==============================
Each schema builds the two sides of an axiom from concrete types. Equations
are checked with type_equal, the inequations of the subtyping preorder with
subtype. Joins only occur on arrows sharing a target and are eliminated with
join_arrows before checking.
"""

import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from intertype.subtyping import join_arrows, subtype, type_equal
from intertype.type_algebra import (
    OMEGA, Arrow, components, inter, print_type, random_type,
)
from utils import ArityError, JoinUndefinedError, PreconditionError

logger = logging.getLogger(__name__)

EQ = "eq"
LEQ = "leq"


@dataclass(frozen=True)
class AxiomSchema:
    name: str
    arity: int
    build: Callable = field(repr=False)
    relation: str = EQ
    premises: Optional[Callable] = field(default=None, repr=False)
    sampler: Optional[Callable] = field(default=None, repr=False)
    text: str = ""


# ─── Samplers ────────────────────────────────────────────────────────────────

_CONSTANTS = ("a", "b", "c")
_VARIABLES = ("x", "y")


def _random(rng, max_depth):
    return random_type(rng, max_depth, _CONSTANTS, _VARIABLES)


def _weaken(rng, t):
    """Random supertype of t: a sub-intersection of its components."""
    parts = [c for c in components(t) if rng.random() < 0.6]
    return inter(parts)


def _plain_sampler(arity):
    def sample(rng, max_depth):
        return [_random(rng, max_depth) for _ in range(arity)]
    return sample


def _shared_target_sampler(rng, max_depth):
    target = _random(rng, max_depth - 1)
    return [Arrow(_random(rng, max_depth - 1), target), Arrow(_random(rng, max_depth - 1), target)]


def _glb_sampler(rng, max_depth):
    s = _random(rng, max_depth)
    return [s, _weaken(rng, s), _weaken(rng, s)]


def _contra_sampler(rng, max_depth):
    s2 = _random(rng, max_depth - 1)
    t1 = _random(rng, max_depth - 1)
    return [_weaken(rng, s2), s2, t1, _weaken(rng, t1)]


# ─── Schemas ─────────────────────────────────────────────────────────────────


SCHEMAS = {
    # equational presentation
    "A": AxiomSchema("A", 3, lambda s, t, r: (inter([s, inter([t, r])]), inter([inter([s, t]), r])),
                     text="s & (t & r) ~ (s & t) & r"),
    "C": AxiomSchema("C", 2, lambda s, t: (inter([s, t]), inter([t, s])), text="s & t ~ t & s"),
    "I": AxiomSchema("I", 1, lambda s: (inter([s, s]), s), text="s & s ~ s"),
    "U": AxiomSchema("U", 1, lambda s: (inter([s, OMEGA]), s), text="s & omega ~ s"),
    "Dl": AxiomSchema("Dl", 3, lambda s, t, t2: (inter([Arrow(s, t), Arrow(s, t2)]), Arrow(s, inter([t, t2]))),
                      text="(s -> t) & (s -> t') ~ s -> t & t'"),
    "RE": AxiomSchema("RE", 0, lambda: (OMEGA, Arrow(OMEGA, OMEGA)), text="omega ~ omega -> omega"),
    "AB": AxiomSchema("AB", 3, lambda s, t, s2: (Arrow(s, t), inter([Arrow(s, t), Arrow(inter([s, s2]), t)])),
                      text="s -> t ~ (s -> t) & (s & s' -> t)"),
    # join presentation, joins restricted to arrows with a common target
    "ABcap": AxiomSchema("ABcap", 2, lambda s, t: (s, inter([s, join_arrows(s, t)])),
                         sampler=_shared_target_sampler, text="s ~ s & (s v t)"),
    "Dr-": AxiomSchema("Dr-", 3, lambda s, s2, t: (join_arrows(Arrow(s, t), Arrow(s2, t)), Arrow(inter([s, s2]), t)),
                       text="(s -> t) v (s' -> t) ~ (s & s') -> t"),
    # the subtyping preorder
    "top": AxiomSchema("top", 1, lambda s: (s, OMEGA), LEQ, text="s <= omega"),
    "omega-arrow": AxiomSchema("omega-arrow", 0, lambda: (OMEGA, Arrow(OMEGA, OMEGA)), LEQ,
                               text="omega <= omega -> omega"),
    "meet-left": AxiomSchema("meet-left", 2, lambda s, t: (inter([s, t]), s), LEQ, text="s & t <= s"),
    "meet-right": AxiomSchema("meet-right", 2, lambda s, t: (inter([s, t]), t), LEQ, text="s & t <= t"),
    "arrow-meet": AxiomSchema("arrow-meet", 3,
                              lambda s, t1, t2: (inter([Arrow(s, t1), Arrow(s, t2)]), Arrow(s, inter([t1, t2]))),
                              LEQ, text="(s -> t1) & (s -> t2) <= s -> t1 & t2"),
    "glb": AxiomSchema("glb", 3, lambda s, t1, t2: (s, inter([t1, t2])), LEQ,
                       premises=lambda s, t1, t2: [(s, t1), (s, t2)], sampler=_glb_sampler,
                       text="s <= t1 and s <= t2 imply s <= t1 & t2"),
    "contravariance": AxiomSchema("contravariance", 4, lambda s1, s2, t1, t2: (Arrow(s1, t1), Arrow(s2, t2)), LEQ,
                                  premises=lambda s1, s2, t1, t2: [(s2, s1), (t1, t2)], sampler=_contra_sampler,
                                  text="s2 <= s1 and t1 <= t2 imply s1 -> t1 <= s2 -> t2"),
}

ALIASES = {"AB∩": "ABcap", "ABₙ": "ABcap", "Dr⁻": "Dr-", "D_l": "Dl", "R_E": "RE"}

EQUATIONAL = ["A", "C", "I", "U", "Dl", "RE", "AB"]
JOIN_PRESENTATION = ["A", "C", "I", "U", "Dl", "RE", "ABcap", "Dr-"]
PREORDER = ["top", "omega-arrow", "meet-left", "meet-right", "arrow-meet", "glb", "contravariance"]


def get_schema(name: str) -> AxiomSchema:
    key = ALIASES.get(name, name)
    if key not in SCHEMAS:
        raise PreconditionError(f"unknown axiom '{name}'")
    return SCHEMAS[key]


# ─── Instantiation and checking ──────────────────────────────────────────────

def instantiate_axiom(schema: AxiomSchema, args: list) -> tuple:
    if len(args) != schema.arity:
        raise ArityError(f"axiom {schema.name} takes {schema.arity} arguments, got {len(args)}")
    return schema.build(*args)


def check_axiom_soundness(schema: AxiomSchema, args: list) -> bool:
    lhs, rhs = instantiate_axiom(schema, args)
    if schema.relation == EQ:
        return type_equal(lhs, rhs)
    if schema.premises is not None:
        if not all(subtype(p, q) for p, q in schema.premises(*args)):
            return True
    return subtype(lhs, rhs)


def sample_arguments(schema: AxiomSchema, rng, max_depth=4) -> list:
    sampler = schema.sampler or _plain_sampler(schema.arity)
    return sampler(rng, max_depth)


def fuzz_schema(name: str, count: int, seed: int = 0, max_depth: int = 4) -> list:
    """Check `count` random instances of one schema; returns the failing instances as text."""
    schema = get_schema(name)
    rng = random.Random(f"{seed}:{schema.name}")
    failures = []
    for _ in range(count):
        args = sample_arguments(schema, rng, max_depth)
        try:
            ok = check_axiom_soundness(schema, args)
        except JoinUndefinedError as e:
            ok = False
            logger.debug(f"join undefined for {schema.name}: {e}")
        if not ok:
            failures.append(f"{schema.name}: " + ", ".join(print_type(a) for a in args))
    if failures:
        logger.warning(f"❌ {schema.name}: {len(failures)}/{count} instances failed")
    else:
        logger.info(f"✓ {schema.name}: {count} instances")
    return failures


def fuzz_schemas(names=None, count=1000, seed=0, max_depth=4) -> dict:
    names = names or list(SCHEMAS)
    return {get_schema(n).name: fuzz_schema(n, count, seed, max_depth) for n in names}
