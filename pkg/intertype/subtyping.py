"""
Subtyping for intersection types
================================
Decides s <= t in time quadratic in the size of the inputs:

1. subterms that are equal to omega by their shape become omega,
2. intersections are flattened and omega components dropped,
3. the relation is decided component-wise. For an arrow on the right the
   targets of all left arrows whose source accepts the right source are
   collected and compared against the right target.

Constants and variables are compared the same way, as atoms.
"""

import logging

from intertype.type_algebra import (
    OMEGA, Arrow, Const, Inter, Omega, Type, components, inter, is_omega_equal, paths_of,
)
from utils import JoinUndefinedError

logger = logging.getLogger(__name__)


# ─── Normal form for the decision ────────────────────────────────────────────

def _collapse(t: Type, memo: dict) -> Type:
    found = memo.get(id(t))
    if found is not None:
        return found
    # unchanged subterms keep their identity, so shared parts stay shared
    if isinstance(t, Arrow):
        target = _collapse(t.target, memo)
        if target is OMEGA:
            result = OMEGA
        else:
            source = _collapse(t.source, memo)
            same = source is t.source and target is t.target
            result = t if same else Arrow(source, target)
    elif isinstance(t, Inter):
        parts = []
        for c in t.components:
            c = _collapse(c, memo)
            if isinstance(c, Inter):
                parts.extend(c.components)
            elif c is not OMEGA:
                parts.append(c)
        if not parts:
            result = OMEGA
        elif len(parts) == 1:
            result = parts[0]
        elif len(parts) == len(t.components) and all(p is c for p, c in zip(parts, t.components)):
            result = t
        else:
            result = Inter(tuple(parts))
    elif isinstance(t, Omega):
        result = OMEGA
    else:
        result = t
    memo[id(t)] = result
    return result


def collapse(t: Type) -> Type:
    """Same type with omega-shaped subterms removed and intersections flattened."""
    return _collapse(t, {})


def _chunk(t: Type) -> tuple:
    if isinstance(t, Inter):
        return t.components
    if t is OMEGA:
        return ()
    return (t,)


def _holds_component(chunk: tuple, t: Type, index: dict) -> bool:
    """`t` itself is a component of `chunk`."""
    if len(chunk) < 4:
        return any(c is t for c in chunk)
    # long chunks are component tuples of the input, so the index stays linear in its size
    entry = index.get(id(chunk))
    if entry is None:
        entry = index[id(chunk)] = (chunk, {id(c) for c in chunk})
    return id(t) in entry[1]


def _leq(chunks: list, t: Type, index: dict) -> bool:
    # chunks: the left side as a list of component tuples; appending one is O(1)
    if t is OMEGA:
        return True
    if isinstance(t, Inter):
        if any(chunk is t.components for chunk in chunks):
            return True
        return all(_leq(chunks, c, index) for c in t.components)
    if any(_holds_component(chunk, t, index) for chunk in chunks):
        return True
    if isinstance(t, Arrow):
        source = [_chunk(t.source)]
        collected = []
        for chunk in chunks:
            for c in chunk:
                if isinstance(c, Arrow) and _leq(source, c.source, index):
                    collected.append(_chunk(c.target))
        return bool(collected) and _leq(collected, t.target, index)
    return any(c == t for chunk in chunks for c in chunk)


# ─── Public API ──────────────────────────────────────────────────────────────

def subtype(s: Type, t: Type) -> bool:
    if isinstance(t, Omega):
        return True
    memo = {}
    return _leq([_chunk(_collapse(s, memo))], _collapse(t, memo), {})


def subtype_collapsed(s: Type, t: Type) -> bool:
    """subtype() for arguments that already went through collapse().

    Skips the normalization pass, so repeated queries against one large
    type only pay for the comparison.
    """
    return _leq([_chunk(s)], t, {})


def type_equal(s: Type, t: Type) -> bool:
    return subtype(s, t) and subtype(t, s)


def join_arrows(s: Type, t: Type) -> Type:
    """(s1 -> r) joined with (s2 -> r) is (s1 & s2) -> r."""
    if not isinstance(s, Arrow) or not isinstance(t, Arrow):
        raise JoinUndefinedError(f"join is only defined on arrows, got {s} and {t}")
    if not type_equal(s.target, t.target):
        raise JoinUndefinedError(f"arrow targets differ: {s.target} and {t.target}")
    return Arrow(inter([s.source, t.source]), s.target)


def beta_indices(s: Type, t: Arrow) -> list:
    """Indices of the arrow components of `s` whose source is above t.source."""
    return [
        i for i, c in enumerate(components(s))
        if isinstance(c, Arrow) and not is_omega_equal(c) and subtype(t.source, c.source)
    ]


def subtype_organized(s: Type, t: Type) -> bool:
    """Path-wise check for organized s and t: every path of t is above some path of s."""
    left = [p.to_type() for p in paths_of(s)]
    return all(any(subtype(p, q.to_type()) for p in left) for q in paths_of(t))


# ─── Benchmark family ────────────────────────────────────────────────────────

def _nested(leaves: range, distributed: bool) -> Type:
    if len(leaves) == 1:
        i = leaves[0]
        a, b = Const(f"a{i}"), Const(f"b{i}")
        if distributed:
            return Arrow(Const("p"), inter([a, b]))
        return inter([Arrow(Const("p"), a), Arrow(Const("p"), b)])
    half = len(leaves) // 2
    return inter([
        Arrow(Const("x"), _nested(leaves[:half], distributed)),
        Arrow(Const("y"), _nested(leaves[half:], distributed)),
    ])


def nested_family(k: int) -> tuple:
    """A pair of equal types nesting k leaves in a binary tree of intersections of arrows.

    The left leaves are (p -> a) & (p -> b), the right ones p -> a & b, so
    every arrow on the right goes through target collection. Both sides
    are built separately and share no subterms.
    """
    if k < 1:
        raise ValueError("nested_family needs at least one leaf")
    return _nested(range(k), False), _nested(range(k), True)
