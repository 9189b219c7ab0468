"""
Constraint systems and substitutions
====================================
Constraints are `lhs <= rhs` (satisfiability) or `lhs == rhs` (unification).
A substitution maps variable names to types and is applied simultaneously.

File formats:

  constraints    one constraint per line, ``TYPE <= TYPE`` or ``TYPE == TYPE``,
                 ``#`` starts a comment
  substitutions  one binding per line, ``'name := TYPE``
"""

import itertools
import logging
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Iterable, Optional

from config import BULLET, FRESH_PREFIX
from intertype.subtyping import subtype, type_equal
from intertype.type_algebra import (
    Arrow, Const, Inter, Type, TypeBuilder, Var, arrow, constants, inter, parse_fragment, print_type, variables,
)
from utils import ParseError, PreconditionError, UnknownCombinatorError

logger = logging.getLogger(__name__)

LEQ = "<="
EQ = "=="


# ─── Constraints ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Constraint:
    lhs: Type
    rhs: Type
    kind: str = LEQ

    def __str__(self):
        return f"{print_type(self.lhs)} {self.kind} {print_type(self.rhs)}"


def leq(lhs: Type, rhs: Type) -> Constraint:
    return Constraint(lhs, rhs, LEQ)


def eq(lhs: Type, rhs: Type) -> Constraint:
    return Constraint(lhs, rhs, EQ)


def variables_of(cs: Iterable[Constraint]) -> frozenset:
    result = set()
    for c in cs:
        result |= variables(c.lhs) | variables(c.rhs)
    return frozenset(result)


def constants_of(cs: Iterable[Constraint]) -> frozenset:
    result = set()
    for c in cs:
        result |= constants(c.lhs) | constants(c.rhs)
    return frozenset(result)


def is_matching(cs: Iterable[Constraint]) -> bool:
    """Every constraint has a side without variables."""
    return all(not variables(c.lhs) or not variables(c.rhs) for c in cs)


# ─── Substitutions ───────────────────────────────────────────────────────────

class Substitution(Mapping):
    """Finite map from variable names (without the apostrophe) to types."""

    def __init__(self, mapping=None):
        self._map = dict(mapping or {})

    def __getitem__(self, name):
        return self._map[name]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __repr__(self):
        body = ", ".join(f"'{k} := {print_type(v)}" for k, v in sorted(self._map.items()))
        return f"Substitution({body})"


def _rebuild(t: Type, leaf, memo: dict) -> Type:
    found = memo.get(id(t))
    if found is not None:
        return found
    if isinstance(t, Arrow):
        source, target = _rebuild(t.source, leaf, memo), _rebuild(t.target, leaf, memo)
        result = t if source is t.source and target is t.target else Arrow(source, target)
    elif isinstance(t, Inter):
        parts = [_rebuild(c, leaf, memo) for c in t.components]
        result = t if all(p is c for p, c in zip(parts, t.components)) else inter(parts)
    else:
        result = leaf(t)
    memo[id(t)] = result
    return result


def apply(s: Mapping, t: Type) -> Type:
    if not s:
        return t
    return _rebuild(t, lambda a: s.get(a.name, a) if isinstance(a, Var) else a, {})


def replace_constants(t: Type, table: Mapping) -> Type:
    return _rebuild(t, lambda a: table.get(a.name, a) if isinstance(a, Const) else a, {})


def holds(s: Mapping, c: Constraint) -> bool:
    lhs, rhs = apply(s, c.lhs), apply(s, c.rhs)
    if c.kind == EQ:
        return type_equal(lhs, rhs)
    return subtype(lhs, rhs)


def verify(s: Mapping, cs: Iterable[Constraint]) -> bool:
    for i, c in enumerate(cs):
        if not holds(s, c):
            logger.debug(f"constraint {i + 1} fails: {c}")
            return False
    return True


# ─── Interreductions ─────────────────────────────────────────────────────────

def sat_to_unif(cs: Iterable[Constraint]) -> list:
    """s <= t holds exactly when s & t == s does."""
    result = []
    for c in cs:
        if c.kind != LEQ:
            raise PreconditionError(f"expected a <= constraint, got {c}")
        result.append(eq(inter([c.lhs, c.rhs]), c.lhs))
    return result


def unif_to_sat(cs: Iterable[Constraint]) -> list:
    result = []
    for c in cs:
        if c.kind == EQ:
            result.extend([leq(c.lhs, c.rhs), leq(c.rhs, c.lhs)])
        else:
            result.append(c)
    return result


def pack_single(cs: Iterable[Constraint], bullet: Const = Const(BULLET)) -> Constraint:
    """One <= constraint with the same solutions as the whole set.

    Each constraint s <= t becomes an argument pair: (t, s) when only t is
    ground, (s -> bullet, t -> bullet) otherwise. Contravariance turns the
    argument pairs back into the original constraints. For matching input
    the packed left side is ground.
    """
    left, right = [], []
    for c in cs:
        if c.kind != LEQ:
            raise PreconditionError(f"expected a <= constraint, got {c}")
        if variables(c.lhs) and not variables(c.rhs):
            left.append(c.rhs)
            right.append(c.lhs)
        else:
            left.append(Arrow(c.lhs, bullet))
            right.append(Arrow(c.rhs, bullet))
    return leq(arrow(*left, bullet), arrow(*right, bullet))


def unary_tower(i: int, bullet: Const = Const(BULLET)) -> Type:
    """bullet -> ... -> bullet with i arrows."""
    return arrow(*([bullet] * (i + 1)))


def unary_encoding(order: list, bullet: Const = Const(BULLET)) -> dict:
    return {name: unary_tower(i, bullet) for i, name in enumerate(order, start=1)}


def encode_constants_unary(cs: Iterable[Constraint], order: Optional[list] = None,
                           bullet: Const = Const(BULLET)) -> list:
    """Replace the i-th constant of `order` by unary_tower(i); bullet is kept."""
    cs = list(cs)
    if order is None:
        order = sorted(constants_of(cs) - {bullet.name})
    if bullet.name in order:
        raise PreconditionError(f"'{bullet.name}' is the encoding constant and cannot be encoded")
    table = unary_encoding(order, bullet)
    return [Constraint(replace_constants(c.lhs, table), replace_constants(c.rhs, table), c.kind) for c in cs]


# ─── Combinator terms ────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Comb:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    function: object
    argument: object

    def __str__(self):
        arg = f"({self.argument})" if isinstance(self.argument, App) else str(self.argument)
        return f"{self.function} {arg}"


class TermBuilder(TypeBuilder):

    def combinator(self, children):
        return Comb(str(children[0]))

    def application(self, children):
        return App(children[0], children[1])


def parse_term(text: str):
    return parse_fragment(text, "term", TermBuilder())


class FreshNames:
    """Source of variables no input may use; one instance per derivation."""

    def __init__(self, prefix: str = FRESH_PREFIX):
        self.prefix = prefix
        self._counter = itertools.count()

    def __call__(self) -> Var:
        return Var(f"{self.prefix}{next(self._counter)}")

    def check(self, names: Iterable[str]):
        clashes = sorted(n for n in names if n.startswith(self.prefix))
        if clashes:
            raise PreconditionError(f"variable names reserved for fresh variables: {clashes}")


def typability_constraints(term, basis: Mapping, goal: Optional[Type] = None,
                           fresh: Optional[FreshNames] = None) -> list:
    """Constraints solvable exactly when `term` has type `goal` without intersection introduction.

    Leaves give `basis[F] <= goal`; an application E1 E2 gives the constraints
    of E1 against 'a -> 'b and of E2 against 'a plus 'b <= goal, with fresh
    'a and 'b. Without a goal a fresh variable is used.
    """
    fresh = fresh or FreshNames()
    seen = {}
    for name, t in basis.items():
        names = variables(t)
        fresh.check(names)
        for other, other_names in seen.items():
            if names & other_names:
                raise PreconditionError(f"basis types of {other} and {name} share variables")
        seen[name] = names
    if goal is None:
        goal = fresh()
    else:
        fresh.check(variables(goal))
    result = []
    _typability(term, basis, goal, fresh, result)
    return result


def _typability(term, basis, goal, fresh, out):
    if isinstance(term, Comb):
        if term.name not in basis:
            raise UnknownCombinatorError(f"no type for combinator {term.name}")
        out.append(leq(basis[term.name], goal))
        return
    a, b = fresh(), fresh()
    _typability(term.function, basis, Arrow(a, b), fresh, out)
    _typability(term.argument, basis, a, fresh, out)
    out.append(leq(b, goal))


# ─── Files ───────────────────────────────────────────────────────────────────

class _ConstraintBuilder(TypeBuilder):

    def constraint(self, children):
        lhs, relation, rhs = children
        return Constraint(lhs, rhs, str(relation))


_CONSTRAINT_BUILDER = _ConstraintBuilder()


def _lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if line.strip():
            yield number, line


def _parse_line(line: str, number: int, start: str, builder=None):
    try:
        return parse_fragment(line, start, builder)
    except ParseError as e:
        raise ParseError(f"cannot read {start} {line.strip()!r}", number, e.column) from None


def parse_constraint(text: str) -> Constraint:
    return parse_fragment(text, "constraint", _CONSTRAINT_BUILDER)


def parse_constraints(text: str) -> list:
    return [_parse_line(line, n, "constraint", _CONSTRAINT_BUILDER) for n, line in _lines(text)]


def format_constraints(cs: Iterable[Constraint]) -> str:
    return "".join(f"{c}\n" for c in cs)


def parse_substitution(text: str) -> Substitution:
    mapping = {}
    for n, line in _lines(text):
        name, t = _parse_line(line, n, "binding")
        if name in mapping:
            raise ParseError(f"variable '{name} bound twice", n, 1)
        mapping[name] = t
    return Substitution(mapping)


def format_substitution(s: Mapping) -> str:
    return "".join(f"'{name} := {print_type(s[name])}\n" for name in sorted(s))
