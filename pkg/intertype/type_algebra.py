"""
Intersection types
==================
AST, canonical constructors, parsing, printing and organization.

Concrete syntax (see grammar.lark):

  a, b, foo        constants (lowercase identifiers other than ``omega``)
  'x, 'alpha       variables
  omega            the top type
  s -> t           arrow, right associative
  s & t            intersection, binds tighter than ->
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Union

from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from utils import ParseError, ReservedNameError

logger = logging.getLogger(__name__)

RESERVED = "omega"


# ─── AST ─────────────────────────────────────────────────────────────────────

class Type:
    """Common base of all type nodes. Nodes are immutable and hashable."""

    def __str__(self):
        return print_type(self)


def _check_name(kind, name):
    if name == RESERVED:
        raise ReservedNameError(f"'{RESERVED}' cannot be used as a {kind} name")
    if not name:
        raise ReservedNameError(f"empty {kind} name")


@dataclass(frozen=True, repr=False)
class Const(Type):
    name: str

    def __post_init__(self):
        _check_name("constant", self.name)

    @cached_property
    def key(self):
        return (1, self.name)

    def __repr__(self):
        return f"Const({self.name!r})"


@dataclass(frozen=True, repr=False)
class Var(Type):
    name: str

    def __post_init__(self):
        _check_name("variable", self.name)

    @cached_property
    def key(self):
        return (2, self.name)

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class Omega(Type):

    @cached_property
    def key(self):
        return (0,)

    def __repr__(self):
        return "OMEGA"


@dataclass(frozen=True, repr=False)
class Arrow(Type):
    source: Type
    target: Type

    @cached_property
    def key(self):
        return (3, self.source.key, self.target.key)

    def __repr__(self):
        return f"Arrow({self.source!r}, {self.target!r})"


@dataclass(frozen=True, repr=False)
class Inter(Type):
    components: tuple

    def __post_init__(self):
        if len(self.components) < 2:
            raise ValueError("Inter needs at least two components, use inter()")

    @cached_property
    def key(self):
        return (4, tuple(c.key for c in self.components))

    def __repr__(self):
        return f"Inter({list(self.components)!r})"


Atom = Union[Const, Var]

OMEGA = Omega()


# ─── Constructors ────────────────────────────────────────────────────────────

def inter(parts: Iterable[Type]) -> Type:
    """Canonical intersection: flattened, sorted, empty is omega, singleton is itself.

    Duplicates and omega components are kept; organize() drops the latter.
    """
    flat = []
    for p in parts:
        if isinstance(p, Inter):
            flat.extend(p.components)
        else:
            flat.append(p)
    if not flat:
        return OMEGA
    if len(flat) == 1:
        return flat[0]
    flat.sort(key=lambda c: c.key)
    return Inter(tuple(flat))


def arrow(*types: Type) -> Type:
    """arrow(a, b, c) is a -> b -> c."""
    if not types:
        raise ValueError("arrow() needs at least one type")
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


def components(t: Type) -> tuple:
    if isinstance(t, Inter):
        return t.components
    if isinstance(t, Omega):
        return ()
    return (t,)


# ─── Measures ────────────────────────────────────────────────────────────────

def size(t: Type) -> int:
    """Number of syntax tree nodes; a k-fold intersection has k-1 binary nodes."""
    if isinstance(t, Arrow):
        return 1 + size(t.source) + size(t.target)
    if isinstance(t, Inter):
        return len(t.components) - 1 + sum(size(c) for c in t.components)
    return 1


def depth(t: Type) -> int:
    """Arrow nesting depth; atoms have depth 1 and intersections add no level."""
    if isinstance(t, Arrow):
        return 1 + max(depth(t.source), depth(t.target))
    if isinstance(t, Inter):
        return max(depth(c) for c in t.components)
    return 1


def _walk(t: Type) -> Iterator[Type]:
    stack = [t]
    seen = set()
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        if isinstance(node, Arrow):
            stack.append(node.target)
            stack.append(node.source)
        elif isinstance(node, Inter):
            stack.extend(node.components)


def variables(t: Type) -> frozenset:
    return frozenset(n.name for n in _walk(t) if isinstance(n, Var))


def constants(t: Type) -> frozenset:
    return frozenset(n.name for n in _walk(t) if isinstance(n, Const))


def contains_omega(t: Type) -> bool:
    return any(isinstance(n, Omega) for n in _walk(t))


def is_simple(t: Type) -> bool:
    """Ground arrow/constant tree: no variables, no intersections, no omega."""
    while isinstance(t, Arrow):
        if not is_simple(t.source):
            return False
        t = t.target
    return isinstance(t, Const)


def is_rank1(t: Type) -> bool:
    return all(is_simple(c) for c in components(t))


# ─── Paths ───────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Path:
    """arguments[0] -> ... -> arguments[k-1] -> head"""
    arguments: tuple
    head: Atom

    def to_type(self) -> Type:
        return arrow(*self.arguments, self.head)


def as_path(t: Type) -> Optional[Path]:
    args = []
    while isinstance(t, Arrow):
        args.append(t.source)
        t = t.target
    if isinstance(t, (Const, Var)):
        return Path(tuple(args), t)
    return None


def is_organized(t: Type) -> bool:
    if isinstance(t, Omega):
        return True
    return all(as_path(c) is not None for c in components(t))


def paths_of(t: Type) -> list:
    """Paths of an organized type; omega has none."""
    result = []
    for c in components(t):
        p = as_path(c)
        if p is None:
            raise ValueError(f"not organized: {print_type(t)}")
        result.append(p)
    return result


# ─── Omega class and organization ────────────────────────────────────────────

def is_omega_equal(t: Type) -> bool:
    """Syntactic membership in the class of types equal to omega."""
    while isinstance(t, Arrow):
        t = t.target
    if isinstance(t, Omega):
        return True
    if isinstance(t, Inter):
        return all(is_omega_equal(c) for c in t.components)
    return False


def organize(t: Type) -> Type:
    """Equal type that is omega or an intersection of paths.

    Arrow targets are organized and distributed; arrow sources stay as they are.
    """
    return inter(_organized_components(t, {}))


def _organized_components(t: Type, memo: dict) -> list:
    found = memo.get(id(t))
    if found is not None:
        return found
    if isinstance(t, Omega):
        result = []
    elif isinstance(t, Inter):
        result = []
        for c in t.components:
            result.extend(_organized_components(c, memo))
    elif isinstance(t, Arrow):
        targets = _organized_components(t.target, memo)
        if len(targets) == 1 and targets[0] is t.target:
            # already a path; keep the node so shared suffixes stay shared
            result = [t]
        else:
            result = [Arrow(t.source, p) for p in targets]
    else:
        result = [t]
    memo[id(t)] = result
    return result


# ─── Printing ────────────────────────────────────────────────────────────────

_ARROW, _SOURCE, _COMPONENT = 0, 1, 2


def print_type(t: Type) -> str:
    return _show(t, _ARROW)


def _show(t: Type, ctx: int) -> str:
    if isinstance(t, Const):
        return t.name
    if isinstance(t, Var):
        return f"'{t.name}"
    if isinstance(t, Omega):
        return RESERVED
    if isinstance(t, Arrow):
        text = f"{_show(t.source, _SOURCE)} -> {_show(t.target, _ARROW)}"
        return f"({text})" if ctx > _ARROW else text
    text = " & ".join(_show(c, _COMPONENT) for c in t.components)
    return f"({text})" if ctx > _ARROW else text


# ─── Parsing ─────────────────────────────────────────────────────────────────

_parser = Lark.open(
    "grammar.lark",
    rel_to=__file__,
    parser="lalr",
    start=["type", "constraint", "binding", "term"],
)


class TypeBuilder(Transformer):

    def omega(self, _):
        return OMEGA

    def const(self, children):
        return Const(str(children[0]))

    def var(self, children):
        return Var(str(children[0])[1:])

    def arrow(self, children):
        return Arrow(children[0], children[1])

    def intersection(self, children):
        return inter(children)

    def constraint(self, children):
        lhs, relation, rhs = children
        return lhs, str(relation), rhs

    def binding(self, children):
        name, t = children
        return str(name)[1:], t


_BUILDER = TypeBuilder()


def parse_fragment(text: str, start: str, builder: Transformer = None):
    """Parse `text` from the given start symbol and run the builder over it."""
    try:
        tree = _parser.parse(text, start=start)
    except UnexpectedInput as e:
        line, column = getattr(e, "line", -1), getattr(e, "column", -1)
        if line is None or line < 0:
            lines = text.split("\n")
            line, column = len(lines), len(lines[-1]) + 1
        raise ParseError(f"cannot read {start} {text.strip()!r}", line, column) from None
    try:
        return (builder or _BUILDER).transform(tree)
    except VisitError as e:
        raise e.orig_exc from None


def parse_type(text: str) -> Type:
    return parse_fragment(text, "type")


# ─── Random types ────────────────────────────────────────────────────────────

def random_type(rng, max_depth=4, constants=("a", "b", "c"), variables=(), omega_rate=0.1) -> Type:
    """Random type for fuzzing; `rng` is a random.Random."""
    roll = rng.random()
    if max_depth <= 1 or roll < 0.3:
        if rng.random() < omega_rate:
            return OMEGA
        names = [Const(c) for c in constants] + [Var(v) for v in variables]
        return rng.choice(names)
    if roll < 0.75:
        return Arrow(
            random_type(rng, max_depth - 1, constants, variables, omega_rate),
            random_type(rng, max_depth - 1, constants, variables, omega_rate),
        )
    return inter(
        random_type(rng, max_depth - 1, constants, variables, omega_rate)
        for _ in range(rng.randint(2, 3))
    )
