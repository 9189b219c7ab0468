"""
Matching
========
One-sided unification: every constraint has a ground side. NP-hardness is
shown by a reduction from 3-SAT to matching constraints over one variable;
this module builds that image, reads valuations back from solutions and
searches for solutions among intersections of constant towers.

The search is a SAT encoding: proposition (v, i) says that candidate i is a
component of the type substituted for v. A left intersection is
below a path exactly when one of its components is, which turns
every constraint into a propositional formula over these choices.
"""

import itertools
import logging
import re
from dataclasses import dataclass
from typing import Mapping, Optional

from config import BULLET, MODEL_RETRIES, TOWER_DEPTH
from intertype.constraints import (
    EQ, Substitution, constants_of, encode_constants_unary, is_matching, leq, unary_encoding, variables_of, verify,
)
from intertype.propositional import FALSE, TRUE, CnfBuilder, Prop, conj, disj, implies
from intertype.subtyping import subtype
from intertype.type_algebra import Arrow, Const, Inter, Omega, Var, arrow, as_path, inter
from utils import NotMatchingError, ParseError, PreconditionError

logger = logging.getLogger(__name__)

ALPHA = "alpha"
_NAME = re.compile(r"[a-z][A-Za-z0-9_]*$")


# ─── 3-SAT ───────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Sat3Instance:
    variables: tuple
    clauses: tuple  # of 3-tuples of (name, polarity)

    def __post_init__(self):
        for name in self.variables:
            if not _NAME.match(name) or name == "omega":
                raise PreconditionError(f"'{name}' is not usable as a constant name")
        known = set(self.variables)
        for clause in self.clauses:
            if len(clause) != 3:
                raise PreconditionError(f"clause {clause} does not have 3 literals")
            for name, _ in clause:
                if name not in known:
                    raise PreconditionError(f"clause {clause} uses unknown variable {name}")

    def constant_order(self) -> list:
        return [c for x in self.variables for c in (x, negated(x))]


def negated(name: str) -> str:
    return f"not_{name}"


def literal_name(literal: tuple) -> str:
    name, polarity = literal
    return name if polarity else negated(name)


def evaluate(f: Sat3Instance, valuation: Mapping) -> bool:
    return all(any(valuation[x] == p for x, p in clause) for clause in f.clauses)


def brute_force_sat(f: Sat3Instance) -> Optional[dict]:
    for values in itertools.product([False, True], repeat=len(f.variables)):
        valuation = dict(zip(f.variables, values))
        if evaluate(f, valuation):
            return valuation
    return None


def random_3sat(rng, n_variables: int, n_clauses: int) -> Sat3Instance:
    names = tuple(f"x{i}" for i in range(1, n_variables + 1))
    clauses = tuple(
        tuple((rng.choice(names), rng.random() < 0.5) for _ in range(3))
        for _ in range(n_clauses)
    )
    return Sat3Instance(names, clauses)


def parse_dimacs(text: str) -> Sat3Instance:
    """`p cnf V C` header, then clauses of three signed integers ending in 0."""
    header = None
    clauses = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad header {line!r}", number, 1)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"bad header {line!r}", number, 1) from None
            continue
        if header is None:
            raise ParseError("clause before the 'p cnf' header", number, 1)
        try:
            values = [int(v) for v in line.split()]
        except ValueError:
            raise ParseError(f"bad clause {line!r}", number, 1) from None
        if values and values[-1] == 0:
            values = values[:-1]
        if len(values) != 3 or 0 in values or any(abs(v) > header[0] for v in values):
            raise ParseError(f"expected three literals between 1 and {header[0]}", number, 1)
        clauses.append(tuple((f"x{abs(v)}", v > 0) for v in values))
    if header is None:
        raise ParseError("missing 'p cnf' header", 1, 1)
    if len(clauses) != header[1]:
        logger.warning(f"header announces {header[1]} clauses, found {len(clauses)}")
    return Sat3Instance(tuple(f"x{i}" for i in range(1, header[0] + 1)), tuple(clauses))


# ─── The reduction ───────────────────────────────────────────────────────────

def sat3_to_matching(f: Sat3Instance, bullet: Const = Const(BULLET)) -> list:
    """Consistency constraints per variable and validity constraints per clause, all over 'alpha."""
    alpha = Var(ALPHA)
    base = [Const(c) for c in f.constant_order()]
    result = []
    for x in f.variables:
        pos, neg_ = Const(x), Const(negated(x))
        sigma_pos = inter([c for c in base if c != neg_])
        sigma_neg = inter([c for c in base if c != pos])
        lhs = inter([
            arrow(Arrow(sigma_neg, bullet), Arrow(neg_, bullet)),
            arrow(Arrow(sigma_pos, bullet), Arrow(pos, bullet)),
        ])
        result.append(leq(lhs, arrow(Arrow(alpha, bullet), Arrow(alpha, bullet))))
    for clause in f.clauses:
        lhs = inter([Arrow(Const(literal_name(l)), bullet) for l in clause])
        result.append(leq(lhs, Arrow(alpha, bullet)))
    return result


def single_constant_matching(f: Sat3Instance, bullet: Const = Const(BULLET)) -> tuple:
    """The reduction with every literal constant replaced by its unary tower over bullet."""
    order = f.constant_order()
    return encode_constants_unary(sat3_to_matching(f, bullet), order, bullet), unary_encoding(order, bullet)


def extract_valuation(s: Mapping, f: Sat3Instance, table: Optional[Mapping] = None) -> dict:
    """Valuation read off a solution: x is true when S('alpha) <= x.

    `table` maps literal constants to their encodings for the single-constant variant.
    """
    table = table or {}
    cs = sat3_to_matching(f)
    if table:
        cs = encode_constants_unary(cs, f.constant_order())
    if not verify(s, cs):
        raise PreconditionError("substitution does not solve the matching image")
    image = s.get(ALPHA, Var(ALPHA))
    valuation = {}
    for x in f.variables:
        pos = table.get(x, Const(x))
        neg_ = table.get(negated(x), Const(negated(x)))
        if subtype(image, pos):
            valuation[x] = True
        elif subtype(image, neg_):
            valuation[x] = False
        else:
            raise PreconditionError(f"S('{ALPHA}) is below neither {x} nor {negated(x)}")
    return valuation


# ─── Bounded solver ──────────────────────────────────────────────────────────

def candidate_types(constant_names, tower_depth: int) -> list:
    """Constants, then c1 -> c2 -> ... towers of up to `tower_depth` arrows."""
    consts = [Const(c) for c in sorted(constant_names)]
    layer = list(consts)
    result = list(consts)
    for _ in range(tower_depth):
        layer = [Arrow(c, t) for c in consts for t in layer]
        result.extend(layer)
    return result


class _Encoder:
    """Formula for S(lhs) <= S(rhs) when each S(v) is an intersection of candidates."""

    def __init__(self, candidates: list):
        self.candidates = candidates
        self.paths = [as_path(c) for c in candidates]
        self._props = {}
        self._rhs = {}
        self._memo = {}
        self._keep = []

    def prop(self, name: str, i: int) -> Prop:
        key = (name, i)
        found = self._props.get(key)
        if found is None:
            found = self._props[key] = Prop(key)
        return found

    def rhs_paths(self, t) -> list:
        """(arguments, head constant, guard) for every path of S(t)."""
        found = self._rhs.get(id(t))
        if found is not None:
            return found
        if isinstance(t, Omega):
            result = []
        elif isinstance(t, Inter):
            result = [p for c in t.components for p in self.rhs_paths(c)]
        elif isinstance(t, Const):
            result = [((), t, TRUE)]
        elif isinstance(t, Var):
            result = [(p.arguments, p.head, self.prop(t.name, i)) for i, p in enumerate(self.paths)]
        else:
            result = [((t.source,) + args, head, g) for args, head, g in self.rhs_paths(t.target)]
        self._rhs[id(t)] = result
        self._keep.append(t)
        return result

    @staticmethod
    def flat(types) -> list:
        result = []
        for t in types:
            if isinstance(t, Inter):
                result.extend(t.components)
            elif not isinstance(t, Omega):
                result.append(t)
        return result

    def leq(self, lhs: list, t):
        key = (tuple(id(x) for x in lhs), id(t))
        found = self._memo.get(key)
        if found is not None:
            return found
        self._keep.append((lhs, t))
        comps = self.flat(lhs)
        result = conj(
            implies(guard, disj(self.path_leq(c, args, 0, head) for c in comps))
            for args, head, guard in self.rhs_paths(t)
        )
        self._memo[key] = result
        return result

    def path_leq(self, c, args: tuple, k: int, head: Const):
        """S(c) <= args[k] -> ... -> head for a single component c."""
        key = (id(c), id(args), k, head.name)
        found = self._memo.get(key)
        if found is not None:
            return found
        self._keep.append((c, args))
        if isinstance(c, Const):
            result = TRUE if k == len(args) and c == head else FALSE
        elif isinstance(c, Var):
            result = disj(
                conj([self.prop(c.name, i), self.path_leq(phi, args, k, head)])
                for i, phi in enumerate(self.candidates)
            )
        elif k == len(args):
            result = FALSE
        else:
            result = conj([
                self.leq([args[k]], c.source),
                disj(self.path_leq(d, args, k + 1, head) for d in self.flat([c.target])),
            ])
        self._memo[key] = result
        return result


def solve_matching_bounded(cs: list, tower_depth: int = TOWER_DEPTH, max_width: Optional[int] = None,
                           candidates: Optional[list] = None) -> Optional[Substitution]:
    """Solution mapping each variable to at most `max_width` candidates, or None.

    Candidates are the constants of `cs` and their towers up to `tower_depth`
    arrows. Smaller widths are tried first. Not a decision procedure for
    matching in general: solutions outside the candidate space are not seen.
    """
    cs = list(cs)
    if not is_matching(cs):
        raise NotMatchingError("every constraint needs a side without variables")
    names = sorted(variables_of(cs))
    if candidates is None:
        candidates = candidate_types(constants_of(cs), tower_depth)
    if max_width is None:
        max_width = len(candidates)

    encoder = _Encoder(candidates)
    cnf = CnfBuilder()
    for c in cs:
        cnf.require(encoder.leq([c.lhs], c.rhs))
        if c.kind == EQ:
            cnf.require(encoder.leq([c.rhs], c.lhs))
    keys = [(v, i) for v in names for i in range(len(candidates))]
    if cnf.solve(keys) is None:
        logger.info(f"no solution among {len(candidates)} candidates")
        return None

    for width in range(0, max_width + 1):
        extra = []
        for v in names:
            extra.extend(cnf.at_most([(v, i) for i in range(len(candidates))], width))
        for model in itertools.islice(cnf.models(keys, extra), MODEL_RETRIES):
            s = Substitution({
                v: inter(candidates[i] for i in range(len(candidates)) if (v, i) in model)
                for v in names
            })
            if verify(s, cs):
                logger.info(f"✓ solution of width {width}")
                return s
            logger.warning(f"❌ model rejected by verification: {s}")
    return None


def solve_3sat_by_matching(f: Sat3Instance, single_constant: bool = False) -> Optional[dict]:
    """Satisfying valuation found through the matching image, or None."""
    if single_constant:
        cs, table = single_constant_matching(f)
        s = solve_matching_bounded(cs, tower_depth=len(table))
    else:
        cs, table = sat3_to_matching(f), None
        s = solve_matching_bounded(cs)
    if s is None:
        return None
    return extract_valuation(s, f, table)
