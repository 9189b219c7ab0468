"""
Propositional encoding
======================
Small formula trees over hashable keys, turned into CNF with a Tseitin
encoding and solved with a pysat backend. The bounded searches of the
matching and rank-1 modules are written against this module.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Iterable, Iterator, Optional

from pysat.card import CardEnc, EncType
from pysat.formula import IDPool
from pysat.solvers import Solver

from config import SAT_SOLVER, SAT_SOLVER_CANDIDATES
from utils import WorkbenchError

logger = logging.getLogger(__name__)


# ─── Formulas ────────────────────────────────────────────────────────────────

class Formula:
    pass


@dataclass(frozen=True, eq=False)
class Prop(Formula):
    key: Hashable


@dataclass(frozen=True, eq=False)
class Not(Formula):
    part: Formula


@dataclass(frozen=True, eq=False)
class And(Formula):
    parts: tuple


@dataclass(frozen=True, eq=False)
class Or(Formula):
    parts: tuple


TRUE = And(())
FALSE = Or(())


def conj(parts: Iterable[Formula]) -> Formula:
    flat = []
    for p in parts:
        if p is FALSE:
            return FALSE
        if isinstance(p, And):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat)) if flat else TRUE


def disj(parts: Iterable[Formula]) -> Formula:
    flat = []
    for p in parts:
        if p is TRUE:
            return TRUE
        if isinstance(p, Or):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat)) if flat else FALSE


def neg(f: Formula) -> Formula:
    if f is TRUE:
        return FALSE
    if f is FALSE:
        return TRUE
    if isinstance(f, Not):
        return f.part
    return Not(f)


def implies(a: Formula, b: Formula) -> Formula:
    return disj([neg(a), b])


# ─── Solver backend ──────────────────────────────────────────────────────────

@lru_cache(maxsize=None)
def solver_name() -> str:
    candidates = SAT_SOLVER_CANDIDATES if SAT_SOLVER == "auto" else [SAT_SOLVER]
    for name in candidates:
        try:
            s = Solver(name=name)
            s.delete()
            logger.debug(f"SAT backend: {name}")
            return name
        except Exception:
            continue
    raise WorkbenchError(f"no usable SAT solver among {candidates}")


# ─── CNF builder ─────────────────────────────────────────────────────────────

class CnfBuilder:
    """Collects clauses over named propositions.

    Keys passed to var() name the propositions of interest; auxiliary
    variables introduced by the encoding live in a separate namespace.
    """

    def __init__(self):
        self.pool = IDPool()
        self.clauses = []
        self.inconsistent = False
        self._aux = itertools.count()
        self._memo = {}

    def var(self, key: Hashable) -> int:
        return self.pool.id(("p", key))

    def _fresh(self) -> int:
        return self.pool.id(("aux", next(self._aux)))

    def literal(self, f: Formula) -> int:
        """Literal equivalent to f, adding the defining clauses on first use."""
        found = self._memo.get(id(f))
        if found is not None:
            return found[1]
        if isinstance(f, Prop):
            lit = self.var(f.key)
        elif isinstance(f, Not):
            lit = -self.literal(f.part)
        else:
            parts = [self.literal(p) for p in f.parts]
            lit = self._fresh()
            if isinstance(f, And):
                self.clauses.extend([-lit, p] for p in parts)
                self.clauses.append([lit] + [-p for p in parts])
            else:
                self.clauses.append([-lit] + parts)
                self.clauses.extend([lit, -p] for p in parts)
        self._memo[id(f)] = (f, lit)
        return lit

    def require(self, f: Formula):
        if isinstance(f, And):
            for p in f.parts:
                self.require(p)
        elif isinstance(f, Or):
            if not f.parts:
                self.inconsistent = True
                return
            self.clauses.append([self.literal(p) for p in f.parts])
        else:
            self.clauses.append([self.literal(f)])

    def at_most(self, keys: list, bound: int) -> list:
        """Clauses allowing at most `bound` of the propositions; returned, not added."""
        lits = [self.var(k) for k in keys]
        if bound >= len(lits):
            return []
        if bound <= 0:
            return [[-l] for l in lits]
        return CardEnc.atmost(lits, bound=bound, vpool=self.pool, encoding=EncType.seqcounter).clauses

    def exactly_one(self, keys: list, guard: Optional[Formula] = None):
        """Exactly one of the propositions; only when `guard` holds, if one is given."""
        lits = [self.var(k) for k in keys]
        head = [] if guard is None else [-self.literal(guard)]
        if not lits:
            if guard is None:
                self.inconsistent = True
            else:
                self.clauses.append(head)
            return
        clauses = CardEnc.equals(lits, bound=1, vpool=self.pool, encoding=EncType.pairwise).clauses
        self.clauses.extend(head + c for c in clauses)

    def decode(self, model: list, keys: Iterable[Hashable]) -> frozenset:
        true = {l for l in model if l > 0}
        return frozenset(k for k in keys if self.var(k) in true)

    def models(self, keys: list, extra: Optional[list] = None) -> Iterator[frozenset]:
        """Models projected on `keys`, each one blocked before the next is searched."""
        if self.inconsistent:
            return
        lits = [self.var(k) for k in keys]
        with Solver(name=solver_name(), bootstrap_with=self.clauses + (extra or [])) as solver:
            while solver.solve():
                model = solver.get_model()
                true = {l for l in model if l > 0}
                yield frozenset(k for k, l in zip(keys, lits) if l in true)
                # propositions the solver never saw are false in every model
                known = {abs(l) for l in model}
                block = [-l if l in true else l for l in lits if l in known]
                if not block:
                    return
                solver.add_clause(block)

    def solve(self, keys: list, extra: Optional[list] = None) -> Optional[frozenset]:
        return next(self.models(keys, extra), None)
