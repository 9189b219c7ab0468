"""
Rank-1 unification
==================
Rank-1 solutions map every variable to an intersection of simple types
(ground arrow/constant trees), possibly the empty one, omega. Between such
types subtyping is set inclusion, which turns a constraint set into set
constraints with projections over finite sets of simple types.

rank1_transform enumerates the set-constraint systems reachable by the
rewrite rules below. Rules are tried in order; the first rule that applies
to some constraint (leftmost first) is used.

   1  s <= t holds already                      drop it
   2  phi <= 'x, phi simple                     'x = {phi}
   3  'x <= phi, phi simple                     {phi} <= 'x
   4  'x <= 'y                                  'y <= 'x
   5  omega <= t                                no solution
   6  s <= t1 & ... & tk                        s <= ti for every i
   7  a <= s -> t, s -> t <= a, a <= b          no solution
   8  s1 & ... & sk <= ... -> a                 si <= ... -> a for one i
   9  s1 & ... & sk <= ... -> 'x                si <= ... -> 'xi for a subset,
                                                'x = 'x1 | ... | 'xj
  10  s1 -> t1 <= s2 -> t2                      s2 <= s1, t1 <= t2
  11  'x <= s -> t                              s <= 'b, 'g <= t,
                                                'd <= 'x, 'b = src('d), 'g = tgt('d)
  12  omega -> t <= 'x                          t <= 'b, 'x <= 'g -> 'b
  13  (s1 & ... & sk) -> t <= 'x                si -> t <= 'x for every i
  14  (s1 -> ... -> a) -> t <= 'x               si <= 'bi, t <= 'g,
                                                'x <= ('b1 -> ... -> a) -> 'g
  15  (s1 -> ... -> 'd) -> t <= 'x              as 14 with head 'd, card 'd = 1

Rules 5 and 7 prune their branch. Before rewriting, a set of variables is
chosen and replaced by omega; every choice is enumerated, smallest first.

The finite-set solver searches assignments over a universe of spine types
s1 -> ... -> sk -> c, where c is a constant and each si a constant or a
ground source occurring in the system, deepening the spine up to a budget.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from config import BUDGET_CARD, BUDGET_DEPTH, FRESH_PREFIX, MODEL_RETRIES, UNIVERSE_LIMIT
from intertype.constraints import FreshNames, Substitution, apply, constants_of, unif_to_sat, variables_of, verify
from intertype.propositional import FALSE, TRUE, CnfBuilder, Formula, Prop, conj, disj, implies, neg
from intertype.subtyping import beta_indices, subtype
from intertype.type_algebra import (
    OMEGA, Arrow, Const, Inter, Omega, Type, Var, arrow, as_path, components, constants, depth, inter,
    is_omega_equal, is_simple, print_type,
)
from utils import BudgetExceededError, WorkbenchError

logger = logging.getLogger(__name__)


# ─── Normalization ───────────────────────────────────────────────────────────

def normalize(t: Type) -> Type:
    """Organize at every arrow level, sources included, dropping duplicate components."""
    return _normalize(t, {})


def _normalize(t: Type, memo: dict) -> Type:
    found = memo.get(id(t))
    if found is not None:
        return found
    if isinstance(t, Omega):
        result = OMEGA
    elif isinstance(t, Arrow):
        source = _normalize(t.source, memo)
        result = inter(Arrow(source, p) for p in components(_normalize(t.target, memo)))
    elif isinstance(t, Inter):
        unique = {}
        for c in t.components:
            for p in components(_normalize(c, memo)):
                unique.setdefault(p.key, p)
        result = inter(unique.values())
    else:
        result = t
    memo[id(t)] = result
    return result


# ─── Set constraints ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SetEq:
    var: str
    element: Type

    def __str__(self):
        return f"'{self.var} = {{{print_type(self.element)}}}"


@dataclass(frozen=True)
class Empty:
    var: str

    def __str__(self):
        return f"'{self.var} = {{}}"


@dataclass(frozen=True)
class Member:
    element: Type
    var: str

    def __str__(self):
        return f"{{{print_type(self.element)}}} <= '{self.var}"


@dataclass(frozen=True)
class Subset:
    sub: str
    sup: str

    def __str__(self):
        return f"'{self.sub} <= '{self.sup}"


@dataclass(frozen=True)
class Union:
    var: str
    parts: tuple

    def __str__(self):
        return f"'{self.var} = " + " | ".join(f"'{p}" for p in self.parts)


@dataclass(frozen=True)
class Src:
    var: str
    of: str

    def __str__(self):
        return f"'{self.var} = src('{self.of})"


@dataclass(frozen=True)
class Tgt:
    var: str
    of: str

    def __str__(self):
        return f"'{self.var} = tgt('{self.of})"


@dataclass(frozen=True)
class Within:
    """var is a subset of the arrows the pattern builds; pattern variables stand for their elements."""
    var: str
    pattern: Type

    def __str__(self):
        return f"'{self.var} <= {print_type(self.pattern)}"


@dataclass(frozen=True)
class Single:
    var: str

    def __str__(self):
        return f"card '{self.var} = 1"


@dataclass(frozen=True)
class SetConstraintSystem:
    atoms: tuple
    variables: frozenset  # variables of the original constraints

    def set_variables(self) -> list:
        names = set(self.variables)
        for a in self.atoms:
            if isinstance(a, Union):
                names.update(a.parts)
            elif isinstance(a, Within):
                names.add(a.var)
                names.update(_pattern_variables(a.pattern))
            elif isinstance(a, Subset):
                names.update((a.sub, a.sup))
            elif isinstance(a, (Src, Tgt)):
                names.update((a.var, a.of))
            else:
                names.add(a.var)
        return sorted(names)

    def ground_types(self) -> list:
        return [a.element for a in self.atoms if isinstance(a, (SetEq, Member))]

    def constants(self) -> frozenset:
        result = set()
        for a in self.atoms:
            if isinstance(a, (SetEq, Member)):
                result |= constants(a.element)
            elif isinstance(a, Within):
                result |= constants(a.pattern)
        return frozenset(result)

    def __str__(self):
        return format_system(self)


def _pattern_variables(t: Type) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Arrow):
        return _pattern_variables(t.source) | _pattern_variables(t.target)
    return set()


def format_system(system: SetConstraintSystem) -> str:
    return "".join(f"{a}\n" for a in system.atoms)


# ─── Rewrite rules ───────────────────────────────────────────────────────────

ABORT = "abort"


def _rule_holds(l, r, fresh):
    return [((), ())] if subtype(l, r) else None


def _rule_simple_below_var(l, r, fresh):
    if isinstance(r, Var) and is_simple(l):
        return [((), (SetEq(r.name, l),))]
    return None


def _rule_var_below_simple(l, r, fresh):
    if isinstance(l, Var) and is_simple(r):
        return [((), (Member(r, l.name),))]
    return None


def _rule_var_below_var(l, r, fresh):
    if isinstance(l, Var) and isinstance(r, Var):
        return [((), (Subset(r.name, l.name),))]
    return None


def _rule_omega_left(l, r, fresh):
    if isinstance(l, Omega) and not is_omega_equal(r):
        return ABORT
    return None


def _rule_split_right(l, r, fresh):
    if isinstance(r, Inter):
        return [(tuple((l, c) for c in r.components), ())]
    return None


def _rule_clash(l, r, fresh):
    if isinstance(l, Const) and isinstance(r, (Arrow, Const)):
        return ABORT
    if isinstance(l, Arrow) and isinstance(r, Const):
        return ABORT
    return None


def _rule_pick_component(l, r, fresh):
    path = as_path(r)
    if isinstance(l, Inter) and path is not None and isinstance(path.head, Const):
        return [(((c, r),), ()) for c in l.components]
    return None


def _rule_split_head(l, r, fresh):
    path = as_path(r)
    if not (isinstance(l, Inter) and path is not None and isinstance(path.head, Var)):
        return None
    result = []
    indices = range(len(l.components))
    for size in range(1, len(l.components) + 1):
        for chosen in itertools.combinations(indices, size):
            heads = [fresh() for _ in chosen]
            new = tuple((l.components[i], arrow(*path.arguments, h)) for i, h in zip(chosen, heads))
            result.append((new, (Union(path.head.name, tuple(h.name for h in heads)),)))
    return result


def _rule_arrows(l, r, fresh):
    if isinstance(l, Arrow) and isinstance(r, Arrow):
        return [(((r.source, l.source), (l.target, r.target)), ())]
    return None


def _rule_var_below_arrow(l, r, fresh):
    if isinstance(l, Var) and isinstance(r, Arrow):
        b, g, d = fresh(), fresh(), fresh()
        atoms = (Subset(d.name, l.name), Src(b.name, d.name), Tgt(g.name, d.name))
        return [(((r.source, b), (g, r.target)), atoms)]
    return None


def _rule_omega_source(l, r, fresh):
    if isinstance(l, Arrow) and isinstance(r, Var) and isinstance(l.source, Omega):
        b, g = fresh(), fresh()
        return [(((l.target, b),), (Within(r.name, Arrow(g, b)),))]
    return None


def _rule_split_source(l, r, fresh):
    if isinstance(l, Arrow) and isinstance(r, Var) and isinstance(l.source, Inter):
        return [(tuple((Arrow(c, l.target), r) for c in l.source.components), ())]
    return None


def _rule_path_source(l, r, fresh):
    if not (isinstance(l, Arrow) and isinstance(r, Var)):
        return None
    path = as_path(l.source)
    if path is None:
        return None
    betas = [fresh() for _ in path.arguments]
    g = fresh()
    new = tuple(zip(path.arguments, betas)) + ((l.target, g),)
    atoms = (Within(r.name, Arrow(arrow(*betas, path.head), g)),)
    if isinstance(path.head, Var):
        atoms += (Single(path.head.name),)
    return [(new, atoms)]


_RULES = [
    _rule_holds, _rule_simple_below_var, _rule_var_below_simple, _rule_var_below_var, _rule_omega_left,
    _rule_split_right, _rule_clash, _rule_pick_component, _rule_split_head, _rule_arrows,
    _rule_var_below_arrow, _rule_omega_source, _rule_split_source, _rule_path_source,
]


def _rewrite(pending: list, atoms: tuple, fresh: FreshNames) -> Iterator[tuple]:
    if not pending:
        yield atoms
        return
    for rule in _RULES:
        for i, (l, r) in enumerate(pending):
            outcome = rule(l, r, fresh)
            if outcome is None:
                continue
            if outcome == ABORT:
                logger.debug(f"branch pruned at {print_type(l)} <= {print_type(r)}")
                return
            rest = pending[:i] + pending[i + 1:]
            for new, added in outcome:
                yield from _rewrite(rest + list(new), atoms + added, fresh)
            return
    l, r = pending[0]
    raise WorkbenchError(f"no rule applies to {print_type(l)} <= {print_type(r)}")


def rank1_transform(cs: Iterable) -> Iterator[SetConstraintSystem]:
    """Every set-constraint system the rules reach from `cs`; equations count as two inequalities."""
    cs = unif_to_sat(cs)
    names = sorted(variables_of(cs))
    fresh = FreshNames(FRESH_PREFIX)
    fresh.check(names)
    for size in range(len(names) + 1):
        for chosen in itertools.combinations(names, size):
            table = {x: OMEGA for x in chosen}
            pending = [(normalize(apply(table, c.lhs)), normalize(apply(table, c.rhs))) for c in cs]
            start = tuple(Empty(x) for x in chosen)
            for atoms in _rewrite(pending, start, fresh):
                yield SetConstraintSystem(atoms, frozenset(names))


# ─── Finite-set solver ───────────────────────────────────────────────────────

def _subterms(t: Type, out: dict):
    if t.key in out:
        return
    out[t.key] = t
    if isinstance(t, Arrow):
        _subterms(t.source, out)
        _subterms(t.target, out)


def spine_universe(constant_names: Iterable[str], ground: Iterable[Type], max_depth: int) -> list:
    """Spine types of depth <= max_depth plus every subterm of the ground types."""
    consts = [Const(c) for c in sorted(set(constant_names))]
    found = {}
    for g in ground:
        _subterms(g, found)
    sources = {c.key: c for c in consts}
    for u in list(found.values()):
        if isinstance(u, Arrow):
            sources.setdefault(u.source.key, u.source)
    universe = dict(found)
    for s in sources.values():
        _subterms(s, universe)
    layer = list(consts)
    for c in consts:
        universe.setdefault(c.key, c)
    for _ in range(max_depth - 1):
        layer = [Arrow(s, t) for s in sources.values() for t in layer if 1 + max(depth(s), depth(t)) <= max_depth]
        for u in layer:
            universe.setdefault(u.key, u)
        if len(universe) > UNIVERSE_LIMIT:
            raise BudgetExceededError(f"more than {UNIVERSE_LIMIT} candidate types at depth {max_depth}")
    return sorted(universe.values(), key=lambda u: (depth(u), u.key))


def _under(guard: Optional[Formula], f: Formula) -> Formula:
    return f if guard is None else implies(guard, f)


class _SetEncoder:
    """Set atoms as clauses over propositions (var, i): universe[i] is in var.

    Atoms may carry a guard and then only bind when the guard holds.
    """

    def __init__(self, universe: list, cnf: CnfBuilder):
        self.universe = universe
        self.cnf = cnf
        self.index = {u.key: i for i, u in enumerate(universe)}
        self._branches = itertools.count()

    @staticmethod
    def member(name: str, i: int) -> Prop:
        return Prop((name, i))

    def match(self, pattern: Type, u: Type):
        if isinstance(pattern, Var):
            return self.member(pattern.name, self.index[u.key])
        if isinstance(pattern, Const):
            return TRUE if u == pattern else FALSE
        if isinstance(u, Arrow):
            return conj([self.match(pattern.source, u.source), self.match(pattern.target, u.target)])
        return FALSE

    def atom(self, a, guard: Optional[Formula] = None):
        m = self.member
        n = len(self.universe)

        def emit(f):
            self.cnf.require(_under(guard, f))

        if isinstance(a, (SetEq, Member)):
            i = self.index.get(a.element.key)
            if i is None:
                emit(FALSE)
                return
            emit(m(a.var, i))
            if isinstance(a, SetEq):
                for j in range(n):
                    if j != i:
                        emit(neg(m(a.var, j)))
        elif isinstance(a, Empty):
            for j in range(n):
                emit(neg(m(a.var, j)))
        elif isinstance(a, Subset):
            for j in range(n):
                emit(implies(m(a.sub, j), m(a.sup, j)))
        elif isinstance(a, Union):
            for j in range(n):
                emit(implies(m(a.var, j), disj(m(p, j) for p in a.parts)))
                for p in a.parts:
                    emit(implies(m(p, j), m(a.var, j)))
        elif isinstance(a, (Src, Tgt)):
            images = {j: [] for j in range(n)}
            for k, u in enumerate(self.universe):
                if isinstance(u, Arrow):
                    part = u.source if isinstance(a, Src) else u.target
                    j = self.index[part.key]
                    images[j].append(k)
                    emit(implies(m(a.of, k), m(a.var, j)))
            for j, ks in images.items():
                emit(implies(m(a.var, j), disj(m(a.of, k) for k in ks)))
        elif isinstance(a, Within):
            for j, u in enumerate(self.universe):
                emit(implies(m(a.var, j), self.match(a.pattern, u)))
        elif isinstance(a, Single):
            self.cnf.exactly_one([(a.var, j) for j in range(n)], guard)

    def system(self, system: SetConstraintSystem):
        for a in system.atoms:
            self.atom(a)

    def tree(self, alternatives: list, guard: Optional[Formula] = None):
        """One constraint's rewrite tree: at least one alternative holds."""
        if len(alternatives) == 1:
            self.branch(alternatives[0], guard)
            return
        selectors = [Prop(("#branch", next(self._branches))) for _ in alternatives]
        self.cnf.require(_under(guard, disj(selectors)))
        for selector, branch in zip(selectors, alternatives):
            self.branch(branch, selector)

    def branch(self, branch: "_Branch", guard: Optional[Formula]):
        for a in branch.atoms:
            self.atom(a, guard)
        for alternatives in branch.subtrees:
            self.tree(alternatives, guard)


def _encode(system: SetConstraintSystem, universe: list) -> tuple:
    cnf = CnfBuilder()
    _SetEncoder(universe, cnf).system(system)
    keys = [(name, j) for name in system.set_variables() for j in range(len(universe))]
    return cnf, keys


def set_assignments(system: SetConstraintSystem, card: int = BUDGET_CARD, max_depth: int = BUDGET_DEPTH,
                    constant_names: Iterable[str] = ()) -> Iterator[dict]:
    """Assignments of finite sets of simple types, smaller universes and sets first.

    Yields dicts from set variable to a tuple of simple types. Complete only
    up to the budget: every set has at most `card` elements of depth at most
    `max_depth`.
    """
    consts = set(constant_names) | system.constants()
    ground = system.ground_types()
    try:
        top = spine_universe(consts, ground, max_depth)
    except BudgetExceededError as e:
        logger.warning(f"❌ {e}")
        return
    cnf, keys = _encode(system, top)
    if cnf.solve(keys) is None:
        return
    names = system.set_variables()
    seen = set()
    for d in range(1, max_depth + 1):
        universe = spine_universe(consts, ground, d)
        cnf, keys = _encode(system, universe)
        if cnf.solve(keys) is None:
            continue
        for bound in range(1, card + 1):
            extra = []
            for name in names:
                extra.extend(cnf.at_most([(name, j) for j in range(len(universe))], bound))
            for model in cnf.models(keys, extra):
                assignment = _decode(model, names, universe)
                key = tuple((name, tuple(u.key for u in assignment[name])) for name in names)
                if key in seen:
                    continue
                seen.add(key)
                yield assignment


def solve_set_constraints(system: SetConstraintSystem, card: int = BUDGET_CARD,
                          max_depth: int = BUDGET_DEPTH) -> Optional[dict]:
    return next(set_assignments(system, card, max_depth), None)


def _decode(model: frozenset, names: list, universe: list) -> dict:
    return {name: tuple(u for j, u in enumerate(universe) if (name, j) in model) for name in names}


# ─── Rank-1 solutions ────────────────────────────────────────────────────────

@dataclass(frozen=True)
class _Branch:
    atoms: tuple
    subtrees: tuple  # per constraint the branch adds, its list of alternatives


def _rewrite_tree(l: Type, r: Type, fresh: FreshNames) -> list:
    """Alternatives the rules leave for l <= r alone; empty when every branch is pruned.

    Rules rewrite one constraint at a time, so the systems of rank1_transform
    are exactly the choices of one alternative per node of these trees.
    """
    for rule in _RULES:
        outcome = rule(l, r, fresh)
        if outcome is None:
            continue
        if outcome == ABORT:
            logger.debug(f"branch pruned at {print_type(l)} <= {print_type(r)}")
            return []
        result = []
        for new, added in outcome:
            subtrees = tuple(_rewrite_tree(nl, nr, fresh) for nl, nr in new)
            if all(subtrees):
                result.append(_Branch(added, subtrees))
        return result
    raise WorkbenchError(f"no rule applies to {print_type(l)} <= {print_type(r)}")


def _branch_atoms(alternatives: list) -> Iterator:
    for branch in alternatives:
        yield from branch.atoms
        for sub in branch.subtrees:
            yield from _branch_atoms(sub)


def _omega_forests(cs: list) -> Iterator[tuple]:
    """(variables, variables set to omega, one rewrite tree per constraint), in rank1_transform order."""
    names = sorted(variables_of(cs))
    fresh = FreshNames(FRESH_PREFIX)
    fresh.check(names)
    for size in range(len(names) + 1):
        for chosen in itertools.combinations(names, size):
            table = {x: OMEGA for x in chosen}
            forest = []
            for c in cs:
                tree = _rewrite_tree(normalize(apply(table, c.lhs)), normalize(apply(table, c.rhs)), fresh)
                if not tree:
                    break
                forest.append(tree)
            else:
                yield names, chosen, forest


def _solve_forest(cs: list, names: list, chosen: tuple, forest: list, consts: set,
                  card: int, max_depth: int) -> Optional[Substitution]:
    atoms = [a for tree in forest for a in _branch_atoms(tree)]
    ground = [a.element for a in atoms if isinstance(a, (SetEq, Member))]
    consts = set(consts)
    for a in atoms:
        if isinstance(a, (SetEq, Member)):
            consts |= constants(a.element)
        elif isinstance(a, Within):
            consts |= constants(a.pattern)

    def encode(universe):
        cnf = CnfBuilder()
        encoder = _SetEncoder(universe, cnf)
        for x in chosen:
            encoder.atom(Empty(x))
        for tree in forest:
            encoder.tree(tree)
        return cnf, [(name, j) for name in names for j in range(len(universe))]

    try:
        top = spine_universe(consts, ground, max_depth)
    except BudgetExceededError as e:
        logger.warning(f"❌ {e}")
        return None
    encoded = {max_depth: encode(top)}
    if encoded[max_depth][0].solve(encoded[max_depth][1]) is None:
        return None

    for d in range(1, max_depth + 1):
        universe = top if d == max_depth else spine_universe(consts, ground, d)
        cnf, keys = encoded.get(d) or encode(universe)
        if cnf.solve(keys) is None:
            continue
        seen = set()
        for bound in range(1, card + 1):
            extra = []
            for name in names:
                extra.extend(cnf.at_most([(name, j) for j in range(len(universe))], bound))
            rejected = 0
            for model in cnf.models(keys, extra):
                if model in seen:
                    continue
                seen.add(model)
                assignment = _decode(model, names, universe)
                s = Substitution({name: inter(assignment[name]) for name in names})
                if verify(s, cs):
                    return s
                logger.debug(f"❌ candidate {s} fails verification")
                rejected += 1
                if rejected >= MODEL_RETRIES:
                    break
    return None


def solve_rank1(cs: Iterable, card: int = BUDGET_CARD, max_depth: int = BUDGET_DEPTH) -> Optional[Substitution]:
    """A verified rank-1 solution of `cs`, or None if none is found within the budget.

    Every omega choice is solved as one SAT problem in which each rewrite
    alternative is guarded by a selector, instead of system by system.
    Sets of the original variables hold at most `card` types of depth at
    most `max_depth`; the sets of rule-introduced variables are not bounded.
    """
    cs = unif_to_sat(list(cs))
    consts = set(constants_of(cs))
    choices = 0
    for names, chosen, forest in _omega_forests(cs):
        choices += 1
        s = _solve_forest(cs, names, chosen, forest, consts, card, max_depth)
        if s is not None:
            logger.info(f"✓ rank-1 solution with {len(chosen)} of {len(names)} variables set to omega")
            return s
    logger.info(f"no rank-1 solution within budget ({choices} omega choices tried)")
    return None


def is_rank1_substitution(s: Substitution) -> bool:
    return all(all(is_simple(c) for c in components(t)) for t in s.values())


def witness_indices(s: Type, t: Arrow) -> Optional[list]:
    """Indices I' of arrow components of s with (&sources over I') -> (&targets over I') <= t.

    None when s is not below t.
    """
    if not subtype(s, t):
        return None
    chosen = beta_indices(s, t)
    parts = [components(s)[i] for i in chosen]
    joined = Arrow(inter(p.source for p in parts), inter(p.target for p in parts))
    if not subtype(joined, t):
        raise WorkbenchError(f"no index set witnesses {print_type(s)} <= {print_type(t)}")
    return chosen
