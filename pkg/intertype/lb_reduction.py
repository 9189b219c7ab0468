"""
Tiling games as constraint satisfiability
=========================================
Builds, for a tiling system, constraint sets that are satisfiable exactly
when Constructor wins the spiral game, and translates in both directions:
winning strategies compile into solutions, and solutions play the game.

A position (tile sequence) w is encoded as the path [w] with the last tile
outermost: [] = bullet and [w d] = d -> [w]. In a solution, 'alpha covers
every short position and 'beta_d collects the positions where Constructor
plays d. Two variants exist: "ct" uses omega to skip tiles, "ct-prime"
spells the skipped tiles out through 'gamma_d_i variables and is omega-free.
"""

import logging
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from config import BULLET, MAX_COMPONENTS, MAX_SPAN, MAX_TILES, SEED
from intertype.constraints import Substitution, apply, encode_constants_unary, eq, leq
from intertype.subtyping import collapse, subtype_collapsed
from intertype.tiling_games import LeafReason, PlayOutcome, StrategyTree, TilingSystem, validate_strategy
from intertype.type_algebra import OMEGA, Arrow, Const, Type, Var, arrow, as_path, components, inter, organize
from utils import BudgetExceededError, ExtractionError, PreconditionError

logger = logging.getLogger(__name__)

CT = "ct"
CT_PRIME = "ct-prime"
VARIANTS = (CT, CT_PRIME)

ALPHA = "alpha"


def beta_name(d: str) -> str:
    return f"beta_{d}"


def gamma_name(d: str, i: int) -> str:
    return f"gamma_{d}_{i}"


# ─── Positions ───────────────────────────────────────────────────────────────

class PositionTypes:
    """[w] for tile sequences w; a sequence and its extensions share the suffix object."""

    def __init__(self, bullet: Const = Const(BULLET)):
        self._cache = {(): bullet}
        self._tiles = {}

    def tile(self, d: str) -> Const:
        found = self._tiles.get(d)
        if found is None:
            found = self._tiles[d] = Const(d)
        return found

    def __call__(self, seq: Iterable[str]) -> Type:
        seq = tuple(seq)
        found = self._cache.get(seq)
        if found is None:
            found = self._cache[seq] = Arrow(self.tile(seq[-1]), self(seq[:-1]))
        return found

    def up_to(self, tiles: tuple, length: int) -> list:
        """[s] for every sequence s over `tiles` with at most `length` tiles."""
        layer = [()]
        result = [self(())]
        for _ in range(length):
            layer = [s + (d,) for s in layer for d in tiles]
            result.extend(self(s) for s in layer)
        return result


def position_type(seq: Iterable[str], bullet: Const = Const(BULLET)) -> Type:
    return PositionTypes(bullet)(seq)


# ─── Constraint sets ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Gadgets:
    """The named parts of the constraint sets; `top_h` and `top_v` sit left of constraints (ii) and (iii)."""
    sigma_b: Type
    sigma_t: Type
    bot_h: Type
    bot_v: Type
    top_h: Type
    top_v: Type


def _check_system(t: TilingSystem, bullet: Const):
    if bullet.name in t.tiles:
        raise PreconditionError(f"tile '{bullet.name}' clashes with the position encoding")
    if not t.h_consistent(t.bottom) or not t.h_consistent(t.top):
        raise PreconditionError("bottom and top rows must be H-consistent")


def reduction_gadgets(t: TilingSystem, variant: str = CT, bullet: Const = Const(BULLET)) -> Gadgets:
    _check_system(t, bullet)
    alpha = Var(ALPHA)
    c = {d: Const(d) for d in t.tiles}
    top = [c[d] for d in reversed(t.top)]
    complement_h = [p for p in t.pairs() if p not in t.h]
    complement_v = [p for p in t.pairs() if p not in t.v]
    skip = [OMEGA] * (t.n - 1)
    sigma_b = PositionTypes(bullet)(t.bottom)
    bot_h = inter(arrow(c[e], c[d], alpha) for d, e in complement_h)
    top_h = inter(arrow(c[d], c[e], alpha) for e, d in t.h)
    if variant == CT:
        sigma_t = inter([arrow(*top, alpha), Arrow(OMEGA, arrow(*top, alpha))])
        bot_v = inter(arrow(c[e], *skip, c[d], alpha) for d, e in complement_v)
        top_v = inter(arrow(c[d], *skip, c[e], alpha) for e, d in t.v)
    elif variant == CT_PRIME:
        sigma_t = inter([arrow(*top, alpha)] + [arrow(c[e], *top, alpha) for e in t.tiles])
        bot_v = inter(Arrow(c[e], Var(gamma_name(d, t.n))) for d, e in complement_v)
        top_v = inter(Arrow(c[d], Var(gamma_name(e, t.n))) for e, d in t.v)
    else:
        raise PreconditionError(f"unknown variant '{variant}', expected one of {VARIANTS}")
    return Gadgets(sigma_b, sigma_t, bot_h, bot_v, top_h, top_v)


def _game_constraints(t: TilingSystem, g: Gadgets) -> list:
    betas = {d: Var(beta_name(d)) for d in t.tiles}
    c = {d: Const(d) for d in t.tiles}
    lhs = inter(
        list(components(g.bot_h)) + list(components(g.bot_v)) + list(components(g.sigma_t))
        + [betas[d] for d in t.tiles]
    )
    rhs = inter([g.sigma_b] + [arrow(c[e], c[d], betas[d]) for e in t.tiles for d in t.tiles])
    moves = inter(Arrow(c[d], betas[d]) for d in t.tiles)
    return [leq(lhs, rhs), leq(g.top_h, moves), leq(g.top_v, moves)]


def build_CT(t: TilingSystem, bullet: Const = Const(BULLET)) -> list:
    """Three constraints: the game moves (i), H-legal moves (ii) and V-legal moves (iii)."""
    return _game_constraints(t, reduction_gadgets(t, CT, bullet))


def build_CT_prime(t: TilingSystem, bullet: Const = Const(BULLET)) -> list:
    """The omega-free variant; 'gamma_d_i stands for d preceded by i-1 arbitrary tiles.

    Empty H or V leaves Constructor without a legal move, so the game is won
    only when the bottom row is the top row. That case gives the empty set and
    every other one the unsolvable bullet <= bullet -> bullet.
    """
    if not t.h or not t.v:
        _check_system(t, bullet)
        return [] if t.bottom == t.top else [leq(bullet, Arrow(bullet, bullet))]
    result = _game_constraints(t, reduction_gadgets(t, CT_PRIME, bullet))
    alpha = Var(ALPHA)
    for d in t.tiles:
        result.append(eq(Var(gamma_name(d, 1)), Arrow(Const(d), alpha)))
    for d in t.tiles:
        for i in range(2, t.n + 1):
            previous = Var(gamma_name(d, i - 1))
            result.append(eq(Var(gamma_name(d, i)), inter(Arrow(Const(e), previous) for e in t.tiles)))
    return result


def build_constraints(t: TilingSystem, variant: str = CT, bullet: Const = Const(BULLET)) -> list:
    if variant == CT:
        return build_CT(t, bullet)
    if variant == CT_PRIME:
        return build_CT_prime(t, bullet)
    raise PreconditionError(f"unknown variant '{variant}', expected one of {VARIANTS}")


def encode_tiles_unary(cs: list, t: TilingSystem, bullet: Const = Const(BULLET)) -> list:
    """Constraints over the single constant bullet; tile i becomes a tower of i arrows."""
    return encode_constants_unary(cs, list(t.tiles), bullet)


# ─── Strategies to solutions ─────────────────────────────────────────────────

def alpha_component_count(t: TilingSystem, tree: StrategyTree) -> int:
    span = tree.depth + t.n
    return sum(len(t.tiles) ** k for k in range(span + 1))


def strategy_substitution(t: TilingSystem, tree: StrategyTree, variant: str = CT,
                          bullet: Const = Const(BULLET)) -> Substitution:
    """The substitution a strategy tree describes, without checking the tree."""
    positions = PositionTypes(bullet)
    s_alpha = inter(positions.up_to(t.tiles, tree.depth + t.n))
    mapping = {ALPHA: s_alpha}
    for d in t.tiles:
        mapping[beta_name(d)] = inter(
            positions(t.bottom + s) for s, node in tree.nodes.items() if node.move == d
        )
    if variant == CT_PRIME:
        for d in t.tiles:
            # factored: gamma_d_i shares gamma_d_(i-1) instead of spelling out every prefix
            current = Arrow(positions.tile(d), s_alpha)
            mapping[gamma_name(d, 1)] = current
            for i in range(2, t.n + 1):
                current = inter(Arrow(positions.tile(e), current) for e in t.tiles)
                mapping[gamma_name(d, i)] = current
    return Substitution(mapping)


def compile_strategy(t: TilingSystem, tree: StrategyTree, variant: str = CT, allow_large: bool = False,
                     max_components: int = MAX_COMPONENTS, bullet: Const = Const(BULLET)) -> Substitution:
    """Solution of build_constraints(t, variant) from a winning strategy.

    'alpha gets every position of at most depth + n tiles, so the result
    grows exponentially; the configured span, tile and size limits apply
    unless `allow_large` is set.
    """
    validate_strategy(t, tree)
    if variant not in VARIANTS:
        raise PreconditionError(f"unknown variant '{variant}', expected one of {VARIANTS}")
    _check_system(t, bullet)
    count = alpha_component_count(t, tree)
    if not allow_large:
        if tree.depth + t.n > MAX_SPAN:
            raise BudgetExceededError(f"depth + width is {tree.depth + t.n}, limit {MAX_SPAN}")
        if len(t.tiles) > MAX_TILES:
            raise BudgetExceededError(f"{len(t.tiles)} tiles, limit {MAX_TILES}")
        if count > max_components:
            raise BudgetExceededError(f"'{ALPHA} would have {count} components, limit {max_components}")
    s = strategy_substitution(t, tree, variant, bullet)
    logger.info(f"✓ compiled strategy of depth {tree.depth} into '{ALPHA} with {count} components")
    return s


# ─── Solutions to plays ──────────────────────────────────────────────────────

Spoiler = Callable[[tuple, tuple], str]


def first_tile_spoiler(position: tuple, tiles: tuple) -> str:
    return tiles[0]


class RandomSpoiler:

    def __init__(self, seed: int = SEED):
        self.rng = random.Random(seed)

    def __call__(self, position: tuple, tiles: tuple) -> str:
        return self.rng.choice(tiles)


class ScriptedSpoiler:
    """Plays the given tiles in order."""

    def __init__(self, moves: Iterable[str]):
        self._moves = iter(moves)

    def __call__(self, position: tuple, tiles: tuple) -> str:
        move = next(self._moves, None)
        if move is None:
            raise ExtractionError("Spoiler script exhausted before the game ended")
        if move not in tiles:
            raise PreconditionError(f"unknown tile '{move}' in Spoiler script")
        return move


class PlayExtractor:
    """Plays Constructor from a solution of the constraint set.

    At a position w Constructor has won if S(bot_h), S(bot_v) or S(sigma_t)
    is below [w]; otherwise Constructor plays a tile d with S(beta_d) below [w].
    Positions cannot outgrow the longest path in the organized right side of
    constraint (i), which bounds every play.
    """

    def __init__(self, t: TilingSystem, s: Mapping, variant: str = CT, bullet: Const = Const(BULLET)):
        self.t = t
        self.positions = PositionTypes(bullet)
        gadgets = reduction_gadgets(t, variant, bullet)
        images = dict(s)
        for name in [ALPHA] + [beta_name(d) for d in t.tiles]:
            if name in images:
                images[name] = organize(images[name])
        self._checks = [
            (LeafReason.H_VIOLATION, collapse(apply(images, gadgets.bot_h))),
            (LeafReason.V_VIOLATION, collapse(apply(images, gadgets.bot_v))),
            (LeafReason.FINISHED, collapse(apply(images, gadgets.sigma_t))),
        ]
        self._moves = [(d, collapse(apply(images, Var(beta_name(d))))) for d in t.tiles]
        rhs = apply(images, _game_constraints(t, gadgets)[0].rhs)
        self.bound = max((len(as_path(p).arguments) for p in components(organize(rhs))), default=0)

    def decide(self, position: tuple):
        """(leaf reason, None) if Constructor has won at `position`, else (None, move)."""
        if len(position) > self.bound:
            raise ExtractionError(f"position of {len(position)} tiles exceeds the bound {self.bound}")
        w = self.positions(position)
        for reason, image in self._checks:
            if subtype_collapsed(image, w):
                if reason is LeafReason.FINISHED and position[-self.t.n:] != self.t.top:
                    reason = LeafReason.LATE_MOVE
                return reason, None
        for d, image in self._moves:
            if subtype_collapsed(image, w):
                return None, d
        raise ExtractionError(f"no case applies at {' '.join(position)}; is the substitution a solution?")

    def play(self, spoiler: Spoiler) -> PlayOutcome:
        position = self.t.bottom
        while True:
            reason, move = self.decide(position)
            if reason is not None:
                return PlayOutcome(reason, position[self.t.n:])
            position = position + (move,)
            position = position + (spoiler(position, self.t.tiles),)

    def playouts(self) -> list:
        """Outcomes against every Spoiler, one per distinct play."""
        result = []
        self._explore(self.t.bottom, result)
        return result

    def _explore(self, position: tuple, result: list):
        reason, move = self.decide(position)
        if reason is not None:
            result.append(PlayOutcome(reason, position[self.t.n:]))
            return
        for d in self.t.tiles:
            self._explore(position + (move, d), result)


def extract_play(t: TilingSystem, s: Mapping, spoiler: Spoiler = first_tile_spoiler,
                 variant: str = CT) -> PlayOutcome:
    """Constructor's play read off a solution `s` of build_constraints(t, variant).

    `s` is not verified here; a non-solution surfaces as ExtractionError.
    """
    outcome = PlayExtractor(t, s, variant).play(spoiler)
    logger.info(f"✓ Constructor wins ({outcome.reason.value}) after {len(outcome.moves)} tiles")
    return outcome


def exhaustive_playouts(t: TilingSystem, s: Mapping, variant: str = CT) -> list:
    return PlayExtractor(t, s, variant).playouts()
