"""
Tiling systems and two-player tiling games
==========================================
A tiling system (D, H, V, bottom, top, n) constrains horizontally adjacent
tiles by H and tiles n positions apart (vertically adjacent in a corridor)
by V. In the spiral game Constructor and Spoiler alternately append tiles to
the bottom row, Constructor first. Constructor wins when Spoiler breaks H or
V, when the sequence ends with the top row, or when Spoiler moves after
that already happened.

Tiling file format:

    tiles: a b
    h: a b          one pair per line, or "h: all" for every pair
    v: all
    bottom: a a a
    top: b b b
    n: 3
"""

import enum
import itertools
import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from config import PAD_TILE
from utils import DimensionError, InvalidStrategyError, ParseError, PreconditionError

logger = logging.getLogger(__name__)

_TILE = re.compile(r"[a-z][A-Za-z0-9_]*$")


# ─── Tiling systems ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class TilingSystem:
    tiles: tuple
    h: frozenset
    v: frozenset
    bottom: tuple
    top: tuple
    n: int

    def __post_init__(self):
        object.__setattr__(self, "tiles", tuple(sorted(set(self.tiles))))
        object.__setattr__(self, "h", frozenset(self.h))
        object.__setattr__(self, "v", frozenset(self.v))
        object.__setattr__(self, "bottom", tuple(self.bottom))
        object.__setattr__(self, "top", tuple(self.top))
        if self.n < 1:
            raise DimensionError(f"width must be positive, got {self.n}")
        if len(self.bottom) != self.n or len(self.top) != self.n:
            raise DimensionError(f"bottom and top rows need {self.n} tiles")
        if not self.tiles:
            raise PreconditionError("a tiling system needs at least one tile")
        for d in self.tiles:
            if not _TILE.match(d) or d == "omega":
                raise PreconditionError(f"'{d}' is not a valid tile name")
        known = set(self.tiles)
        used = set(self.bottom) | set(self.top)
        for pair in self.h | self.v:
            used |= set(pair)
        if not used <= known:
            raise PreconditionError(f"unknown tiles {sorted(used - known)}")

    def pairs(self) -> list:
        return [(d, e) for d in self.tiles for e in self.tiles]

    def h_consistent(self, row: Iterable[str]) -> bool:
        row = list(row)
        return all((x, y) in self.h for x, y in zip(row, row[1:]))


def all_pairs(tiles) -> frozenset:
    return frozenset(itertools.product(tiles, repeat=2))


def parse_tiling(text: str) -> TilingSystem:
    fields = {"h": [], "v": []}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key, words = key.strip().lower(), value.split()
        if not sep or key not in ("tiles", "h", "v", "bottom", "top", "n"):
            raise ParseError(f"expected 'tiles:', 'h:', 'v:', 'bottom:', 'top:' or 'n:', got {line!r}", number, 1)
        if key in ("h", "v"):
            if words == ["all"]:
                fields[key].append("all")
            elif len(words) == 2:
                fields[key].append(tuple(words))
            else:
                raise ParseError(f"'{key}:' takes one pair of tiles or 'all'", number, len(key) + 2)
        elif key == "n":
            if len(words) != 1 or not words[0].isdigit():
                raise ParseError("'n:' takes one natural number", number, 3)
            fields["n"] = int(words[0])
        else:
            if key in fields:
                raise ParseError(f"'{key}:' given twice", number, 1)
            fields[key] = tuple(words)
    for key in ("tiles", "bottom", "top"):
        if key not in fields:
            raise ParseError(f"missing '{key}:' line", len(text.splitlines()) or 1, 1)
    tiles = fields["tiles"]
    relations = {}
    for key in ("h", "v"):
        if "all" in fields[key]:
            relations[key] = all_pairs(tiles)
        else:
            relations[key] = frozenset(fields[key])
    return TilingSystem(tiles, relations["h"], relations["v"], fields["bottom"], fields["top"],
                        fields.get("n", len(fields["bottom"])))


def format_tiling(t: TilingSystem) -> str:
    lines = [f"tiles: {' '.join(t.tiles)}"]
    for key, relation in (("h", t.h), ("v", t.v)):
        if relation == all_pairs(t.tiles):
            lines.append(f"{key}: all")
        else:
            lines.extend(f"{key}: {x} {y}" for x, y in sorted(relation))
    lines.append(f"bottom: {' '.join(t.bottom)}")
    lines.append(f"top: {' '.join(t.top)}")
    lines.append(f"n: {t.n}")
    return "\n".join(lines) + "\n"


# ─── Validators ──────────────────────────────────────────────────────────────

def validate_corridor(t: TilingSystem, grid: list) -> bool:
    """grid[0] is the bottom row, grid[-1] the top row."""
    if not grid:
        raise DimensionError("a corridor needs at least one row")
    for i, row in enumerate(grid):
        if len(row) != t.n:
            raise DimensionError(f"row {i + 1} has {len(row)} tiles, expected {t.n}")
    if tuple(grid[0]) != t.bottom or tuple(grid[-1]) != t.top:
        return False
    if not all(t.h_consistent(row) for row in grid):
        return False
    return all((x, y) in t.v for below, above in zip(grid, grid[1:]) for x, y in zip(below, above))


def validate_spiral(t: TilingSystem, seq: Iterable[str]) -> bool:
    seq = tuple(seq)
    if len(seq) < t.n or seq[:t.n] != t.bottom or seq[-t.n:] != t.top:
        return False
    if not t.h_consistent(seq):
        return False
    return all((seq[i], seq[i + t.n]) in t.v for i in range(len(seq) - t.n))


def corridor_to_spiral(t: TilingSystem, pad: str = PAD_TILE) -> TilingSystem:
    """Spiral system with the same winner as the corridor game on t.

    Two padding tiles end every row; they may sit next to anything but only
    above each other, which forces both players to place them in step.
    """
    if pad in t.tiles:
        raise PreconditionError(f"padding tile '{pad}' is already a tile")
    tiles = t.tiles + (pad,)
    h = t.h | {(d, pad) for d in tiles} | {(pad, d) for d in tiles}
    v = t.v | {(pad, pad)}
    return TilingSystem(tiles, h, v, t.bottom + (pad, pad), t.top + (pad, pad), t.n + 2)


# ─── Strategies ──────────────────────────────────────────────────────────────

class LeafReason(enum.Enum):
    FINISHED = "finished"
    LATE_MOVE = "late move"
    H_VIOLATION = "H violation"
    V_VIOLATION = "V violation"


def leaf_reason(t: TilingSystem, position: tuple) -> Optional[LeafReason]:
    """Why Constructor has already won at `position` (bottom row included), if so.

    Only meaningful where Constructor is to move; the last tile is Spoiler's.
    """
    n = t.n
    if position[-n:] == t.top:
        return LeafReason.FINISHED
    if len(position) <= n:
        return None
    if position[-n - 1:-1] == t.top:
        return LeafReason.LATE_MOVE
    if (position[-2], position[-1]) not in t.h:
        return LeafReason.H_VIOLATION
    if (position[-n - 1], position[-1]) not in t.v:
        return LeafReason.V_VIOLATION
    return None


def legal_move(t: TilingSystem, position: tuple, d: str) -> bool:
    return (position[-1], d) in t.h and (position[-t.n], d) in t.v


@dataclass(frozen=True)
class Node:
    """A strategy node; Constructor nodes carry either a move or a leaf reason."""
    owner: str
    move: Optional[str] = None
    leaf: Optional[LeafReason] = None


@dataclass
class StrategyTree:
    bottom: tuple
    nodes: dict = field(default_factory=dict)  # sequence after the bottom row -> Node

    @property
    def depth(self) -> int:
        return max(len(s) for s in self.nodes)

    def constructor_moves(self) -> dict:
        return {s: node.move for s, node in self.nodes.items() if node.move is not None}

    def leaves(self) -> dict:
        return {s: node.leaf for s, node in self.nodes.items() if node.leaf is not None}

    def render(self) -> str:
        lines = []
        self._render((), lines)
        return "\n".join(lines) + "\n"

    def _render(self, s: tuple, lines: list):
        node = self.nodes[s]
        label = " ".join(s) if s else "start"
        indent = "  " * len(s)
        if node.owner == "S":
            lines.append(f"{indent}{label}: Spoiler")
            for d in sorted(c[-1] for c in self.nodes if len(c) == len(s) + 1 and c[:-1] == s):
                self._render(s + (d,), lines)
        elif node.leaf is not None:
            lines.append(f"{indent}{label}: Constructor wins ({node.leaf.value})")
        else:
            lines.append(f"{indent}{label}: Constructor plays {node.move}")
            self._render(s + (node.move,), lines)


@dataclass(frozen=True)
class PlayOutcome:
    reason: LeafReason
    moves: tuple  # tiles appended after the bottom row


def exact_horizon(t: TilingSystem) -> int:
    """Sequence length up to which the bounded game has the winner of the unbounded one.

    A Constructor position that is not a leaf is determined by its last n
    tiles, so a winning Constructor never needs more than |D|^n moves.
    """
    return t.n + 2 * len(t.tiles) ** t.n + 2


class SpiralGameSolver:
    """Memoized search over (last n+1 tiles, remaining length) at Constructor's turns."""

    def __init__(self, t: TilingSystem):
        if not t.h_consistent(t.bottom):
            raise PreconditionError("the bottom row violates H")
        self.t = t
        self._memo = {}

    def _key(self, position: tuple, remaining: int) -> tuple:
        return position[-self.t.n - 1:], remaining

    def best_move(self, position: tuple, remaining: int) -> Optional[str]:
        """Least winning move at a non-leaf Constructor position, or None if there is none."""
        key = self._key(position, remaining)
        if key in self._memo:
            return self._memo[key]
        t = self.t
        result = None
        if remaining >= 1:
            for d in t.tiles:
                if legal_move(t, position, d) and self._spoiler_loses(position + (d,), remaining - 1):
                    result = d
                    break
        self._memo[key] = result
        return result

    def _spoiler_loses(self, position: tuple, remaining: int) -> bool:
        for d in self.t.tiles:
            reply = position + (d,)
            if leaf_reason(self.t, reply) is not None:
                continue
            if remaining < 2 or self.best_move(reply, remaining - 1) is None:
                return False
        return True

    def wins(self, max_len: int) -> bool:
        root = self.t.bottom
        if leaf_reason(self.t, root) is not None:
            return True
        return self.best_move(root, max_len - len(root)) is not None

    def strategy(self, max_len: int) -> StrategyTree:
        tree = StrategyTree(self.t.bottom)
        self._build((), max_len - self.t.n, tree)
        return tree

    def _build(self, s: tuple, remaining: int, tree: StrategyTree):
        position = self.t.bottom + s
        reason = leaf_reason(self.t, position)
        if reason is not None:
            tree.nodes[s] = Node("C", leaf=reason)
            return
        d = self.best_move(position, remaining)
        tree.nodes[s] = Node("C", move=d)
        tree.nodes[s + (d,)] = Node("S")
        for e in self.t.tiles:
            self._build(s + (d, e), remaining - 2, tree)


def solve_spiral_game(t: TilingSystem, max_len: Optional[int] = None) -> Optional[StrategyTree]:
    """Winning strategy whose positions stay within `max_len` tiles, or None.

    Constructor positions that are not leaves may not exceed max_len tiles
    and neither may the sequence after Constructor's moves; Spoiler's reply to a
    completed tiling is not counted. Without a bound the shortest strategy up
    to exact_horizon is returned, which is exact for the unbounded game.
    A bottom row that violates H never starts a spiral tiling; such games
    are lost for Constructor.
    """
    if not t.h_consistent(t.bottom):
        logger.warning("❌ the bottom row violates H, no spiral tiling can start from it")
        return None
    solver = SpiralGameSolver(t)
    if max_len is not None:
        bounds = [max_len]
    else:
        bounds = range(t.n, exact_horizon(t) + 1)
    for bound in bounds:
        if solver.wins(bound):
            tree = solver.strategy(bound)
            logger.info(f"✓ Constructor wins within {bound} tiles ({len(tree.nodes)} strategy nodes)")
            return tree
    logger.info("Constructor has no winning strategy within the bound")
    return None


def validate_strategy(t: TilingSystem, tree: StrategyTree):
    """Raise InvalidStrategyError listing every violated tree condition."""
    problems = []
    nodes = tree.nodes
    if tree.bottom != t.bottom:
        problems.append("strategy starts from a different bottom row")
    if () not in nodes:
        problems.append("missing root")
    for s, node in nodes.items():
        label = " ".join(s) or "start"
        if s and s[:-1] not in nodes:
            problems.append(f"{label}: parent missing")
        owner = "C" if len(s) % 2 == 0 else "S"
        if node.owner != owner:
            problems.append(f"{label}: owned by {node.owner}, expected {owner}")
            continue
        children = [d for d in t.tiles if s + (d,) in nodes]
        if owner == "S":
            if len(children) != len(t.tiles):
                problems.append(f"{label}: Spoiler node without all replies")
            continue
        position = t.bottom + s
        if node.leaf is not None:
            if children:
                problems.append(f"{label}: leaf with children")
            if not _leaf_holds(t, position, node.leaf):
                problems.append(f"{label}: leaf reason '{node.leaf.value}' does not hold")
        elif node.move is not None:
            if children != [node.move]:
                problems.append(f"{label}: Constructor node needs exactly the child {node.move}")
            if not legal_move(t, position, node.move):
                problems.append(f"{label}: move {node.move} violates H or V")
        else:
            problems.append(f"{label}: Constructor node with neither move nor leaf reason")
    if problems:
        raise InvalidStrategyError(problems)


def _leaf_holds(t: TilingSystem, position: tuple, reason: LeafReason) -> bool:
    n = t.n
    if reason is LeafReason.FINISHED:
        return position[-n:] == t.top
    if len(position) <= n:
        return False
    if reason is LeafReason.LATE_MOVE:
        return position[-n - 1:-1] == t.top
    if reason is LeafReason.H_VIOLATION:
        return (position[-2], position[-1]) not in t.h
    return (position[-n - 1], position[-1]) not in t.v


def replay(t: TilingSystem, tree: StrategyTree, spoiler_moves: Iterable[str]) -> Optional[PlayOutcome]:
    """Play the strategy against a fixed Spoiler sequence; None if the sequence runs out first."""
    moves = iter(spoiler_moves)
    s = ()
    while True:
        node = tree.nodes.get(s)
        if node is None:
            raise InvalidStrategyError([f"{' '.join(s)}: position not covered by the strategy"])
        if node.leaf is not None:
            return PlayOutcome(node.leaf, s)
        reply = next(moves, None)
        if reply is None:
            return None
        s = s + (node.move, reply)
