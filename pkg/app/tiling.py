# app/tiling.py
"""Tile sets, rectangle and torus tilings, verification and backtracking search."""
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Mapping

from tabulate import tabulate

from app import config
from app.errors import BudgetExceeded, InvariantError, UnknownTile

logger = logging.getLogger(__name__)

Position = tuple[int, int]
TilePair = tuple[str, str]


@dataclass(frozen=True)
class TileSet:
    """Tiles T_0..T_{k-1} with ~h ((left, right) pairs) and ~v ((below, above) pairs)."""
    tiles: tuple[str, ...]
    h: frozenset[TilePair]
    v: frozenset[TilePair]
    neon: frozenset[str] = frozenset()
    start: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "tiles", tuple(self.tiles))
        object.__setattr__(self, "h", frozenset((a, b) for a, b in self.h))
        object.__setattr__(self, "v", frozenset((a, b) for a, b in self.v))
        object.__setattr__(self, "neon", frozenset(self.neon))
        if self.start is None and self.tiles:
            object.__setattr__(self, "start", self.tiles[0])

        if not self.tiles:
            raise InvariantError("a tile set needs at least one tile")
        if len(set(self.tiles)) != len(self.tiles):
            raise InvariantError("tile names must be unique")
        declared = set(self.tiles)
        for label, pairs in (("h", self.h), ("v", self.v)):
            for a, b in pairs:
                for tile in (a, b):
                    if tile not in declared:
                        raise UnknownTile(f"{label} pair ({a}, {b}) references undeclared tile {tile}")
        for tile in self.neon:
            if tile not in declared:
                raise UnknownTile(f"neon tile {tile} is not declared")
        if self.start not in declared:
            raise UnknownTile(f"start tile {self.start} is not declared")

    @cached_property
    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.tiles)}

    @cached_property
    def right_of(self) -> dict[str, frozenset[str]]:
        """Tiles allowed immediately east of each tile."""
        table = {t: set() for t in self.tiles}
        for a, b in self.h:
            table[a].add(b)
        return {t: frozenset(s) for t, s in table.items()}

    @cached_property
    def above(self) -> dict[str, frozenset[str]]:
        """Tiles allowed immediately north of each tile."""
        table = {t: set() for t in self.tiles}
        for a, b in self.v:
            table[a].add(b)
        return {t: frozenset(s) for t, s in table.items()}


# --- Shapes ---

@dataclass(frozen=True)
class Rect:
    width: int
    height: int

    wraps = False

    @property
    def columns(self) -> int:
        return self.width

    @property
    def rows(self) -> int:
        return self.height

    def positions(self) -> list[Position]:
        """Row-major: row 0 left to right, then row 1, ..."""
        return [(i, j) for j in range(self.height) for i in range(self.width)]

    def __str__(self):
        return f"rect:{self.width},{self.height}"


@dataclass(frozen=True)
class Torus:
    n: int
    m: int

    wraps = True

    @property
    def columns(self) -> int:
        return self.n

    @property
    def rows(self) -> int:
        return self.m

    def positions(self) -> list[Position]:
        return [(i, j) for j in range(self.m) for i in range(self.n)]

    def __str__(self):
        return f"torus:{self.n},{self.m}"


Shape = Rect | Torus


def parse_shape(text: str) -> Shape:
    """Read "rect:W,H" or "torus:N,M"."""
    kind, _, dims = text.partition(":")
    try:
        a, b = (int(x) for x in dims.split(","))
    except ValueError:
        raise ValueError(f"shape must look like rect:W,H or torus:N,M, got {text!r}")
    if a < 1 or b < 1:
        raise ValueError(f"shape dimensions must be at least 1, got {text!r}")
    if kind == "rect":
        return Rect(a, b)
    if kind == "torus":
        return Torus(a, b)
    raise ValueError(f"unknown shape kind {kind!r} (use rect or torus)")


@dataclass(frozen=True)
class Tiling:
    shape: Shape
    assign: Mapping[Position, str]

    def __post_init__(self):
        object.__setattr__(self, "assign", dict(self.assign))
        expected = set(self.shape.positions())
        if set(self.assign) != expected:
            missing = sorted(expected - set(self.assign))
            extra = sorted(set(self.assign) - expected)
            raise InvariantError(f"tiling is not total on {self.shape}: missing {missing[:5]}, extra {extra[:5]}")

    def at(self, i: int, j: int) -> str:
        return self.assign[(i, j)]

    def row(self, j: int) -> list[str]:
        return [self.assign[(i, j)] for i in range(self.shape.columns)]


# --- Verification ---

@dataclass(frozen=True)
class Valid:
    pass


@dataclass(frozen=True)
class Violation:
    position: Position
    direction: str  # "horizontal" or "vertical"


def verify_tiling(ts: TileSet, t: Tiling) -> Valid | Violation:
    """Check every adjacency of the shape; report the least violating position."""
    for pos, tile in t.assign.items():
        if tile not in ts.index:
            raise UnknownTile(f"tiling places undeclared tile {tile} at {pos}")

    cols, rows = t.shape.columns, t.shape.rows
    for i, j in sorted(t.assign):
        here = t.assign[(i, j)]
        if i + 1 < cols or t.shape.wraps:
            east = t.assign[((i + 1) % cols, j)]
            if east not in ts.right_of[here]:
                return Violation((i, j), "horizontal")
        if j + 1 < rows or t.shape.wraps:
            north = t.assign[(i, (j + 1) % rows)]
            if north not in ts.above[here]:
                return Violation((i, j), "vertical")
    return Valid()


# --- Search ---

class TilingSearch:
    """Chronological backtracking over positions in row-major order.

    Candidates for a position are the declared tiles, filtered by the already
    placed west and south neighbours and, on torus seams, by the wrapped east
    and north neighbours.
    """

    def __init__(self, ts: TileSet, shape: Shape, fix_origin: str | None = None,
                 budget: int | None = None):
        if shape.columns < 1 or shape.rows < 1:
            raise ValueError(f"shape dimensions must be at least 1, got {shape}")
        if fix_origin is not None and fix_origin not in ts.index:
            raise UnknownTile(f"origin tile {fix_origin} is not declared")
        self.ts = ts
        self.shape = shape
        self.fix_origin = fix_origin
        self.budget = budget if budget is not None else config.tiling_node_budget()
        self.nodes = 0

    def _candidates(self, pos: Position, assign: dict) -> list[str]:
        i, j = pos
        ts = self.ts
        cols, rows = self.shape.columns, self.shape.rows
        pool = [self.fix_origin] if (pos == (0, 0) and self.fix_origin is not None) else ts.tiles
        result = []
        for tile in pool:
            if i > 0 and tile not in ts.right_of[assign[(i - 1, j)]]:
                continue
            if j > 0 and tile not in ts.above[assign[(i, j - 1)]]:
                continue
            if self.shape.wraps:
                if i == cols - 1:
                    east = tile if cols == 1 else assign[(0, j)]
                    if east not in ts.right_of[tile]:
                        continue
                if j == rows - 1:
                    north = tile if rows == 1 else assign[(i, 0)]
                    if north not in ts.above[tile]:
                        continue
            result.append(tile)
        return result

    def solutions(self) -> Iterator[Tiling]:
        positions = self.shape.positions()
        assign: dict[Position, str] = {}

        def extend(k: int):
            if k == len(positions):
                yield Tiling(self.shape, dict(assign))
                return
            pos = positions[k]
            for tile in self._candidates(pos, assign):
                self.nodes += 1
                if self.nodes > self.budget:
                    logger.warning(f"Tiling search on {self.shape} exhausted budget of {self.budget} nodes")
                    raise BudgetExceeded(self.nodes, str(self.shape))
                assign[pos] = tile
                yield from extend(k + 1)
                del assign[pos]

        yield from extend(0)

    def first(self) -> Tiling | None:
        found = next(self.solutions(), None)
        logger.info(f"Tiling search on {self.shape}: {'found' if found else 'none'} after {self.nodes} nodes")
        return found


def search_tiling(ts: TileSet, shape: Shape, fix_origin: str | None = None) -> Tiling | None:
    """First valid tiling in search order, or None when none exists."""
    return TilingSearch(ts, shape, fix_origin).first()


def iter_tilings(ts: TileSet, shape: Shape, fix_origin: str | None = None) -> Iterator[Tiling]:
    """Every valid tiling of the shape, in search order."""
    return TilingSearch(ts, shape, fix_origin).solutions()


def diagonal_neon_states(ts: TileSet, t: Tiling) -> frozenset[Position]:
    """Neon positions on the orbit of (0,0) under one step north then east."""
    if not isinstance(t.shape, Torus):
        raise ValueError("diagonal_neon_states needs a torus tiling")
    n, m = t.shape.n, t.shape.m
    orbit = {(k % n, k % m) for k in range(math.lcm(n, m))}
    return frozenset(pos for pos in orbit if t.assign[pos] in ts.neon)


def unroll_torus(t: Tiling, width: int, height: int) -> Tiling:
    """Repeat a torus tiling periodically over a width x height rectangle."""
    if not isinstance(t.shape, Torus):
        raise ValueError("unroll_torus needs a torus tiling")
    n, m = t.shape.n, t.shape.m
    shape = Rect(width, height)
    return Tiling(shape, {(i, j): t.assign[(i % n, j % m)] for i, j in shape.positions()})


def render_grid(t: Tiling) -> str:
    """Text grid with the top row (north) first."""
    cols, rows = t.shape.columns, t.shape.rows
    table = [t.row(j) for j in reversed(range(rows))]
    return tabulate(table, headers=[str(i) for i in range(cols)],
                    showindex=[str(j) for j in reversed(range(rows))], tablefmt="simple")
