# app/tm_compiler.py
"""Nondeterministic Turing machines, a direct simulator, and the compiler into
Wang tiles with neon rows.

Tape model: one-way infinite to the right, initially blank; a left move on
cell 0 leaves the head on cell 0.

Row j of a tiling encodes configuration j in the top colours of its tiles.
Colour scheme (vertical colours carry an edge bit that is 1 only in column 0):
  - vertical:   ("sym", a, edge, side) for a plain cell, where side is "W" west of
                the head and "E" east of it; ("head", q, a, edge) for the head cell;
                ("floor",) under row 0
  - horizontal: ("init",) and ("west",) in row 0 only; in later rows ("none",),
                ("right", q) and ("left", q) carry the head to a neighbour, and the
                neon pass tags each of them with a neon bit.

Side bits only change next to the head, so a head can only arrive from the
east onto a west-side cell. The last column is never west of the head while
the rectangle is wider than the head's reach, which keeps the free east border
from inventing heads.
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum

from app.errors import DecodeError, InvalidTM
from app.tiling import Rect, TileSet, Tiling

logger = logging.getLogger(__name__)

MOVES = ("L", "R")


@dataclass(frozen=True, order=True)
class Transition:
    from_state: str
    read: str
    write: str
    move: str
    to_state: str


@dataclass(frozen=True)
class TuringMachine:
    states: tuple[str, ...]
    initial: str
    alphabet: tuple[str, ...]
    blank: str
    transitions: tuple[Transition, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        if not self.states:
            raise InvalidTM("a machine needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise InvalidTM("state names must be unique")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InvalidTM("alphabet symbols must be unique")
        if self.initial not in self.states:
            raise InvalidTM(f"initial state {self.initial} is not declared")
        if self.blank not in self.alphabet:
            raise InvalidTM(f"blank symbol {self.blank} is not in the alphabet")
        for t in self.transitions:
            if t.from_state not in self.states or t.to_state not in self.states:
                raise InvalidTM(f"transition {t} uses an undeclared state")
            if t.read not in self.alphabet or t.write not in self.alphabet:
                raise InvalidTM(f"transition {t} uses an undeclared symbol")
            if t.move not in MOVES:
                raise InvalidTM(f"transition {t} has move {t.move!r}; expected L or R")

    def applicable(self, state: str, symbol: str) -> list[Transition]:
        """Transitions for (state, symbol), lexicographically ordered."""
        return sorted(t for t in self.transitions if t.from_state == state and t.read == symbol)


@dataclass(frozen=True)
class Configuration:
    tape: tuple[str, ...]
    head: int
    state: str

    def symbol(self, blank: str) -> str:
        return self.tape[self.head] if self.head < len(self.tape) else blank


def make_configuration(tape, head: int, state: str, blank: str) -> Configuration:
    """Canonical form: trailing blanks dropped, then padded so the head cell exists."""
    cells = list(tape)
    while cells and cells[-1] == blank:
        cells.pop()
    while len(cells) <= head:
        cells.append(blank)
    return Configuration(tuple(cells), head, state)


def initial_configuration(tm: TuringMachine) -> Configuration:
    return make_configuration((), 0, tm.initial, tm.blank)


def step(tm: TuringMachine, config: Configuration) -> list[Configuration]:
    """All successor configurations, in transition order."""
    successors = []
    for t in tm.applicable(config.state, config.symbol(tm.blank)):
        cells = list(config.tape)
        cells[config.head] = t.write
        head = config.head + 1 if t.move == "R" else max(config.head - 1, 0)
        successors.append(make_configuration(cells, head, t.to_state, tm.blank))
    return successors


class SimulationPolicy(str, Enum):
    FIRST_TRANSITION = "first-transition"
    ALL_BRANCHES = "all-branches-bounded"


def simulate(tm: TuringMachine, steps: int,
             policy: SimulationPolicy = SimulationPolicy.FIRST_TRANSITION) -> list[list[Configuration]]:
    """Runs of at most `steps` steps; a shorter run means the machine halted."""
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    start = initial_configuration(tm)

    if SimulationPolicy(policy) is SimulationPolicy.FIRST_TRANSITION:
        run = [start]
        while len(run) <= steps:
            successors = step(tm, run[-1])
            if not successors:
                break
            run.append(successors[0])
        return [run]

    runs: list[list[Configuration]] = []

    def explore(run: list[Configuration]):
        successors = step(tm, run[-1]) if len(run) <= steps else []
        if not successors:
            runs.append(list(run))
            return
        for nxt in successors:
            run.append(nxt)
            explore(run)
            run.pop()

    explore([start])
    logger.info(f"Simulated {len(runs)} runs of up to {steps} steps")
    return runs


# --- Wang tiles ---

class TileKind(str, Enum):
    INITIAL = "initial"
    MERGE = "merge"
    ACTION = "action"
    ALPHABET = "alphabet"


@dataclass(frozen=True)
class WangTile:
    name: str
    left: tuple
    right: tuple
    bottom: tuple
    top: tuple
    kind: TileKind
    neon: bool = False
    transition: Transition | None = None


@dataclass(frozen=True)
class CompiledMeta:
    """Decoding tables for a compiled tile set."""
    tile_kinds: dict[str, str]
    cells: dict[str, tuple[str, str | None]]  # tile -> (symbol written above it, head state or None)
    actions: dict[str, Transition] = field(default_factory=dict)
    blank: str = "_"
    initial: str = "q0"


WEST, EAST = "W", "E"


def _vertical(symbol: str, edge: int, side: str) -> tuple:
    return ("sym", symbol, edge, side)


def _head(symbol: str, edge: int, state: str) -> tuple:
    return ("head", state, symbol, edge)


def _base_tiles(tm: TuringMachine) -> list[WangTile]:
    """Tiles before the neon pass, in search order: initial, alphabet, merge, action."""
    tiles = [
        WangTile("init_start", ("west",), ("init",), ("floor",),
                 _head(tm.blank, 1, tm.initial), TileKind.INITIAL),
        WangTile("init_fill", ("init",), ("init",), ("floor",),
                 _vertical(tm.blank, 0, EAST), TileKind.INITIAL),
    ]
    for si, a in enumerate(tm.alphabet):
        for edge in (0, 1):
            for side in (WEST, EAST):
                name = f"sym{si}{'_edge' if edge else ''}_{side.lower()}"
                tiles.append(WangTile(name, ("none",), ("none",),
                                      _vertical(a, edge, side), _vertical(a, edge, side), TileKind.ALPHABET))
    for qi, q in enumerate(tm.states):
        for si, a in enumerate(tm.alphabet):
            # Head arriving from the west onto an east-side cell; never in column 0.
            tiles.append(WangTile(f"merge_w_q{qi}_s{si}", ("right", q), ("none",),
                                  _vertical(a, 0, EAST), _head(a, 0, q), TileKind.MERGE))
            # Head arriving from the east onto a west-side cell.
            for edge in (0, 1):
                suffix = "_edge" if edge else ""
                tiles.append(WangTile(f"merge_e_q{qi}_s{si}{suffix}", ("none",), ("left", q),
                                      _vertical(a, edge, WEST), _head(a, edge, q), TileKind.MERGE))
    for ti, t in enumerate(tm.transitions):
        for edge in (0, 1):
            suffix = "_edge" if edge else ""
            bottom = _head(t.read, edge, t.from_state)
            if t.move == "R":
                left, right, top = ("none",), ("right", t.to_state), _vertical(t.write, edge, WEST)
            elif edge:
                # Left move on cell 0: the head stays put.
                left, right, top = ("none",), ("none",), _head(t.write, edge, t.to_state)
            else:
                left, right, top = ("left", t.to_state), ("none",), _vertical(t.write, edge, EAST)
            tiles.append(WangTile(f"act{ti}{suffix}", left, right, bottom, top, TileKind.ACTION,
                                  transition=t))
    return tiles


def apply_neon(tiles: list[WangTile], initial: str) -> list[WangTile]:
    """Duplicate alphabet and merge tiles with neon copies; action tiles entering
    the initial state become neon only. Horizontal colours of every non-initial
    tile get a neon bit, so a row is either all neon or all plain."""

    def tagged(tile: WangTile, neon: bool, name: str) -> WangTile:
        bit = 1 if neon else 0
        return replace(tile, name=name, left=tile.left + (bit,), right=tile.right + (bit,), neon=neon)

    plain, neon_copies = [], []
    for tile in tiles:
        if tile.kind is TileKind.INITIAL:
            plain.append(tile)
        elif tile.kind is TileKind.ACTION:
            if tile.transition.to_state == initial:
                neon_copies.append(tagged(tile, True, tile.name + "_neon"))
            else:
                plain.append(tagged(tile, False, tile.name))
        else:
            plain.append(tagged(tile, False, tile.name))
            neon_copies.append(tagged(tile, True, tile.name + "_neon"))

    # Search order: initial, alphabet, merge, action (plain before neon within a kind).
    rank = {TileKind.INITIAL: 0, TileKind.ALPHABET: 1, TileKind.MERGE: 2, TileKind.ACTION: 3}
    combined = plain + neon_copies
    return sorted(combined, key=lambda t: (rank[t.kind], t.neon))


def tiles_to_tileset(tiles: list[WangTile]) -> TileSet:
    """Edge colours to relations: t ~h u iff right(t) = left(u); t ~v u iff top(t) = bottom(u)."""
    by_left: dict[tuple, list[str]] = {}
    by_bottom: dict[tuple, list[str]] = {}
    for tile in tiles:
        by_left.setdefault(tile.left, []).append(tile.name)
        by_bottom.setdefault(tile.bottom, []).append(tile.name)
    h = {(t.name, u) for t in tiles for u in by_left.get(t.right, ())}
    v = {(t.name, u) for t in tiles for u in by_bottom.get(t.top, ())}
    return TileSet(
        tiles=tuple(t.name for t in tiles),
        h=frozenset(h),
        v=frozenset(v),
        neon=frozenset(t.name for t in tiles if t.neon),
        start=tiles[0].name,
    )


def compile_tm(tm: TuringMachine) -> tuple[TileSet, CompiledMeta]:
    """Compile a machine into a tile set whose start-anchored rectangle tilings
    follow its runs row by row."""
    tiles = apply_neon(_base_tiles(tm), tm.initial)
    if tiles[0].name != "init_start":
        raise RuntimeError("start tile must come first")
    ts = tiles_to_tileset(tiles)

    cells = {}
    for tile in tiles:
        if tile.top[0] == "head":
            _, state, symbol, _ = tile.top
            cells[tile.name] = (symbol, state)
        else:
            cells[tile.name] = (tile.top[1], None)
    meta = CompiledMeta(
        tile_kinds={t.name: t.kind.value for t in tiles},
        cells=cells,
        actions={t.name: t.transition for t in tiles if t.kind is TileKind.ACTION},
        blank=tm.blank,
        initial=tm.initial,
    )
    logger.info(f"Compiled machine with {len(tm.states)} states and {len(tm.transitions)} transitions "
                f"into {len(ts.tiles)} tiles ({len(ts.neon)} neon)")
    return ts, meta


def decode_rows(ts: TileSet, meta: CompiledMeta, t: Tiling) -> list[Configuration]:
    """Read the configuration encoded by each row of a start-anchored rectangle tiling."""
    if not isinstance(t.shape, Rect):
        raise ValueError("decode_rows needs a rectangle tiling")
    configs = []
    for j in range(t.shape.rows):
        tape = []
        heads = []
        for i, tile in enumerate(t.row(j)):
            if tile not in meta.cells:
                raise DecodeError(f"row {j} holds tile {tile} unknown to the decoding tables")
            symbol, state = meta.cells[tile]
            tape.append(symbol)
            if state is not None:
                heads.append((i, state))
        if len(heads) != 1:
            raise DecodeError(f"row {j} carries {len(heads)} head markers; expected exactly one")
        head, state = heads[0]
        configs.append(make_configuration(tape, head, state, meta.blank))
    return configs


def row_action(meta: CompiledMeta, t: Tiling, j: int) -> str | None:
    """The action tile of row j, if the row has exactly one."""
    actions = [tile for tile in t.row(j) if meta.tile_kinds.get(tile) == TileKind.ACTION.value]
    return actions[0] if len(actions) == 1 else None
