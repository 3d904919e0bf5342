# app/documents.py
"""JSON documents: models, tile sets, Turing machines, tilings, compiled-tile
sidecars and witness bundles.

Loading goes text -> json -> pydantic document -> domain object, and each
stage maps its failure onto the workbench error hierarchy. Dumping is
canonical: declared order for lists, pairs sorted by declared state/tile order.
"""
import json
import logging
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, StrictBool, StrictInt, StrictStr, ValidationError

from app.errors import InvariantError, ParseError, SchemaError, UnknownState, WorkbenchError
from app.parser import SourceText, print_prop
from app.semantics import KripkeModel, validate_model
from app.tiling import Rect, TileSet, Tiling, Torus, verify_tiling
from app.tm_compiler import CompiledMeta, Transition, TuringMachine

logger = logging.getLogger(__name__)

Pair = tuple[StrictStr, StrictStr]


# --- Pydantic documents ---

class Document(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class ModelDoc(Document):
    states: list[StrictStr]
    deterministic: StrictBool = False
    programs: dict[StrictStr, list[Pair]] = {}
    valuation: dict[StrictStr, list[StrictStr]] = {}


class TileSetDoc(Document):
    tiles: list[StrictStr]
    h: list[Pair] = []
    v: list[Pair] = []
    neon: list[StrictStr] = []
    start: StrictStr


class TransitionDoc(Document):
    from_: StrictStr = Field(alias="from")
    read: StrictStr
    write: StrictStr
    move: Literal["L", "R"]
    to: StrictStr


class TuringMachineDoc(Document):
    states: list[StrictStr]
    initial: StrictStr
    alphabet: list[StrictStr]
    blank: StrictStr
    transitions: list[TransitionDoc] = []


class ShapeDoc(Document):
    kind: Literal["rect", "torus"]
    columns: StrictInt = Field(ge=1)
    rows: StrictInt = Field(ge=1)


class TilingDoc(Document):
    shape: ShapeDoc
    assign: list[tuple[StrictInt, StrictInt, StrictStr]]


class DecodeCellDoc(Document):
    symbol: StrictStr
    state: StrictStr | None = None


class MetaDoc(Document):
    tile_kinds: dict[StrictStr, StrictStr]
    decode: dict[StrictStr, DecodeCellDoc]
    actions: dict[StrictStr, TransitionDoc] = {}
    blank: StrictStr = "_"
    initial: StrictStr = "q0"


# --- Loading ---

def load_source(path) -> SourceText:
    """Read a file as SourceText; the origin is the path as given."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        logger.warning(f"Could not read {path}: {e}")
        raise WorkbenchError(f"{path}: cannot read file: {e}")
    logger.info(f"Loaded {path} ({len(text)} characters)")
    return SourceText(text, origin=str(path))


def _as_source(src) -> SourceText:
    return src if isinstance(src, SourceText) else SourceText(src)


def _decode(src, doc_type: type[Document], what: str) -> Document:
    source = _as_source(src)
    try:
        raw = json.loads(source.text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON in {what}: {e.msg}", e.lineno, e.colno, origin=source.origin)
    try:
        return doc_type.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "<root>"
        logger.warning(f"Rejected {what} from {source.origin}: {e.error_count()} validation errors")
        raise SchemaError(f"{source.origin}: {what} field {location}: {first['msg']}")


def model_from_doc(doc: ModelDoc) -> KripkeModel:
    model = KripkeModel(
        states=tuple(doc.states),
        prog_rel={name: set(pairs) for name, pairs in doc.programs.items()},
        valuation={name: set(members) for name, members in doc.valuation.items()},
        deterministic=doc.deterministic,
    )
    errors = [d for d in validate_model(model) if d.is_error]
    if errors:
        first = errors[0]
        if first.code == "dangling-state":
            raise UnknownState(first.message)
        raise InvariantError(first.message)
    return model


def parse_model(src) -> KripkeModel:
    return model_from_doc(_decode(src, ModelDoc, "model"))


def tileset_from_doc(doc: TileSetDoc) -> TileSet:
    return TileSet(tuple(doc.tiles), frozenset(doc.h), frozenset(doc.v), frozenset(doc.neon), doc.start)


def parse_tileset(src) -> TileSet:
    ts = tileset_from_doc(_decode(src, TileSetDoc, "tile set"))
    logger.debug(f"Tile set with {len(ts.tiles)} tiles, {len(ts.h)} h pairs, {len(ts.v)} v pairs")
    return ts


def _transition(doc: TransitionDoc) -> Transition:
    return Transition(doc.from_, doc.read, doc.write, doc.move, doc.to)


def parse_tm(src) -> TuringMachine:
    doc = _decode(src, TuringMachineDoc, "Turing machine")
    return TuringMachine(
        states=tuple(doc.states),
        initial=doc.initial,
        alphabet=tuple(doc.alphabet),
        blank=doc.blank,
        transitions=tuple(_transition(t) for t in doc.transitions),
    )


def tiling_from_doc(doc: TilingDoc, ts: TileSet | None = None) -> Tiling:
    shape = Rect(doc.shape.columns, doc.shape.rows) if doc.shape.kind == "rect" else Torus(doc.shape.columns, doc.shape.rows)
    assign = {}
    for i, j, tile in doc.assign:
        if (i, j) in assign:
            raise InvariantError(f"position ({i}, {j}) is assigned twice")
        assign[(i, j)] = tile
    tiling = Tiling(shape, assign)
    if ts is not None:
        # Raises UnknownTile; adjacency validity is left to the caller.
        verify_tiling(ts, tiling)
    return tiling


def parse_tiling(src, ts: TileSet | None = None) -> Tiling:
    return tiling_from_doc(_decode(src, TilingDoc, "tiling"), ts)


def parse_meta(src) -> CompiledMeta:
    doc = _decode(src, MetaDoc, "compiled-tile sidecar")
    if set(doc.tile_kinds) != set(doc.decode):
        raise InvariantError("tile_kinds and decode must cover the same tiles")
    return CompiledMeta(
        tile_kinds=dict(doc.tile_kinds),
        cells={tile: (cell.symbol, cell.state) for tile, cell in doc.decode.items()},
        actions={tile: _transition(t) for tile, t in doc.actions.items()},
        blank=doc.blank,
        initial=doc.initial,
    )


# --- Dumping ---

def dump_model(model: KripkeModel) -> dict:
    return {
        "states": list(model.states),
        "deterministic": model.deterministic,
        "programs": {
            name: [list(pair) for pair in sorted(model.prog_rel[name], key=model.pair_order)]
            for name in sorted(model.prog_rel)
        },
        "valuation": {
            name: sorted(model.valuation[name], key=model.state_order)
            for name in sorted(model.valuation)
        },
    }


def dump_tileset(ts: TileSet) -> dict:
    def by_index(pair):
        return ts.index[pair[0]], ts.index[pair[1]]

    return {
        "tiles": list(ts.tiles),
        "h": [list(pair) for pair in sorted(ts.h, key=by_index)],
        "v": [list(pair) for pair in sorted(ts.v, key=by_index)],
        "neon": sorted(ts.neon, key=ts.index.__getitem__),
        "start": ts.start,
    }


def _dump_transition(t: Transition) -> dict:
    return {"from": t.from_state, "read": t.read, "write": t.write, "move": t.move, "to": t.to_state}


def dump_tm(tm: TuringMachine) -> dict:
    return {
        "states": list(tm.states),
        "initial": tm.initial,
        "alphabet": list(tm.alphabet),
        "blank": tm.blank,
        "transitions": [_dump_transition(t) for t in tm.transitions],
    }


def dump_tiling(t: Tiling) -> dict:
    kind = "torus" if isinstance(t.shape, Torus) else "rect"
    return {
        "shape": {"kind": kind, "columns": t.shape.columns, "rows": t.shape.rows},
        "assign": [[i, j, t.assign[(i, j)]] for i, j in t.shape.positions()],
    }


def dump_meta(meta: CompiledMeta) -> dict:
    return {
        "tile_kinds": dict(meta.tile_kinds),
        "decode": {tile: {"symbol": symbol, "state": state} for tile, (symbol, state) in meta.cells.items()},
        "actions": {tile: _dump_transition(t) for tile, t in meta.actions.items()},
        "blank": meta.blank,
        "initial": meta.initial,
    }


def witness_bundle(ts: TileSet, witness) -> dict:
    """Serialize a torus witness together with the tile set it was found for."""
    return {
        "tileset": dump_tileset(ts),
        "tiling": dump_tiling(witness.tiling),
        "model": dump_model(witness.model),
        "formula": print_prop(witness.formula),
        "satisfying_states": list(witness.satisfying_states),
    }


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
