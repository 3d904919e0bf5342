import json
import pytest

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from app.errors import InvariantError, ParseError, SchemaError, UnknownState, UnknownTile, WorkbenchError
from app.documents import (
    dump_meta, dump_model, dump_tileset, dump_tiling, dump_tm, load_source, parse_meta, parse_model,
    parse_tileset, parse_tiling, parse_tm, to_json, witness_bundle,
)
from app.parser import SourceText, parse_prop
from app.semantics import truth_set
from app.tiling import Torus
from app.tm_compiler import Transition, compile_tm
from app.witness import torus_sat

ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
DATA = os.path.join(ROOT, "data")


def data_files(kind):
    folder = os.path.join(DATA, kind)
    return sorted(os.path.join(folder, name) for name in os.listdir(folder) if name.endswith(".json"))


@pytest.mark.parametrize("path", data_files("models"))
def test_shipped_models_are_canonical(path):
    """Dumping a parsed model reproduces the file's JSON."""
    src = load_source(path)
    assert dump_model(parse_model(src)) == json.loads(src.text)


@pytest.mark.parametrize("path", data_files("tilesets"))
def test_shipped_tilesets_are_canonical(path):
    src = load_source(path)
    assert dump_tileset(parse_tileset(src)) == json.loads(src.text)


@pytest.mark.parametrize("path", data_files("tms"))
def test_shipped_machines_are_canonical(path):
    src = load_source(path)
    assert dump_tm(parse_tm(src)) == json.loads(src.text)


def test_parse_tm_fields():
    tm = parse_tm(load_source(os.path.join(DATA, "tms", "looping.json")))
    assert tm.states == ("q0",)
    assert tm.initial == "q0"
    assert tm.blank == "_"
    assert tm.transitions == (Transition("q0", "_", "_", "R", "q0"),)


def test_invalid_json_reports_location():
    src = SourceText('{\n  "states": [\n}', origin="broken.json")
    with pytest.raises(ParseError) as info:
        parse_model(src)
    assert info.value.line == 3
    assert info.value.column == 1
    assert "broken.json:3:1" in str(info.value)


def test_schema_errors():
    with pytest.raises(SchemaError):
        parse_model('{"programs": {}}')
    with pytest.raises(SchemaError):
        parse_model('{"states": ["x"], "deterministic": "true"}')
    with pytest.raises(SchemaError):
        parse_model('{"states": ["x"], "colour": "red"}')
    with pytest.raises(SchemaError):
        parse_tm('{"states": ["q0"], "initial": "q0", "alphabet": ["_"], "blank": "_", '
                 '"transitions": [{"from": "q0", "read": "_", "write": "_", "move": "U", "to": "q0"}]}')


def test_schema_error_names_the_field():
    with pytest.raises(SchemaError) as info:
        parse_tileset('{"tiles": ["A"], "h": [["A"]], "start": "A"}')
    assert "h.0" in str(info.value)


def test_model_invariants():
    with pytest.raises(InvariantError):
        parse_model('{"states": ["x", "y"], "deterministic": true, "programs": {"p": [["x", "x"], ["x", "y"]]}}')
    with pytest.raises(UnknownState):
        parse_model('{"states": ["x"], "programs": {"p": [["x", "ghost"]]}}')
    with pytest.raises(UnknownState):
        parse_model('{"states": ["x"], "valuation": {"a": ["ghost"]}}')


def test_tileset_invariants():
    with pytest.raises(UnknownTile):
        parse_tileset('{"tiles": ["A"], "h": [["A", "B"]], "start": "A"}')
    with pytest.raises(UnknownTile):
        parse_tileset('{"tiles": ["A"], "start": "B"}')
    assert parse_tileset('{"tiles": ["A", "B"], "start": "B"}').start == "B"


def test_tileset_requires_start():
    with pytest.raises(SchemaError) as info:
        parse_tileset('{"tiles": ["A", "B"]}')
    assert "start" in str(info.value)


def test_tiling_documents():
    ts = parse_tileset(load_source(os.path.join(DATA, "tilesets", "checkerboard.json")))
    text = '{"shape": {"kind": "torus", "columns": 2, "rows": 1}, "assign": [[0, 0, "A"], [1, 0, "B"]]}'
    t = parse_tiling(text, ts)
    assert t.shape == Torus(2, 1)
    assert dump_tiling(t) == json.loads(text)
    with pytest.raises(InvariantError):
        parse_tiling('{"shape": {"kind": "rect", "columns": 1, "rows": 1}, "assign": [[0, 0, "A"], [0, 0, "B"]]}')
    with pytest.raises(UnknownTile):
        parse_tiling('{"shape": {"kind": "rect", "columns": 1, "rows": 1}, "assign": [[0, 0, "Q"]]}', ts)
    with pytest.raises(SchemaError):
        parse_tiling('{"shape": {"kind": "rect", "columns": 0, "rows": 1}, "assign": []}')


def test_meta_round_trip():
    _, meta = compile_tm(parse_tm(load_source(os.path.join(DATA, "tms", "bouncer.json"))))
    doc = dump_meta(meta)
    assert parse_meta(to_json(doc)) == meta
    assert doc["initial"] == "q0"
    assert doc["decode"]["init_start"] == {"symbol": "_", "state": "q0"}


def test_meta_tiles_must_agree():
    with pytest.raises(InvariantError):
        parse_meta('{"tile_kinds": {"a": "alphabet"}, "decode": {}}')


def test_witness_bundle():
    ts = parse_tileset(load_source(os.path.join(DATA, "tilesets", "one_tile.json")))
    found = torus_sat(ts, 1, 1)
    bundle = witness_bundle(ts, found)
    assert set(bundle) == {"tileset", "tiling", "model", "formula", "satisfying_states"}
    assert bundle["model"] == json.loads(load_source(os.path.join(DATA, "models", "unit_torus.json")).text)
    reparsed = parse_prop(bundle["formula"])
    assert truth_set(found.model, reparsed) == truth_set(found.model, found.formula)
    assert bundle["satisfying_states"] == ["0,0"]


def test_load_source_missing_file(tmp_path):
    with pytest.raises(WorkbenchError):
        load_source(tmp_path / "nope.json")


def test_to_json_ends_with_newline():
    text = to_json({"a": [1, 2]})
    assert text.endswith("}\n")
    assert json.loads(text) == {"a": [1, 2]}
