import pytest

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from app.logic import (
    BOTTOM, TOP, And, Atom, AtomicProg, Box, Diamond, FixP, Not, Or, Seq, Star, Tie, WhileDo,
    atomic_names, conjuncts, is_strict,
)
from app.reduction import Encoding, Form, exactly_one, gamma, rho1, rho2, rho3, square_prop, tile_atom
from app.semantics import KripkeModel, random_model, truth_set
from app.tiling import TileSet

N, E, S, W = (AtomicProg(name) for name in ("N", "E", "S", "W"))


def one_tile(neon=True):
    return TileSet(("T0",), {("T0", "T0")}, {("T0", "T0")}, {"T0"} if neon else set(), "T0")


def checkerboard():
    alternate = {("A", "B"), ("B", "A")}
    return TileSet(("A", "B"), alternate, alternate, {"A"}, "A")


def identity_loop_model(atoms=("at_T0",)):
    """One state with N, E, S, W all the identity loop."""
    loop = {("x", "x")}
    return KripkeModel(("x",), {name: loop for name in "NESW"}, {a: {"x"} for a in atoms}, True)


def test_tile_atoms():
    ts = TileSet(("A", "1x", "B c"), set(), set())
    assert tile_atom(ts, "A") == Atom("at_A")
    assert tile_atom(ts, "1x") == Atom("tile1")
    assert tile_atom(ts, "B c") == Atom("tile2")


def test_square_fix_encoding():
    square = square_prop(Encoding.FIX)
    parts = conjuncts(square)
    assert len(parts) == 10
    assert parts[0] == FixP(Seq(N, S))
    assert parts[4] == FixP(Seq(Seq(Seq(N, E), S), W))
    assert parts[5] == FixP(Seq(E, W))
    assert atomic_names(square) == (frozenset(), frozenset("NESW"))


def test_square_tie_encoding():
    assert square_prop(Encoding.TIE) == Tie(Seq(N, E), Seq(E, N))


def test_square_holds_on_identity_loop():
    m = identity_loop_model()
    assert truth_set(m, square_prop()) == {"x"}
    assert truth_set(m, square_prop(Encoding.TIE)) == {"x"}


def test_rho1_forms():
    square = square_prop()
    assert rho1() == Box(Star(N), Box(Star(E), square))
    assert rho1(form=Form.WHILE) == Box(WhileDo(Box(WhileDo(square, E), BOTTOM), N), BOTTOM)
    assert truth_set(identity_loop_model(), rho1()) == {"x"}


def test_exactly_one():
    a, b, c = Atom("a"), Atom("b"), Atom("c")
    assert exactly_one([a]) == a
    f = exactly_one([a, b])
    assert f == And(Or(a, b), Not(And(a, b)))
    assert len(conjuncts(exactly_one([a, b, c]))) == 4


def test_rho2_single_tile():
    """beta and the vertical beta are both the tile's own atom."""
    a0 = Atom("at_T0")
    f = rho2(one_tile())
    inner = f.body.body
    assert inner.left == a0
    clause = inner.right
    assert clause.left == a0
    assert clause.right == And(Box(E, a0), Box(N, a0))


def test_rho2_without_h_forces_box_false():
    ts = TileSet(("T0",), set(), {("T0", "T0")}, set(), "T0")
    clause = rho2(ts).body.body.right
    assert clause.right == And(Box(E, BOTTOM), Box(N, Atom("at_T0")))


def test_rho2_checkerboard():
    clauses = conjuncts(rho2(checkerboard()).body.body.right)
    a, b = Atom("at_A"), Atom("at_B")
    assert clauses[0].right == And(Box(E, b), Box(N, b))
    assert clauses[1].right == And(Box(E, a), Box(N, a))
    assert rho2(checkerboard()).body.body.left == And(Or(a, b), Not(And(a, b)))


def test_rho3_shapes():
    diagonal = Star(Seq(N, E))
    assert rho3(one_tile()) == Box(diagonal, Diamond(diagonal, Atom("at_T0")))
    assert rho3(one_tile(neon=False)) == Box(diagonal, Diamond(diagonal, BOTTOM))
    step = Seq(N, E)
    expected = Box(WhileDo(Diamond(WhileDo(Not(Atom("at_T0")), step), TOP), step), BOTTOM)
    assert rho3(one_tile(), Form.WHILE) == expected


def test_rho3_truth_sets():
    m = identity_loop_model()
    assert truth_set(m, rho3(one_tile())) == {"x"}
    assert truth_set(m, rho3(one_tile(neon=False))) == frozenset()


def test_gamma_structure():
    for ts in (one_tile(), checkerboard()):
        for encoding in Encoding:
            out = gamma(ts, encoding)
            assert len(conjuncts(out.gamma)) == 4
            assert len(conjuncts(out.gamma_T)) == 2
            assert conjuncts(out.gamma)[0] == tile_atom(ts, ts.start)
            assert conjuncts(out.gamma_T) == [out.rho1, out.rho2]


def test_gamma_atom_hygiene():
    ts = checkerboard()
    props, progs = atomic_names(gamma(ts, Encoding.FIX).gamma)
    assert progs == frozenset("NESW")
    assert props == {"at_A", "at_B"}
    _, progs = atomic_names(gamma(ts, Encoding.TIE).gamma)
    assert progs == frozenset("NE")


def test_gamma_on_identity_loop():
    out = gamma(one_tile())
    assert truth_set(identity_loop_model(), out.gamma) == {"x"}


def test_while_form_is_strict_and_star_free():
    out = gamma(checkerboard(), Encoding.FIX, Form.WHILE)
    for f in (out.rho1, out.rho2, out.rho3, out.gamma):
        assert is_strict(f)


def test_star_and_while_forms_agree():
    """Same truth sets on random models over the grid programs and tile atoms."""
    ts = checkerboard()
    stars = gamma(ts, Encoding.FIX, Form.STAR)
    whiles = gamma(ts, Encoding.FIX, Form.WHILE)
    for seed in range(200):
        m = random_model(seed, 1 + seed % 4, ["N", "E", "S", "W"], ["at_A", "at_B"],
                         deterministic=seed % 2 == 1)
        for name in ("rho1", "rho2", "rho3"):
            assert truth_set(m, getattr(stars, name)) == truth_set(m, getattr(whiles, name)), name
