import numpy as np
import pytest

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from app.errors import UnknownState
from app.logic import (
    BOTTOM, TOP, And, Atom, AtomicProg, BigFix, Box, Diamond, Diff, FixP, IfThenElse, Inter, Not,
    Or, Seq, Skip, Star, Test, Tie, Union, WhileDo, destar,
)
from app.semantics import (
    Counterexample, Equal, Evaluator, KripkeModel, check_identity, denote, random_model,
    reflexive_transitive_closure, truth_set, validate_model,
)

p, q = AtomicProg("p"), AtomicProg("q")
a, b = Atom("a"), Atom("b")


def chain_model():
    """s0 -p-> s1 -p-> s2, a at s0 and s1, b at s2."""
    return KripkeModel(
        states=("s0", "s1", "s2"),
        prog_rel={"p": {("s0", "s1"), ("s1", "s2")}},
        valuation={"a": {"s0", "s1"}, "b": {"s2"}},
        deterministic=True,
    )


def separation_model():
    return KripkeModel(
        states=("a", "b", "c"),
        prog_rel={"p": {("a", "b"), ("a", "c")}, "q": {("a", "b")}},
    )


def test_atomic_and_boolean_truth_sets():
    m = chain_model()
    assert truth_set(m, a) == {"s0", "s1"}
    assert truth_set(m, Not(a)) == {"s2"}
    assert truth_set(m, And(a, b)) == frozenset()
    assert truth_set(m, Or(a, b)) == {"s0", "s1", "s2"}
    assert truth_set(m, TOP) == {"s0", "s1", "s2"}
    assert truth_set(m, BOTTOM) == frozenset()


def test_missing_names_are_empty():
    """Names the model does not mention denote the empty relation or set."""
    m = chain_model()
    assert denote(m, AtomicProg("zzz")) == frozenset()
    assert truth_set(m, Atom("zzz")) == frozenset()
    assert truth_set(m, Box(AtomicProg("zzz"), BOTTOM)) == {"s0", "s1", "s2"}


def test_modalities_and_star():
    m = chain_model()
    assert truth_set(m, Diamond(p, b)) == {"s1"}
    assert truth_set(m, Box(p, a)) == {"s0", "s2"}
    assert truth_set(m, Diamond(Star(p), b)) == {"s0", "s1", "s2"}
    assert truth_set(m, Box(Star(p), a)) == frozenset()
    assert denote(m, Star(p)) >= {("s0", "s0"), ("s0", "s2")}


def test_programs():
    m = chain_model()
    assert denote(m, Skip()) == {("s0", "s0"), ("s1", "s1"), ("s2", "s2")}
    assert denote(m, Seq(p, p)) == {("s0", "s2")}
    assert denote(m, Test(b)) == {("s2", "s2")}
    assert denote(m, Union(p, Skip())) == denote(m, p) | denote(m, Skip())
    assert denote(m, Inter(p, Skip())) == frozenset()
    assert denote(m, Diff(Star(p), Skip())) == {("s0", "s1"), ("s1", "s2"), ("s0", "s2")}


def test_if_and_while():
    m = chain_model()
    assert denote(m, IfThenElse(a, p, Skip())) == {("s0", "s1"), ("s1", "s2"), ("s2", "s2")}
    # Run p while a holds: every state ends at s2.
    assert denote(m, WhileDo(a, p)) == {("s0", "s2"), ("s1", "s2"), ("s2", "s2")}
    # A loop that never exits relates nothing.
    looping = KripkeModel(("x",), {"p": {("x", "x")}}, {"a": {"x"}})
    assert denote(looping, WhileDo(a, p)) == frozenset()


def test_fix_and_Fix():
    """fix needs a self-loop and nothing else; Fix only forbids moving."""
    m = KripkeModel(
        states=("x", "y", "z"),
        prog_rel={"p": {("x", "x"), ("y", "y"), ("y", "z")}},
    )
    assert truth_set(m, FixP(p)) == {"x"}
    assert truth_set(m, BigFix(p)) == {"x", "z"}
    assert truth_set(m, FixP(Skip())) == {"x", "y", "z"}


def test_tie():
    m = separation_model()
    assert truth_set(m, Tie(p, q)) == {"b", "c"}
    assert truth_set(m, Tie(p, p)) == {"a", "b", "c"}


def test_stray_states_raise():
    m = KripkeModel(("x",), {"p": {("x", "ghost")}}, {"a": {"ghost"}})
    with pytest.raises(UnknownState):
        denote(m, p)
    with pytest.raises(UnknownState):
        truth_set(m, a)


def test_evaluator_reuses_subterms():
    """Evaluating the same node twice returns the cached object."""
    m = chain_model()
    ev = Evaluator(m)
    f = Diamond(Star(p), b)
    first = ev.truth_set(f)
    assert ev.truth_set(f) is first


def _closure_oracle(states, relation):
    """Boolean-matrix closure: square (I + R) until it stops changing."""
    index = {s: i for i, s in enumerate(states)}
    k = len(states)
    matrix = np.eye(k, dtype=bool)
    for x, y in relation:
        matrix[index[x], index[y]] = True
    while True:
        squared = (matrix.astype(int) @ matrix.astype(int)) > 0
        if np.array_equal(squared, matrix):
            break
        matrix = squared
    return {(states[i], states[j]) for i in range(k) for j in range(k) if matrix[i, j]}


def test_star_matches_matrix_closure():
    """Reflexive-transitive closure agrees with repeated boolean matrix squaring."""
    for seed in range(40):
        m = random_model(seed, 1 + seed % 6, ["p"], [], density=0.3)
        expected = _closure_oracle(m.states, m.relation("p"))
        assert reflexive_transitive_closure(m.states, m.relation("p")) == expected
        assert denote(m, Star(p)) == expected


def test_check_identity_equal_and_counterexample():
    m = separation_model()
    assert check_identity(m, FixP(p), Tie(p, Skip())) == Equal()

    expr = Or(Diamond(Inter(p, q), TOP), Not(Or(Diamond(p, TOP), Diamond(q, TOP))))
    verdict = check_identity(m, Tie(p, q), expr)
    assert verdict == Counterexample("a", False)


def test_check_identity_on_programs():
    m = separation_model()
    verdict = check_identity(m, p, q)
    assert isinstance(verdict, Counterexample)
    assert verdict.witness == ("a", "c")
    assert verdict.lhs_holds is True
    with pytest.raises(ValueError):
        check_identity(m, p, TOP)


def test_validate_model_diagnostics():
    bad = KripkeModel(
        states=("x", "y"),
        prog_rel={"p": {("x", "y"), ("x", "x"), ("y", "ghost")}},
        valuation={"a": {"nowhere"}},
        deterministic=True,
    )
    codes = [d.code for d in validate_model(bad) if d.is_error]
    assert codes.count("dangling-state") == 2
    assert "not-deterministic" in codes
    message = next(d.message for d in validate_model(bad) if d.code == "not-deterministic")
    assert message == "p not deterministic at x: successors x, y"


def test_validate_model_injectivity_notes():
    m = chain_model()
    diagnostics = validate_model(m)
    assert not any(d.is_error for d in diagnostics)
    assert [d.code for d in diagnostics] == ["injective"]

    fan_in = KripkeModel(("x", "y"), {"p": {("x", "y"), ("y", "y")}})
    assert [d.code for d in validate_model(fan_in)] == ["not-injective"]


def test_random_model_is_reproducible():
    first = random_model(11, 4, ["p", "q"], ["a"], deterministic=True)
    second = random_model(11, 4, ["p", "q"], ["a"], deterministic=True)
    assert first == second
    assert first.states == ("s0", "s1", "s2", "s3")
    assert not any(d.is_error for d in validate_model(first))
    for name in ("p", "q"):
        sources = [x for x, _ in first.relation(name)]
        assert len(sources) == len(set(sources))


def test_random_model_rejects_bad_arguments():
    with pytest.raises(ValueError):
        random_model(0, 0, ["p"], [])
    with pytest.raises(ValueError):
        random_model(0, 2, ["p"], [], density=1.5)


def test_destar_preserves_truth_sets():
    """Star elimination agrees with the star forms on every model with up to 3 states."""
    formulas = [
        Box(Star(p), a),
        Diamond(Star(Seq(p, q)), b),
        Box(Star(p), Diamond(Star(q), And(a, b))),
        Or(Diamond(Star(Union(p, q)), a), Box(Star(p), Not(b))),
    ]
    for seed in range(150):
        m = random_model(seed, 1 + seed % 3, ["p", "q"], ["a", "b"], deterministic=seed % 3 == 0)
        for f in formulas:
            assert truth_set(m, f) == truth_set(m, destar(f))


def test_random_model_density_zero_is_empty():
    m = random_model(5, 3, ["p", "q"], ["a"], density=0)
    assert all(not m.relation(name) for name in ("p", "q"))
    assert m.holding("a") == frozenset()
