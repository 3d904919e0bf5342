# app/semantics.py
"""Finite relational (Kripke) models and exact evaluation.

Programs denote sets of state pairs, propositions denote sets of states.
Atomic names missing from a model denote the empty relation / empty set.
"""
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping

from app.errors import UnknownState
from app.logic import (
    And, Atom, AtomicProg, BigFix, Box, Diamond, Diff, FixP, IfThenElse, Implies, Inter,
    Not, Or, Program, Proposition, Seq, Skip, Star, Test, Tie, TruthConst, Union, WhileDo,
    is_program, is_proposition,
)

logger = logging.getLogger(__name__)

State = str
Pair = tuple[str, str]
Relation = frozenset[Pair]


@dataclass(frozen=True)
class KripkeModel:
    states: tuple[State, ...]
    prog_rel: Mapping[str, Relation] = field(default_factory=dict)
    valuation: Mapping[str, frozenset[State]] = field(default_factory=dict)
    deterministic: bool = False

    def __post_init__(self):
        # Normalize whatever iterables were passed into the frozen representation.
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "prog_rel", {
            name: frozenset((a, b) for a, b in pairs) for name, pairs in self.prog_rel.items()
        })
        object.__setattr__(self, "valuation", {
            name: frozenset(members) for name, members in self.valuation.items()
        })

    @cached_property
    def state_index(self) -> dict[State, int]:
        return {s: i for i, s in enumerate(self.states)}

    def relation(self, name: str) -> Relation:
        return self.prog_rel.get(name, frozenset())

    def holding(self, name: str) -> frozenset[State]:
        return self.valuation.get(name, frozenset())

    def state_order(self, state: State) -> int:
        return self.state_index[state]

    def pair_order(self, pair: Pair) -> tuple[int, int]:
        return self.state_index[pair[0]], self.state_index[pair[1]]


def successor_map(relation) -> dict[State, set[State]]:
    succ: dict[State, set[State]] = {}
    for a, b in relation:
        succ.setdefault(a, set()).add(b)
    return succ


def compose(first: Relation, second: Relation) -> Relation:
    succ = successor_map(second)
    return frozenset((a, c) for a, b in first for c in succ.get(b, ()))


def identity(states) -> Relation:
    return frozenset((s, s) for s in states)


def reflexive_transitive_closure(states, relation: Relation) -> Relation:
    """Worklist saturation: from every state, collect everything reachable."""
    succ = successor_map(relation)
    closure = set()
    for start in states:
        seen = {start}
        work = [start]
        while work:
            current = work.pop()
            for nxt in succ.get(current, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    work.append(nxt)
        closure.update((start, reached) for reached in seen)
    return frozenset(closure)


class Evaluator:
    """Evaluates many formulas against one model, sharing subterm results.

    Caches are keyed by node identity; the node is stored with its value so
    the id cannot be recycled while the evaluator lives.
    """

    def __init__(self, model: KripkeModel):
        self.model = model
        self._states = frozenset(model.states)
        self._relations: dict[int, tuple[Program, Relation]] = {}
        self._truths: dict[int, tuple[Proposition, frozenset[State]]] = {}

    # --- Programs ---
    def denote(self, p: Program) -> Relation:
        cached = self._relations.get(id(p))
        if cached is not None and cached[0] is p:
            return cached[1]
        value = self._denote(p)
        self._relations[id(p)] = (p, value)
        return value

    def _denote(self, p: Program) -> Relation:
        states = self.model.states
        match p:
            case AtomicProg(name=name):
                relation = self.model.relation(name)
                for a, b in relation:
                    if a not in self._states or b not in self._states:
                        raise UnknownState(f"program {name} relates ({a}, {b}) outside the model's states")
                return relation
            case Skip():
                return identity(states)
            case Test(condition=c):
                return identity(self.truth_set(c))
            case Seq(first=l, second=r):
                return compose(self.denote(l), self.denote(r))
            case Union(left=l, right=r):
                return self.denote(l) | self.denote(r)
            case Inter(left=l, right=r):
                return self.denote(l) & self.denote(r)
            case Diff(left=l, right=r):
                return self.denote(l) - self.denote(r)
            case Star(body=b):
                return reflexive_transitive_closure(states, self.denote(b))
            case IfThenElse(condition=c, then_branch=t, else_branch=e):
                holds = self.truth_set(c)
                fails = self._states - holds
                return compose(identity(holds), self.denote(t)) | compose(identity(fails), self.denote(e))
            case WhileDo(condition=c, body=b):
                holds = self.truth_set(c)
                fails = self._states - holds
                loop = compose(identity(holds), self.denote(b))
                return compose(reflexive_transitive_closure(states, loop), identity(fails))
        raise TypeError(f"Not a program: {p!r}")

    def successors(self, p: Program) -> dict[State, set[State]]:
        return successor_map(self.denote(p))

    # --- Propositions ---
    def truth_set(self, f: Proposition) -> frozenset[State]:
        cached = self._truths.get(id(f))
        if cached is not None and cached[0] is f:
            return cached[1]
        value = self._truth(f)
        self._truths[id(f)] = (f, value)
        return value

    def _truth(self, f: Proposition) -> frozenset[State]:
        everything = self._states
        match f:
            case TruthConst(value=v):
                return everything if v else frozenset()
            case Atom(name=name):
                members = self.model.holding(name)
                stray = members - everything
                if stray:
                    raise UnknownState(f"atom {name} holds at unknown states {sorted(stray)}")
                return members
            case Not(operand=x):
                return everything - self.truth_set(x)
            case And(left=l, right=r):
                return self.truth_set(l) & self.truth_set(r)
            case Or(left=l, right=r):
                return self.truth_set(l) | self.truth_set(r)
            case Implies(left=l, right=r):
                return (everything - self.truth_set(l)) | self.truth_set(r)
            case Diamond(program=p, body=b):
                body = self.truth_set(b)
                return frozenset(a for a, c in self.denote(p) if c in body)
            case Box(program=p, body=b):
                body = self.truth_set(b)
                return everything - frozenset(a for a, c in self.denote(p) if c not in body)
            case BigFix(program=p):
                return everything - frozenset(a for a, c in self.denote(p) if a != c)
            case FixP(program=p):
                relation = self.denote(p)
                moving = frozenset(a for a, c in relation if a != c)
                defined = frozenset(a for a, _ in relation)
                return defined - moving
            case Tie(left=l, right=r):
                left = self.successors(l)
                right = self.successors(r)
                return frozenset(a for a in everything if left.get(a, set()) == right.get(a, set()))
        raise TypeError(f"Not a proposition: {f!r}")


def denote(model: KripkeModel, p: Program) -> Relation:
    return Evaluator(model).denote(p)


def truth_set(model: KripkeModel, f: Proposition) -> frozenset[State]:
    return Evaluator(model).truth_set(f)


# --- Model diagnostics ---

@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "info"
    code: str
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity == "error"


def validate_model(model: KripkeModel) -> list[Diagnostic]:
    """Report dangling references, determinism violations and injectivity.

    Never raises; the injectivity notes are informational.
    """
    diagnostics: list[Diagnostic] = []
    known = set(model.states)

    if len(known) != len(model.states):
        diagnostics.append(Diagnostic("error", "duplicate-state", "state list contains duplicates"))

    for name in sorted(model.prog_rel):
        for a, b in sorted(model.prog_rel[name]):
            for s in (a, b):
                if s not in known:
                    diagnostics.append(Diagnostic(
                        "error", "dangling-state", f"{name} references unknown state {s} in pair ({a}, {b})"))
    for name in sorted(model.valuation):
        for s in sorted(model.valuation[name] - known):
            diagnostics.append(Diagnostic("error", "dangling-state", f"atom {name} holds at unknown state {s}"))

    order = {s: i for i, s in enumerate(model.states)}

    def rank(s):
        return (order.get(s, len(order)), s)

    for name in sorted(model.prog_rel):
        succ = successor_map(model.prog_rel[name])
        pred = successor_map((b, a) for a, b in model.prog_rel[name])
        if model.deterministic:
            for a in sorted(succ, key=rank):
                if len(succ[a]) > 1:
                    targets = ", ".join(sorted(succ[a], key=rank))
                    diagnostics.append(Diagnostic(
                        "error", "not-deterministic", f"{name} not deterministic at {a}: successors {targets}"))
        functional = all(len(v) <= 1 for v in succ.values())
        injective = functional and all(len(v) <= 1 for v in pred.values())
        if injective:
            diagnostics.append(Diagnostic("info", "injective", f"{name} is an injective partial function"))
        else:
            diagnostics.append(Diagnostic("info", "not-injective", f"{name} is not an injective partial function"))

    errors = sum(1 for d in diagnostics if d.is_error)
    if errors:
        logger.warning(f"Model validation found {errors} error diagnostics")
    return diagnostics


# --- Identity checking ---

@dataclass(frozen=True)
class Equal:
    pass


@dataclass(frozen=True)
class Counterexample:
    witness: State | Pair
    lhs_holds: bool


def check_identity(model: KripkeModel, lhs, rhs) -> Equal | Counterexample:
    """Compare truth sets (propositions) or denotations (programs) of lhs and rhs.

    On inequality the witness is the least element of the symmetric difference
    under the model's declared state order.
    """
    evaluator = Evaluator(model)
    if is_proposition(lhs) and is_proposition(rhs):
        left, right = evaluator.truth_set(lhs), evaluator.truth_set(rhs)
        key = model.state_order
    elif is_program(lhs) and is_program(rhs):
        left, right = evaluator.denote(lhs), evaluator.denote(rhs)
        key = model.pair_order
    else:
        raise ValueError("check_identity needs two propositions or two programs")
    difference = left ^ right
    if not difference:
        return Equal()
    witness = min(difference, key=key)
    return Counterexample(witness, witness in left)


# --- Random models ---

def random_model(seed: int, n_states: int, prog_names, prop_names,
                 deterministic: bool = False, density: float | Fraction = 0.5) -> KripkeModel:
    """Reproducible pseudo-random model over states s0..s{n-1}."""
    if n_states < 1:
        raise ValueError(f"random_model needs at least one state, got {n_states}")
    density = float(density)
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must lie in [0, 1], got {density}")

    rng = random.Random(seed)
    states = tuple(f"s{i}" for i in range(n_states))
    programs = {}
    for name in prog_names:
        pairs = set()
        if deterministic:
            for a in states:
                if rng.random() < density:
                    pairs.add((a, rng.choice(states)))
        else:
            for a in states:
                for b in states:
                    if rng.random() < density:
                        pairs.add((a, b))
        programs[name] = pairs
    valuation = {name: {s for s in states if rng.random() < density} for name in prop_names}
    return KripkeModel(states, programs, valuation, deterministic)
