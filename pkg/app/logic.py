# app/logic.py
"""Abstract syntax of the formula language and its syntactic transformations.

Propositions and programs are mutually recursive trees of frozen dataclasses.
Every node is immutable and hashable, so trees can be shared freely.
"""
import logging
import re
from dataclasses import dataclass
from functools import reduce
from typing import Callable

from app.errors import NonEliminableStar

logger = logging.getLogger(__name__)

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


# --- Propositions ---

@dataclass(frozen=True)
class TruthConst:
    value: bool


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        if not IDENTIFIER.match(self.name):
            raise ValueError(f"Atom name must be a nonempty identifier, got {self.name!r}")


@dataclass(frozen=True)
class Not:
    operand: "Proposition"


@dataclass(frozen=True)
class And:
    left: "Proposition"
    right: "Proposition"


@dataclass(frozen=True)
class Or:
    left: "Proposition"
    right: "Proposition"


@dataclass(frozen=True)
class Implies:
    left: "Proposition"
    right: "Proposition"


@dataclass(frozen=True)
class Diamond:
    program: "Program"
    body: "Proposition"


@dataclass(frozen=True)
class Box:
    program: "Program"
    body: "Proposition"


@dataclass(frozen=True)
class FixP:
    """fix(p): p relates the state to itself and to nothing else."""
    program: "Program"


@dataclass(frozen=True)
class BigFix:
    """Fix(p): every p-successor of the state is the state itself."""
    program: "Program"


@dataclass(frozen=True)
class Tie:
    """p ~ q: both programs have the same successor set at the state."""
    left: "Program"
    right: "Program"


# --- Programs ---

@dataclass(frozen=True)
class AtomicProg:
    name: str

    def __post_init__(self):
        if not IDENTIFIER.match(self.name):
            raise ValueError(f"Program name must be a nonempty identifier, got {self.name!r}")


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Test:
    condition: "Proposition"


@dataclass(frozen=True)
class Seq:
    first: "Program"
    second: "Program"


@dataclass(frozen=True)
class Union:
    left: "Program"
    right: "Program"


@dataclass(frozen=True)
class Inter:
    left: "Program"
    right: "Program"


@dataclass(frozen=True)
class Diff:
    left: "Program"
    right: "Program"


@dataclass(frozen=True)
class Star:
    body: "Program"


@dataclass(frozen=True)
class IfThenElse:
    condition: "Proposition"
    then_branch: "Program"
    else_branch: "Program"


@dataclass(frozen=True)
class WhileDo:
    condition: "Proposition"
    body: "Program"


Proposition = TruthConst | Atom | Not | And | Or | Implies | Diamond | Box | FixP | BigFix | Tie
Program = AtomicProg | Skip | Test | Seq | Union | Inter | Diff | Star | IfThenElse | WhileDo

PROPOSITION_TYPES = (TruthConst, Atom, Not, And, Or, Implies, Diamond, Box, FixP, BigFix, Tie)
PROGRAM_TYPES = (AtomicProg, Skip, Test, Seq, Union, Inter, Diff, Star, IfThenElse, WhileDo)

TOP = TruthConst(True)
BOTTOM = TruthConst(False)
SKIP = Skip()


def is_proposition(node) -> bool:
    return isinstance(node, PROPOSITION_TYPES)


def is_program(node) -> bool:
    return isinstance(node, PROGRAM_TYPES)


# --- Builders ---

def conj(parts) -> Proposition:
    """Left-nested conjunction; the empty conjunction is true."""
    parts = list(parts)
    if not parts:
        return TOP
    return reduce(And, parts)


def disj(parts) -> Proposition:
    """Left-nested disjunction; the empty disjunction is false."""
    parts = list(parts)
    if not parts:
        return BOTTOM
    return reduce(Or, parts)


def iff(left: Proposition, right: Proposition) -> Proposition:
    return And(Implies(left, right), Implies(right, left))


def seq(*programs) -> Program:
    """Left-nested composition of one or more programs."""
    if not programs:
        return SKIP
    return reduce(Seq, programs)


def conjuncts(f: Proposition) -> list:
    """Flatten the top-level And spine of f."""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def children(node) -> tuple:
    """Immediate subterms of a proposition or program node, in field order."""
    match node:
        case TruthConst() | Atom() | AtomicProg() | Skip():
            return ()
        case Not(operand=x) | Test(condition=x) | Star(body=x) | FixP(program=x) | BigFix(program=x):
            return (x,)
        case And(left=l, right=r) | Or(left=l, right=r) | Implies(left=l, right=r) | Tie(left=l, right=r):
            return (l, r)
        case Union(left=l, right=r) | Inter(left=l, right=r) | Diff(left=l, right=r):
            return (l, r)
        case Seq(first=l, second=r):
            return (l, r)
        case Diamond(program=p, body=b) | Box(program=p, body=b):
            return (p, b)
        case IfThenElse(condition=c, then_branch=t, else_branch=e):
            return (c, t, e)
        case WhileDo(condition=c, body=b):
            return (c, b)
    raise TypeError(f"Not a formula node: {node!r}")


def walk(node):
    """Pre-order traversal over every node of a formula tree."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(children(current)))


# --- Operations ---

def atomic_names(f) -> tuple[frozenset[str], frozenset[str]]:
    """Return (proposition names, program names) occurring in f."""
    props = set()
    progs = set()
    for node in walk(f):
        if isinstance(node, Atom):
            props.add(node.name)
        elif isinstance(node, AtomicProg):
            progs.add(node.name)
    return frozenset(props), frozenset(progs)


def is_strict(f) -> bool:
    """True iff f uses only the well-structured program constructs."""
    return not any(isinstance(node, (Union, Inter, Diff, Star)) for node in walk(f))


def destar(f: Proposition, render: Callable[[Program], str] = repr) -> Proposition:
    """Rewrite [x*]a and <x*>a into while-do form, bottom-up.

    [x*]a becomes [while a do x]false and <x*>a becomes <while !a do x>true.
    A Star anywhere else raises NonEliminableStar naming the offending subterm,
    shown with `render` (pass the printer for surface syntax).
    """
    try:
        result = _destar_prop(f)
    except NonEliminableStar as e:
        rendered = render(e.subterm)
        logger.warning(f"Non-eliminable star: {rendered}")
        raise NonEliminableStar(e.subterm, rendered) from None
    logger.debug(f"destar: {type(f).__name__} rewritten")
    return result


def _destar_prop(f: Proposition) -> Proposition:
    match f:
        case TruthConst() | Atom():
            return f
        case Not(operand=x):
            return Not(_destar_prop(x))
        case And(left=l, right=r):
            return And(_destar_prop(l), _destar_prop(r))
        case Or(left=l, right=r):
            return Or(_destar_prop(l), _destar_prop(r))
        case Implies(left=l, right=r):
            return Implies(_destar_prop(l), _destar_prop(r))
        case Box(program=Star(body=x), body=body):
            return Box(WhileDo(_destar_prop(body), _destar_prog(x)), BOTTOM)
        case Diamond(program=Star(body=x), body=body):
            return Diamond(WhileDo(Not(_destar_prop(body)), _destar_prog(x)), TOP)
        case Box(program=p, body=body):
            return Box(_destar_prog(p), _destar_prop(body))
        case Diamond(program=p, body=body):
            return Diamond(_destar_prog(p), _destar_prop(body))
        case FixP(program=p):
            return FixP(_destar_prog(p))
        case BigFix(program=p):
            return BigFix(_destar_prog(p))
        case Tie(left=l, right=r):
            return Tie(_destar_prog(l), _destar_prog(r))
    raise TypeError(f"Not a proposition: {f!r}")


def _destar_prog(p: Program) -> Program:
    match p:
        case AtomicProg() | Skip():
            return p
        case Test(condition=c):
            return Test(_destar_prop(c))
        case Seq(first=l, second=r):
            return Seq(_destar_prog(l), _destar_prog(r))
        case Union(left=l, right=r):
            return Union(_destar_prog(l), _destar_prog(r))
        case Inter(left=l, right=r):
            return Inter(_destar_prog(l), _destar_prog(r))
        case Diff(left=l, right=r):
            return Diff(_destar_prog(l), _destar_prog(r))
        case IfThenElse(condition=c, then_branch=t, else_branch=e):
            return IfThenElse(_destar_prop(c), _destar_prog(t), _destar_prog(e))
        case WhileDo(condition=c, body=b):
            return WhileDo(_destar_prop(c), _destar_prog(b))
        case Star():
            raise NonEliminableStar(p)
    raise TypeError(f"Not a program: {p!r}")
