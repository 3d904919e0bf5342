# app/reduction.py
"""Tile sets to grid formulas: square, rho1, rho2, rho3, gamma and gamma_T.

Grid programs are N, E, S, W (fix encoding) or N, E only (tie encoding); each
tile T contributes one proposition atom, see tile_atom.
"""
import logging
from dataclasses import dataclass
from enum import Enum

from app.logic import (
    IDENTIFIER, And, Atom, AtomicProg, Box, Diamond, FixP, Implies, Not, Proposition, Star, Tie,
    conj, destar, disj, seq,
)
from app.tiling import TileSet

logger = logging.getLogger(__name__)

N, E, S, W = (AtomicProg(name) for name in ("N", "E", "S", "W"))


class Encoding(str, Enum):
    FIX = "fix"
    TIE = "tie"


class Form(str, Enum):
    STAR = "star"
    WHILE = "while"


@dataclass(frozen=True)
class ReductionOutput:
    square: Proposition
    rho1: Proposition
    rho2: Proposition
    rho3: Proposition
    gamma: Proposition
    gamma_T: Proposition
    encoding: Encoding
    form: Form

    def named(self) -> dict[str, Proposition]:
        """Formulas keyed by the file stem the CLI writes them under."""
        return {
            "square": self.square,
            "rho1": self.rho1,
            "rho2": self.rho2,
            "rho3": self.rho3,
            "gamma": self.gamma,
            "gamma_T": self.gamma_T,
        }


def tile_atom(ts: TileSet, tile: str) -> Atom:
    """at_<name> when the tile name is an identifier, otherwise tile<index>."""
    if IDENTIFIER.match(tile):
        return Atom(f"at_{tile}")
    return Atom(f"tile{ts.index[tile]}")


def _grid(body: Proposition, form: Form) -> Proposition:
    """[N*][E*]body, rewritten into while form when asked."""
    wrapped = Box(Star(N), Box(Star(E), body))
    return destar(wrapped) if Form(form) is Form.WHILE else wrapped


def square_prop(encoding: Encoding = Encoding.FIX) -> Proposition:
    """Going round a unit square returns to the start, in both directions."""
    if Encoding(encoding) is Encoding.TIE:
        return Tie(seq(N, E), seq(E, N))
    clockwise = [
        FixP(seq(N, S)),
        Box(N, FixP(seq(E, W))),
        Box(seq(N, E), FixP(seq(S, N))),
        Box(seq(N, E, S), FixP(seq(W, E))),
        FixP(seq(N, E, S, W)),
    ]
    anticlockwise = [
        FixP(seq(E, W)),
        Box(E, FixP(seq(N, S))),
        Box(seq(E, N), FixP(seq(W, E))),
        Box(seq(E, N, W), FixP(seq(S, N))),
        FixP(seq(E, N, W, S)),
    ]
    return conj(clockwise + anticlockwise)


def rho1(encoding: Encoding = Encoding.FIX, form: Form = Form.STAR) -> Proposition:
    return _grid(square_prop(encoding), form)


def exactly_one(atoms: list[Atom]) -> Proposition:
    """At least one atom holds and no two hold together."""
    at_least = disj(atoms)
    at_most = [Not(And(a, b)) for idx, a in enumerate(atoms) for b in atoms[idx + 1:]]
    return conj([at_least] + at_most)


def rho2(ts: TileSet, form: Form = Form.STAR) -> Proposition:
    """Every grid point carries exactly one tile and its east/north neighbours agree with h/v."""
    atoms = [tile_atom(ts, t) for t in ts.tiles]
    clauses = []
    for tile, atom in zip(ts.tiles, atoms):
        east = disj(tile_atom(ts, u) for u in ts.tiles if u in ts.right_of[tile])
        north = disj(tile_atom(ts, u) for u in ts.tiles if u in ts.above[tile])
        clauses.append(Implies(atom, And(Box(E, east), Box(N, north))))
    return _grid(And(exactly_one(atoms), conj(clauses)), form)


def neon_prop(ts: TileSet) -> Proposition:
    return disj(tile_atom(ts, t) for t in ts.tiles if t in ts.neon)


def rho3(ts: TileSet, form: Form = Form.STAR) -> Proposition:
    """Along the north-east diagonal a neon tile always lies ahead."""
    diagonal = Star(seq(N, E))
    formula = Box(diagonal, Diamond(diagonal, neon_prop(ts)))
    return destar(formula) if Form(form) is Form.WHILE else formula


def gamma(ts: TileSet, encoding: Encoding = Encoding.FIX, form: Form = Form.STAR) -> ReductionOutput:
    encoding, form = Encoding(encoding), Form(form)
    square = square_prop(encoding)
    r1 = rho1(encoding, form)
    r2 = rho2(ts, form)
    r3 = rho3(ts, form)
    output = ReductionOutput(
        square=square,
        rho1=r1,
        rho2=r2,
        rho3=r3,
        gamma=conj([tile_atom(ts, ts.start), r1, r2, r3]),
        gamma_T=And(r1, r2),
        encoding=encoding,
        form=form,
    )
    logger.info(f"Reduced tile set of {len(ts.tiles)} tiles ({encoding.value} encoding, {form.value} form)")
    return output


def gamma_T(ts: TileSet, encoding: Encoding = Encoding.FIX, form: Form = Form.STAR) -> Proposition:
    """rho1 and rho2 alone: the formula a periodic tiling satisfies everywhere."""
    return And(rho1(encoding, form), rho2(ts, form))

