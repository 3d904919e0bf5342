# app/identities.py
"""Algebraic identities between the program constructions, checked on seeded
random models, and the search for a nondeterministic model on which the
deterministic expression of tie breaks down."""
import logging
from dataclasses import dataclass, field

from app.logic import (
    BOTTOM, SKIP, TOP, And, Atom, AtomicProg, BigFix, Box, Diamond, Diff, FixP, Inter, Not, Or,
    Seq, Star, Test, Tie, WhileDo, iff,
)
from app.semantics import Counterexample, KripkeModel, check_identity, random_model
from app.witness import NoneUpTo, bounded_sat

logger = logging.getLogger(__name__)

p, q = AtomicProg("p"), AtomicProg("q")
a = Atom("a")

PROGRAM_NAMES = ("p", "q")
PROPOSITION_NAMES = ("a", "b")


@dataclass(frozen=True)
class Identity:
    name: str
    lhs: object
    rhs: object
    deterministic_only: bool = False


def tie_as_intersection(left=p, right=q):
    """<p^q>true | !(<p>true | <q>true): tie for partial functions."""
    return Or(Diamond(Inter(left, right), TOP), Not(Or(Diamond(left, TOP), Diamond(right, TOP))))


def identity_catalog() -> list[Identity]:
    return [
        Identity("Fix-from-fix", BigFix(p), Or(FixP(p), Box(p, BOTTOM))),
        Identity("fix-from-Fix", FixP(p), And(BigFix(p), Diamond(p, TOP))),
        Identity("fix-as-tie-with-skip", FixP(p), Tie(p, SKIP)),
        Identity("intersection-from-difference", Inter(p, q), Diff(p, Diff(p, q))),
        Identity("fix-from-difference", FixP(p),
                 And(Diamond(p, TOP), Box(Diff(p, Inter(p, SKIP)), BOTTOM))),
        Identity("box-star-elimination", Box(Star(p), a), Box(WhileDo(a, p), BOTTOM)),
        Identity("diamond-star-elimination", Diamond(Star(p), a), Diamond(WhileDo(Not(a), p), TOP)),
        Identity("skip-as-test", SKIP, Test(TOP)),
        Identity("tie-from-intersection", Tie(p, q), tie_as_intersection(), deterministic_only=True),
        Identity("intersection-from-tie", Inter(p, q), Seq(Test(Tie(p, q)), p), deterministic_only=True),
        Identity("fix-from-intersection", FixP(p), Diamond(Inter(p, SKIP), TOP), deterministic_only=True),
    ]


@dataclass(frozen=True)
class Failure:
    identity: str
    model_seed: int
    counterexample: Counterexample


@dataclass
class SuiteReport:
    models: int = 0
    checks: int = 0
    failures: list[Failure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def model_seed(seed: int, index: int) -> int:
    return seed * 1_000_003 + index


def run_identity_suite(seed: int, n_models: int, max_states: int = 5,
                       deterministic: bool = False) -> SuiteReport:
    """Check every catalogued identity on n_models random models.

    Model i has 1 + i mod max_states states; odd-indexed models (or all of
    them when deterministic is set) are deterministic.
    """
    if n_models < 0 or max_states < 1:
        raise ValueError(f"need n_models >= 0 and max_states >= 1, got {n_models}, {max_states}")
    catalog = identity_catalog()
    report = SuiteReport()
    for index in range(n_models):
        det = deterministic or index % 2 == 1
        mseed = model_seed(seed, index)
        model = random_model(mseed, 1 + index % max_states, PROGRAM_NAMES, PROPOSITION_NAMES, deterministic=det)
        report.models += 1
        for identity in catalog:
            if identity.deterministic_only and not det:
                continue
            report.checks += 1
            verdict = check_identity(model, identity.lhs, identity.rhs)
            if isinstance(verdict, Counterexample):
                logger.warning(f"Identity {identity.name} fails on model seed {mseed} at {verdict.witness}")
                report.failures.append(Failure(identity.name, mseed, verdict))
    logger.info(f"Identity suite: {report.models} models, {report.checks} checks, {len(report.failures)} failures")
    return report


def tie_separation_formula():
    """States where tie and its deterministic expression disagree."""
    return Not(iff(Tie(p, q), tie_as_intersection()))


def find_tie_separation(max_states: int = 3, budget: int | None = None) -> KripkeModel | NoneUpTo:
    """Smallest nondeterministic model whose state "0" separates the two."""
    return bounded_sat(tie_separation_formula(), max_states, deterministic=False, budget=budget, workers=1)
