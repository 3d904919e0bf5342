# app/witness.py
"""Finite witness models: torus models built from periodic tilings, exhaustive
bounded model search, and the torus-shaped specialization of that search."""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Literal

from app import config
from app.errors import BudgetExceeded, InvalidTiling
from app.logic import Proposition, atomic_names
from app.reduction import Encoding, gamma, gamma_T, tile_atom
from app.semantics import Evaluator, KripkeModel
from app.tiling import TileSet, Tiling, Torus, TilingSearch, Valid, diagonal_neon_states, verify_tiling

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoneUpTo:
    """Exhaustive search found nothing within the bound."""
    bound: int | tuple[int, int]
    explored: int = 0


def torus_state(i: int, j: int) -> str:
    return f"{i},{j}"


def torus_model(ts: TileSet, t: Tiling) -> KripkeModel:
    """Kripke model on the torus positions with N/E/S/W the unit translations."""
    if not isinstance(t.shape, Torus):
        raise InvalidTiling(f"torus_model needs a torus tiling, got {t.shape}")
    verdict = verify_tiling(ts, t)
    if verdict != Valid():
        raise InvalidTiling(f"tiling violates the {verdict.direction} relation at {verdict.position}")

    n, m = t.shape.n, t.shape.m
    positions = t.shape.positions()
    east = {(torus_state(i, j), torus_state((i + 1) % n, j)) for i, j in positions}
    north = {(torus_state(i, j), torus_state(i, (j + 1) % m)) for i, j in positions}
    valuation: dict[str, set[str]] = {tile_atom(ts, tile).name: set() for tile in ts.tiles}
    for (i, j), tile in t.assign.items():
        valuation[tile_atom(ts, tile).name].add(torus_state(i, j))
    return KripkeModel(
        states=tuple(torus_state(i, j) for i, j in positions),
        prog_rel={
            "E": east,
            "N": north,
            "W": {(b, a) for a, b in east},
            "S": {(b, a) for a, b in north},
        },
        valuation=valuation,
        deterministic=True,
    )


# --- Bounded model search ---

def _relation_options(k: int, deterministic: bool) -> list:
    """Choices for one program on k states, in enumeration order.

    Nondeterministic: a bit mask over the k*k pairs. Deterministic: a tuple
    giving each state's successor, None (undefined) first.
    """
    if deterministic:
        return list(product((None, *range(k)), repeat=k))
    return list(range(2 ** (k * k)))


def _build_model(k: int, deterministic: bool, prog_names, prop_names, choice) -> KripkeModel:
    states = tuple(str(s) for s in range(k))
    programs = {}
    for name, option in zip(prog_names, choice[:len(prog_names)]):
        if deterministic:
            programs[name] = {(states[a], states[b]) for a, b in enumerate(option) if b is not None}
        else:
            programs[name] = {(states[idx // k], states[idx % k]) for idx in range(k * k) if option >> idx & 1}
    valuation = {}
    for name, mask in zip(prop_names, choice[len(prog_names):]):
        valuation[name] = {states[s] for s in range(k) if mask >> s & 1}
    return KripkeModel(states, programs, valuation, deterministic)


def _search_block(f: Proposition, k: int, deterministic: bool, prog_names: tuple, prop_names: tuple,
                  leading: list, budget: int) -> tuple[tuple | None, int]:
    """Scan models whose first component is drawn from `leading`.

    Returns (first satisfying choice or None, models explored). Top-level so
    worker processes can import it.
    """
    components = [_relation_options(k, deterministic) for _ in prog_names]
    components += [list(range(2 ** k)) for _ in prop_names]
    if components:
        components[0] = leading
    explored = 0
    for choice in product(*components):
        explored += 1
        if explored > budget:
            raise BudgetExceeded(explored - 1, f"{k} states")
        model = _build_model(k, deterministic, prog_names, prop_names, choice)
        if "0" in Evaluator(model).truth_set(f):
            return choice, explored
    return None, explored


def _chunks(options: list, parts: int) -> list[list]:
    size = -(-len(options) // parts)
    return [options[idx:idx + size] for idx in range(0, len(options), size)]


class BoundedSearch:
    """Enumerate models on 1..max_states states, smallest first, and return the
    first one whose state "0" satisfies the formula."""

    def __init__(self, f: Proposition, max_states: int, deterministic: bool = False,
                 budget: int | None = None, workers: int | None = None):
        if max_states < 1:
            raise ValueError(f"max_states must be at least 1, got {max_states}")
        self.f = f
        self.max_states = max_states
        self.deterministic = deterministic
        self.budget = budget if budget is not None else config.model_budget()
        self.workers = workers if workers is not None else config.workers()
        props, progs = atomic_names(f)
        self.prop_names = tuple(sorted(props))
        self.prog_names = tuple(sorted(progs))
        self.explored = 0

    def _leading_options(self, k: int) -> list:
        if self.prog_names:
            return _relation_options(k, self.deterministic)
        if self.prop_names:
            return list(range(2 ** k))
        return [None]

    def _run_size(self, k: int) -> tuple | None:
        remaining = self.budget - self.explored
        leading = self._leading_options(k)
        args = (self.f, k, self.deterministic, self.prog_names, self.prop_names)

        if self.workers <= 1 or len(leading) < 2:
            try:
                choice, explored = _search_block(*args, leading, remaining)
            except BudgetExceeded as e:
                self.explored += e.explored
                raise BudgetExceeded(self.explored, f"{k} states")
            self.explored += explored
            return choice

        blocks = _chunks(leading, self.workers)
        logger.debug(f"Searching {k}-state models in {len(blocks)} blocks across {self.workers} workers")
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            futures = [pool.submit(_search_block, *args, block, remaining) for block in blocks]
            results = []
            for future in futures:
                try:
                    results.append(future.result())
                except BudgetExceeded as e:
                    self.explored += e.explored
                    raise BudgetExceeded(self.explored, f"{k} states")
        # Blocks are contiguous in enumeration order, so the first hit is the least witness.
        for choice, explored in results:
            self.explored += explored
            if choice is not None:
                return choice
        return None

    def run(self) -> KripkeModel | NoneUpTo:
        logger.info(f"Bounded model search up to {self.max_states} states over programs "
                    f"{list(self.prog_names)} and propositions {list(self.prop_names)}")
        for k in range(1, self.max_states + 1):
            choice = self._run_size(k)
            if choice is not None:
                model = _build_model(k, self.deterministic, self.prog_names, self.prop_names, choice)
                logger.info(f"Found a {k}-state model after {self.explored} candidates")
                return model
        logger.info(f"No model up to {self.max_states} states ({self.explored} candidates)")
        return NoneUpTo(self.max_states, self.explored)


def bounded_sat(f: Proposition, max_states: int, deterministic: bool = False,
                budget: int | None = None, workers: int | None = None) -> KripkeModel | NoneUpTo:
    return BoundedSearch(f, max_states, deterministic, budget, workers).run()


# --- Torus search ---

@dataclass(frozen=True)
class TorusWitness:
    n: int
    m: int
    tiling: Tiling
    model: KripkeModel
    formula: Proposition
    satisfying_states: tuple[str, ...]


class TorusSearch:
    """Tori in increasing area; the first tiling whose model satisfies the chosen formula."""

    def __init__(self, ts: TileSet, max_n: int, max_m: int,
                 which: Literal["gamma_T", "gamma"] = "gamma_T", encoding: Encoding = Encoding.FIX):
        if max_n < 1 or max_m < 1:
            raise ValueError(f"torus bounds must be at least 1, got {max_n}x{max_m}")
        if which not in ("gamma_T", "gamma"):
            raise ValueError(f"which must be gamma_T or gamma, got {which!r}")
        self.ts = ts
        self.max_n = max_n
        self.max_m = max_m
        self.which = which
        self.encoding = Encoding(encoding)
        self.explored = 0

    def formula(self) -> Proposition:
        if self.which == "gamma":
            return gamma(self.ts, self.encoding).gamma
        return gamma_T(self.ts, self.encoding)

    def sizes(self) -> list[tuple[int, int]]:
        pairs = [(n, m) for n in range(1, self.max_n + 1) for m in range(1, self.max_m + 1)]
        return sorted(pairs, key=lambda nm: (nm[0] * nm[1], nm[0], nm[1]))

    def run(self) -> TorusWitness | NoneUpTo:
        f = self.formula()
        full = self.which == "gamma"
        origin = self.ts.start if full else None
        for n, m in self.sizes():
            search = TilingSearch(self.ts, Torus(n, m), fix_origin=origin)
            try:
                for tiling in search.solutions():
                    if full and not diagonal_neon_states(self.ts, tiling):
                        continue
                    model = torus_model(self.ts, tiling)
                    holding = Evaluator(model).truth_set(f)
                    wanted = {torus_state(0, 0)} if full else set(model.states)
                    if wanted <= holding:
                        self.explored += search.nodes
                        logger.info(f"Torus witness {n}x{m} for {self.which} after {self.explored} nodes")
                        satisfying = tuple(s for s in model.states if s in holding)
                        return TorusWitness(n, m, tiling, model, f, satisfying)
                    logger.warning(f"Torus {n}x{m} tiling does not satisfy {self.which}; trying the next one")
            except BudgetExceeded:
                self.explored += search.nodes
                raise BudgetExceeded(self.explored, f"torus {n}x{m}")
            self.explored += search.nodes
        logger.info(f"No torus witness up to {self.max_n}x{self.max_m}")
        return NoneUpTo((self.max_n, self.max_m), self.explored)


def torus_sat(ts: TileSet, max_n: int, max_m: int, which: Literal["gamma_T", "gamma"] = "gamma_T",
              encoding: Encoding = Encoding.FIX) -> TorusWitness | NoneUpTo:
    return TorusSearch(ts, max_n, max_m, which, encoding).run()
