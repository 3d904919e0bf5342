# app/cli.py
"""Command-line front end.

Exit codes: 0 satisfied / passed, 1 unsatisfied / failed, 2 input error,
3 search budget exhausted. Data goes to stdout; the run report and logs go
to stderr.
"""
import hashlib
import logging
import time
from pathlib import Path

import click
from pydantic import BaseModel

from app.documents import (
    dump_meta, dump_model, dump_tileset, dump_tiling, load_source, parse_model, parse_tileset,
    parse_tm, to_json, witness_bundle,
)
from app.errors import BudgetExceeded, WorkbenchError
from app.identities import run_identity_suite
from app.logic import destar
from app.parser import SourceText, parse_prop, print_program, print_prop
from app.reduction import Encoding, Form, gamma
from app.semantics import Evaluator
from app.tiling import TilingSearch, parse_shape, render_grid
from app.tm_compiler import SimulationPolicy, compile_tm, simulate
from app.witness import BoundedSearch, NoneUpTo, TorusSearch

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


# --- Run report ---

class InputDigest(BaseModel):
    name: str
    sha256: str


class RunReport(BaseModel):
    command: str
    inputs: list[InputDigest] = []
    outcome: str = "pending"
    exit_code: int = EXIT_OK
    elapsed_seconds: float = 0.0
    nodes_explored: int | None = None
    bound: str | None = None
    error: str | None = None

    def lines(self) -> list[str]:
        rows = [f"command: {self.command}"]
        rows += [f"input: {item.name} sha256={item.sha256}" for item in self.inputs]
        rows.append(f"outcome: {self.outcome}")
        rows.append(f"exit_code: {self.exit_code}")
        if self.nodes_explored is not None:
            rows.append(f"nodes_explored: {self.nodes_explored}")
        if self.bound is not None:
            rows.append(f"bound: {self.bound}")
        if self.error is not None:
            rows.append(f"error: {self.error}")
        rows.append(f"elapsed_seconds: {self.elapsed_seconds:.3f}")
        return rows


def emit_report(report: RunReport):
    for line in report.lines():
        click.echo(line, err=True)


class Run:
    """One command invocation: collects inputs, times the body and emits the report."""

    def __init__(self, ctx: click.Context, command: str):
        self.report = RunReport(command=command)
        self.json_report = ctx.obj.get("json_report") if ctx.obj else None
        self._started = time.perf_counter()

    def source(self, path: str) -> SourceText:
        src = load_source(path)
        self._digest(path, src.text)
        return src

    def formula_source(self, arg: str) -> SourceText:
        """A FORMULA argument names a file when one exists, otherwise it is the formula text."""
        if Path(arg).is_file():
            return self.source(arg)
        self._digest("<inline>", arg)
        return SourceText(arg)

    def _digest(self, name: str, text: str):
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        self.report.inputs.append(InputDigest(name=name, sha256=digest))

    def finish(self, exit_code: int, outcome: str) -> int:
        self.report.exit_code = exit_code
        self.report.outcome = outcome
        self.report.elapsed_seconds = time.perf_counter() - self._started
        if self.json_report:
            try:
                Path(self.json_report).write_text(self.report.model_dump_json(indent=2) + "\n", encoding="utf-8")
            except OSError as e:
                logger.error(f"Could not write run report to {self.json_report}: {e}")
                self.report.exit_code, self.report.outcome = EXIT_INPUT, "input-error"
                self.report.error = f"cannot write run report: {e}"
        emit_report(self.report)
        return self.report.exit_code

    def execute(self, body) -> int:
        """Run body(self) -> (exit_code, outcome), mapping library errors onto exit codes."""
        try:
            code, outcome = body(self)
        except BudgetExceeded as e:
            logger.error(f"{self.report.command}: {e}")
            self.report.nodes_explored = e.explored
            self.report.bound = e.bound
            self.report.error = str(e)
            return self.finish(EXIT_BUDGET, "budget-exhausted")
        except (WorkbenchError, ValueError) as e:
            logger.error(f"{self.report.command}: {e}")
            self.report.error = str(e)
            return self.finish(EXIT_INPUT, "input-error")
        except OSError as e:
            logger.error(f"{self.report.command}: cannot write output: {e}")
            self.report.error = f"cannot write output: {e}"
            return self.finish(EXIT_INPUT, "input-error")
        return self.finish(code, outcome)


# --- Commands ---

@click.group()
@click.option("--json-report", type=click.Path(dir_okay=False), default=None,
              help="Also write the run report as JSON to this path.")
@click.pass_context
def cli(ctx: click.Context, json_report):
    """Workbench for PDL with fix, Fix and program equivalence over finite models."""
    ctx.obj = {"json_report": json_report}


@cli.command()
@click.argument("model_path", metavar="MODEL")
@click.argument("formula", metavar="FORMULA")
@click.option("--state", default=None, help="State to check; any state when omitted.")
@click.pass_context
def check(ctx, model_path, formula, state):
    """Model-check FORMULA (file or inline text) on MODEL."""
    def body(run: Run):
        model = parse_model(run.source(model_path))
        f = parse_prop(run.formula_source(formula))
        holding = Evaluator(model).truth_set(f)
        ordered = [s for s in model.states if s in holding]
        click.echo(f"holds at: {', '.join(ordered) if ordered else '(none)'}")
        if state is not None:
            if state not in model.state_index:
                raise WorkbenchError(f"state {state} is not declared in the model")
            return (EXIT_OK, "satisfied") if state in holding else (EXIT_FAIL, "unsatisfied")
        return (EXIT_OK, "satisfied") if ordered else (EXIT_FAIL, "unsatisfied")
    return Run(ctx, "check").execute(body)


@cli.command()
@click.argument("tileset_path", metavar="TILESET")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--encoding", type=click.Choice([e.value for e in Encoding]), default=Encoding.FIX.value)
@click.option("--form", type=click.Choice([f.value for f in Form]), default=Form.STAR.value)
@click.pass_context
def reduce(ctx, tileset_path, out_dir, encoding, form):
    """Write square, rho1, rho2, rho3, gamma and gamma_T for TILESET into --out."""
    def body(run: Run):
        ts = parse_tileset(run.source(tileset_path))
        output = gamma(ts, Encoding(encoding), Form(form))
        target = Path(out_dir)
        target.mkdir(parents=True, exist_ok=True)
        for name, f in output.named().items():
            path = target / f"{name}.pdl"
            path.write_text(print_prop(f) + "\n", encoding="utf-8")
            click.echo(str(path))
        return EXIT_OK, "written"
    return Run(ctx, "reduce").execute(body)


@cli.command()
@click.argument("tileset_path", metavar="TILESET")
@click.option("--shape", "shape_text", required=True, help="rect:W,H or torus:N,M")
@click.option("--origin", default=None, help="Tile forced at position (0,0).")
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False),
              help="Write the tiling document here.")
@click.pass_context
def tile(ctx, tileset_path, shape_text, origin, out_path):
    """Search for a tiling of the given shape."""
    def body(run: Run):
        ts = parse_tileset(run.source(tileset_path))
        search = TilingSearch(ts, parse_shape(shape_text), fix_origin=origin)
        try:
            found = search.first()
        finally:
            run.report.nodes_explored = search.nodes
        run.report.bound = shape_text
        if found is None:
            click.echo(f"no tiling of {shape_text}")
            return EXIT_FAIL, "no-tiling"
        click.echo(render_grid(found))
        if out_path:
            Path(out_path).write_text(to_json(dump_tiling(found)), encoding="utf-8")
        return EXIT_OK, "tiled"
    return Run(ctx, "tile").execute(body)


@cli.command("compile-tm")
@click.argument("tm_path", metavar="TM")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.pass_context
def compile_tm_command(ctx, tm_path, out_dir):
    """Compile a Turing machine into tileset.json and meta.json under --out."""
    def body(run: Run):
        tm = parse_tm(run.source(tm_path))
        ts, meta = compile_tm(tm)
        target = Path(out_dir)
        target.mkdir(parents=True, exist_ok=True)
        (target / "tileset.json").write_text(to_json(dump_tileset(ts)), encoding="utf-8")
        (target / "meta.json").write_text(to_json(dump_meta(meta)), encoding="utf-8")
        click.echo(f"{len(ts.tiles)} tiles ({len(ts.neon)} neon) written to {target}")
        return EXIT_OK, "compiled"
    return Run(ctx, "compile-tm").execute(body)


@cli.command("simulate-tm")
@click.argument("tm_path", metavar="TM")
@click.option("--steps", required=True, type=click.IntRange(min=0))
@click.option("--policy", type=click.Choice([p.value for p in SimulationPolicy]),
              default=SimulationPolicy.FIRST_TRANSITION.value)
@click.pass_context
def simulate_tm(ctx, tm_path, steps, policy):
    """Print runs of at most --steps steps; exit 1 when every run halts earlier."""
    def body(run: Run):
        tm = parse_tm(run.source(tm_path))
        runs = simulate(tm, steps, SimulationPolicy(policy))
        for number, configs in enumerate(runs):
            click.echo(f"run {number}:")
            for j, c in enumerate(configs):
                tape = "".join(c.tape)
                click.echo(f"  {j}: state={c.state} head={c.head} tape={tape}")
        complete = any(len(configs) == steps + 1 for configs in runs)
        return (EXIT_OK, "ran") if complete else (EXIT_FAIL, "halted")
    return Run(ctx, "simulate-tm").execute(body)


@cli.command()
@click.argument("tileset_path", metavar="TILESET")
@click.option("--max-n", required=True, type=click.IntRange(min=1))
@click.option("--max-m", required=True, type=click.IntRange(min=1))
@click.option("--full-gamma", is_flag=True, help="Check gamma at (0,0) instead of gamma_T everywhere.")
@click.option("--encoding", type=click.Choice([e.value for e in Encoding]), default=Encoding.FIX.value)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False),
              help="Write the witness bundle here instead of stdout.")
@click.pass_context
def witness(ctx, tileset_path, max_n, max_m, full_gamma, encoding, out_path):
    """Search tori up to --max-n x --max-m for a witness model."""
    def body(run: Run):
        ts = parse_tileset(run.source(tileset_path))
        search = TorusSearch(ts, max_n, max_m, "gamma" if full_gamma else "gamma_T", Encoding(encoding))
        try:
            result = search.run()
        finally:
            run.report.nodes_explored = search.explored
        run.report.bound = f"{max_n}x{max_m}"
        if isinstance(result, NoneUpTo):
            click.echo(f"no torus witness up to {max_n}x{max_m}")
            return EXIT_FAIL, "none-up-to-bound"
        bundle = to_json(witness_bundle(ts, result))
        if out_path:
            Path(out_path).write_text(bundle, encoding="utf-8")
        else:
            click.echo(bundle, nl=False)
        return EXIT_OK, f"witness {result.n}x{result.m}"
    return Run(ctx, "witness").execute(body)


@cli.command("find-model")
@click.argument("formula", metavar="FORMULA")
@click.option("--max-states", required=True, type=click.IntRange(min=1))
@click.option("--det", is_flag=True, help="Only deterministic (partial function) programs.")
@click.pass_context
def find_model(ctx, formula, max_states, det):
    """Exhaustively search small models for one whose state 0 satisfies FORMULA."""
    def body(run: Run):
        f = parse_prop(run.formula_source(formula))
        search = BoundedSearch(f, max_states, deterministic=det)
        try:
            result = search.run()
        finally:
            run.report.nodes_explored = search.explored
        run.report.bound = f"{max_states} states"
        if isinstance(result, NoneUpTo):
            click.echo(f"no model up to {max_states} states")
            return EXIT_FAIL, "none-up-to-bound"
        click.echo(to_json(dump_model(result)), nl=False)
        return EXIT_OK, f"model with {len(result.states)} states"
    return Run(ctx, "find-model").execute(body)


@cli.command()
@click.option("--seed", required=True, type=int)
@click.option("--models", "n_models", required=True, type=click.IntRange(min=0))
@click.option("--max-states", default=5, show_default=True, type=click.IntRange(min=1))
@click.option("--det", is_flag=True, help="Make every model deterministic.")
@click.pass_context
def identities(ctx, seed, n_models, max_states, det):
    """Check the identity catalogue on seeded random models."""
    def body(run: Run):
        report = run_identity_suite(seed, n_models, max_states, det)
        click.echo(f"models: {report.models}  checks: {report.checks}  failures: {len(report.failures)}")
        for failure in report.failures:
            click.echo(f"  {failure.identity} fails on model seed {failure.model_seed} "
                       f"at {failure.counterexample.witness}")
        return (EXIT_OK, "all-hold") if report.passed else (EXIT_FAIL, "counterexamples")
    return Run(ctx, "identities").execute(body)


@cli.command("destar")
@click.argument("formula", metavar="FORMULA")
@click.pass_context
def destar_command(ctx, formula):
    """Print FORMULA with box/diamond stars rewritten into while loops."""
    def body(run: Run):
        f = parse_prop(run.formula_source(formula))
        click.echo(print_prop(destar(f, render=print_program)))
        return EXIT_OK, "rewritten"
    return Run(ctx, "destar").execute(body)


def dispatch(argv) -> int:
    """Run the command line and return its exit code instead of exiting."""
    try:
        result = cli.main(args=list(argv), prog_name="pdl-workbench", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        ctx = getattr(e, "ctx", None)
        command = ctx.info_name if ctx is not None and ctx.info_name else "pdl-workbench"
        logger.error(f"{command}: {e.format_message()}")
        emit_report(RunReport(command=command, outcome="usage-error", exit_code=EXIT_INPUT,
                              error=e.format_message()))
        return EXIT_INPUT
    except click.exceptions.Abort:
        return EXIT_INPUT
    # --help and bare group invocations return None.
    return result if isinstance(result, int) else EXIT_OK
