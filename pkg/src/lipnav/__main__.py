"""CLI entry point for lipnav - Lipschitz Navigator."""

import functools
import logging
import sys
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, NoReturn, TypeVar

import click
from rich.console import Console
from rich.logging import RichHandler

from lipnav.config import Config, RunConfig, load_config
from lipnav.core.freespace import free_norm_dual, free_norm_primal, min_tv_representation
from lipnav.core.geometry import SliceSpec, combo_diameter, daugavet_gap, slice_diameter, ssd2p_witness_value
from lipnav.core.linprog import SolveMode, Tolerances, at_most
from lipnav.core.metric import FiniteMetricSpace, PointSubset, validate
from lipnav.core.properties import (
    TrapezoidWitness,
    check_balls_lemma,
    check_family,
    check_local,
    check_ltp_finite,
    check_ltp_inequality,
    check_sltp_finite,
    check_sltp_inequality,
)
from lipnav.core.reports import PropertyReport, Status
from lipnav.errors import LipnavError, MetricAxiomError
from lipnav.files import FORMATS, dump_space, emit, load_family, load_free_vector, load_function, load_space
from lipnav.files import document, space_to_dict
from lipnav.reproduce import Target, generate_space, run_reproduction
from lipnav.utils.formatting import parse_point_list
from lipnav.utils.rationals import parse_rational

logger = logging.getLogger("lipnav")

F = TypeVar("F", bound=Callable[..., Any])


class RationalType(click.ParamType):
    """Exact rational from "p/q" or decimal text."""

    name = "rational"

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None) -> Fraction:
        if isinstance(value, Fraction):
            return value
        try:
            return parse_rational(str(value))
        except LipnavError as exc:
            self.fail(str(exc), param, ctx)


RATIONAL = RationalType()
EXISTING = click.Path(exists=True, dir_okay=False, path_type=Path)


@dataclass
class CliState:
    """Settings shared by every subcommand: config file values overridden by flags."""

    config: Config
    mode: SolveMode
    format: str
    output: Path | None
    seed: int
    cap: int

    @property
    def tolerances(self) -> Tolerances:
        return self.config.solver.tolerances

    @property
    def max_violations(self) -> int:
        return self.config.limits.max_violations

    def run(self, subcommand: str, inputs: Mapping[str, object]) -> RunConfig:
        return RunConfig(
            subcommand=subcommand,
            inputs={k: str(v) for k, v in inputs.items() if v is not None},
            mode=self.mode,
            format=self.format,
            point_cap=self.cap,
            seed=self.seed,
        )


def setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def handle_errors(func: F) -> F:
    """Turn LipnavError into a one-line message and exit code 2."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except LipnavError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper  # type: ignore[return-value]


def finish(state: CliState, run: RunConfig, payload: Mapping[str, object], passed: bool) -> NoReturn:
    """Emit the report document and exit 0 on pass, 1 on fail."""
    doc = document(payload, run.to_dict())
    text = emit(doc, state.format, state.output)
    if state.output is None:
        click.echo(text, nl=False)
    sys.exit(0 if passed else 1)


def _with_run_info(report: PropertyReport, state: CliState) -> PropertyReport:
    report.mode = str(state.mode)
    report.tolerances = state.tolerances.to_dict()
    return report


@click.group()
@click.option(
    "--config",
    "config_path",
    type=EXISTING,
    default=None,
    help="Config file (default ~/.config/lipnav/config.toml)",
)
@click.option("--mode", type=click.Choice(["exact", "float"]), default=None, help="LP arithmetic")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default=None, help="Report format")
@click.option(
    "--output",
    "-o",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the report here instead of stdout",
)
@click.option("--seed", type=int, default=None, help="Seed for randomized pipelines")
@click.option("--cap", type=click.IntRange(min=1), default=None, help="Generator point cap")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging on stderr")
@click.pass_context
def main(
    ctx: click.Context,
    config_path: Path | None,
    mode: str | None,
    fmt: str | None,
    output: Path | None,
    seed: int | None,
    cap: int | None,
    verbose: bool,
) -> None:
    """lipnav - Lipschitz Navigator.

    Checks trapezoid-type inequalities on finite pointed metric spaces,
    computes Lipschitz-free norms and slice diameters by linear
    programming, and rebuilds the witness constructions of the diameter-two
    and Daugavet arguments.

    Examples:
      lipnav validate --space space.json
      lipnav check ltp --space ex.json --A u1,v1 --u u1 --v v1 --eps 0
      lipnav diameter slice --space two.json --functional F.json --alpha 1/10
      lipnav reproduce kn --n 2 --dims 6
    """
    setup_logging(verbose)
    try:
        config = load_config(config_path)
    except (OSError, ValueError) as exc:
        raise click.UsageError(f"cannot load config: {exc}") from exc
    ctx.obj = CliState(
        config=config,
        mode=SolveMode.parse(mode or config.solver.mode),
        format=fmt or config.output.format,
        output=output,
        seed=config.seed if seed is None else seed,
        cap=config.limits.point_cap if cap is None else cap,
    )


pass_state = click.make_pass_decorator(CliState)


@main.command("validate")
@click.option("--space", "space_path", type=EXISTING, required=True)
@pass_state
@handle_errors
def validate_cmd(state: CliState, space_path: Path) -> None:
    """Check the metric axioms of a space file."""
    run = state.run("validate", {"space": space_path})
    try:
        space = load_space(space_path)
    except MetricAxiomError as exc:
        finish(state, run, exc.report.to_dict(), False)
    report = validate(space)
    finish(state, run, report.to_dict(), report.passed)


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


@main.group("check")
def check() -> None:
    """Trapezoid inequalities, families, the balls lemma and locality."""


def _space_option(func: F) -> F:
    return click.option("--space", "space_path", type=EXISTING, required=True, help="Space JSON file")(func)


def _pair_check(kind: str) -> Callable[..., None]:
    @_space_option
    @click.option("--A", "a_text", default=None, help="Excluded set, comma separated")
    @click.option("--u", "u", default=None, help="Witness point u (omit u and v to search all of N)")
    @click.option("--v", "v", default=None, help="Witness point v")
    @click.option("--eps", type=RATIONAL, default=Fraction(0), show_default=True)
    @click.option("--N", "n_text", default=None, help="Finite search: test only x, y in N")
    @pass_state
    @handle_errors
    def command(
        state: CliState,
        space_path: Path,
        a_text: str | None,
        u: str | None,
        v: str | None,
        eps: Fraction,
        n_text: str | None,
    ) -> None:
        if (u is None) != (v is None):
            raise click.UsageError("give both --u and --v, or neither")
        run = state.run(f"check {kind}", {"space": space_path, "A": a_text, "N": n_text})
        space = load_space(space_path)
        if n_text is not None:
            N = PointSubset.of(space, parse_point_list(n_text))
            finite = check_ltp_finite if kind == "ltp" else check_sltp_finite
            candidates = None if u is None or v is None else [(u, v)]
            report = finite(space, N, eps, candidates, state.max_violations)
        elif u is None or v is None:
            raise click.UsageError("--u and --v are required without --N")
        else:
            members = parse_point_list(a_text) if a_text else [u, v]
            w = TrapezoidWitness.create(space, members, u, v, eps)
            if kind == "ltp":
                report = check_ltp_inequality(space, w, state.max_violations)
            else:
                report = check_sltp_inequality(space, w)
        finish(state, run, _with_run_info(report, state).to_dict(), report.passed)

    command.__doc__ = f"The {kind} inequality for one witness, or a finite search over N with --N."
    return command


check.command("ltp")(_pair_check("ltp"))
check.command("sltp")(_pair_check("sltp"))


@check.command("family")
@_space_option
@click.option("--family", "family_path", type=EXISTING, required=True, help="Family JSON file")
@click.option("--eps", type=RATIONAL, default=None, help="Override the family epsilon")
@click.option("--kinds", default="ltp,sltp", show_default=True)
@pass_state
@handle_errors
def check_family_cmd(
    state: CliState, space_path: Path, family_path: Path, eps: Fraction | None, kinds: str
) -> None:
    """Disjointness and per-member inequalities of a witness family."""
    run = state.run("check family", {"space": space_path, "family": family_path})
    space = load_space(space_path)
    fam = load_family(family_path, space, eps)
    report = check_family(space, fam, parse_point_list(kinds), state.max_violations)
    finish(state, run, _with_run_info(report, state).to_dict(), report.passed)


@check.command("balls-lemma")
@_space_option
@click.option("--p", "p", required=True)
@click.option("--r", "r", type=RATIONAL, required=True)
@click.option("--s", "s", type=RATIONAL, default=Fraction(0), show_default=True)
@click.option("--u", "u", required=True)
@click.option("--v", "v", required=True)
@click.option("--eps", type=RATIONAL, required=True)
@pass_state
@handle_errors
def check_balls_cmd(
    state: CliState, space_path: Path, p: str, r: Fraction, s: Fraction, u: str, v: str, eps: Fraction
) -> None:
    """Hypotheses and conclusions of the balls lemma."""
    run = state.run("check balls-lemma", {"space": space_path})
    space = load_space(space_path)
    report = check_balls_lemma(space, p, r, s, u, v, eps)
    finish(state, run, _with_run_info(report, state).to_dict(), report.passed)


@check.command("local")
@_space_option
@click.option("--function", "function_path", type=EXISTING, required=True)
@click.option("--eps", type=RATIONAL, required=True)
@pass_state
@handle_errors
def check_local_cmd(state: CliState, space_path: Path, function_path: Path, eps: Fraction) -> None:
    """Whether a function's norm is nearly attained on a pair closer than eps."""
    run = state.run("check local", {"space": space_path, "function": function_path})
    space = load_space(space_path)
    f = load_function(function_path, space)
    report = check_local(space, f, eps)
    finish(state, run, _with_run_info(report, state).to_dict(), report.passed)


# ---------------------------------------------------------------------------
# diameter
# ---------------------------------------------------------------------------


@main.group("diameter")
def diameter() -> None:
    """Diameters of slices and their convex combinations, and Daugavet gaps."""


def _slices(
    state: CliState, space: FiniteMetricSpace, paths: tuple[Path, ...], alphas: tuple[Fraction, ...]
) -> list[SliceSpec]:
    if not paths:
        raise click.UsageError("give at least one --functional")
    if len(alphas) == 1:
        alphas = alphas * len(paths)
    if len(alphas) != len(paths):
        raise click.UsageError(f"{len(alphas)} --alpha values for {len(paths)} functionals")
    return [
        SliceSpec.create(load_free_vector(p, space), a, state.mode, state.tolerances)
        for p, a in zip(paths, alphas)
    ]


def _functional_options(func: F) -> F:
    func = click.option(
        "--alpha", type=RATIONAL, multiple=True, required=True,
        help="Slice depth in (0, 2]",
    )(func)
    func = click.option(
        "--functional", "functionals", type=EXISTING, multiple=True,
        required=True, help="FreeVector JSON file",
    )(func)
    return _space_option(func)


@diameter.command("slice")
@_functional_options
@pass_state
@handle_errors
def diameter_slice(
    state: CliState,
    space_path: Path,
    functionals: tuple[Path, ...],
    alpha: tuple[Fraction, ...],
) -> None:
    """sup ||f - g|| over one closed slice."""
    run = state.run("diameter slice", {"space": space_path, "functional": functionals[0]})
    space = load_space(space_path)
    (s,) = _slices(state, space, functionals[:1], alpha[:1])
    result = slice_diameter(space, s, state.mode, state.tolerances)
    finish(state, run, result.to_dict(), True)


@diameter.command("combo")
@_functional_options
@click.option("--lambdas", required=True, help="Comma separated weights summing to 1")
@pass_state
@handle_errors
def diameter_combo(
    state: CliState, space_path: Path, functionals: tuple[Path, ...], alpha: tuple[Fraction, ...], lambdas: str
) -> None:
    """Diameter of a convex combination of slices."""
    run = state.run("diameter combo", {"space": space_path, "lambdas": lambdas})
    space = load_space(space_path)
    slices = _slices(state, space, functionals, alpha)
    weights = [parse_rational(x) for x in parse_point_list(lambdas)]
    result = combo_diameter(space, slices, weights, state.mode, state.tolerances)
    finish(state, run, result.to_dict(), True)


@diameter.command("ssd2p")
@_functional_options
@pass_state
@handle_errors
def diameter_ssd2p(
    state: CliState,
    space_path: Path,
    functionals: tuple[Path, ...],
    alpha: tuple[Fraction, ...],
) -> None:
    """Largest ||g|| with f_i and f_i +- g in every slice."""
    run = state.run("diameter ssd2p", {"space": space_path})
    space = load_space(space_path)
    result = ssd2p_witness_value(space, _slices(state, space, functionals, alpha), state.mode, state.tolerances)
    finish(state, run, result.to_dict(), True)


@diameter.command("daugavet")
@_functional_options
@click.option("--function", "function_path", type=EXISTING, required=True, help="Norm-one function")
@pass_state
@handle_errors
def diameter_daugavet(
    state: CliState,
    space_path: Path,
    functionals: tuple[Path, ...],
    alpha: tuple[Fraction, ...],
    function_path: Path,
) -> None:
    """sup ||f - g|| over g in a slice."""
    run = state.run("diameter daugavet", {"space": space_path, "function": function_path})
    space = load_space(space_path)
    f = load_function(function_path, space)
    (s,) = _slices(state, space, functionals[:1], alpha[:1])
    result = daugavet_gap(space, f, s, state.mode, state.tolerances)
    finish(state, run, result.to_dict(), True)


# ---------------------------------------------------------------------------
# norm, generate, reproduce
# ---------------------------------------------------------------------------


@main.command("norm")
@_space_option
@click.option("--functional", "functional_path", type=EXISTING, required=True)
@pass_state
@handle_errors
def norm_cmd(state: CliState, space_path: Path, functional_path: Path) -> None:
    """Free norm three ways: dual LP, transport LP and least de Leeuw mass."""
    run = state.run("norm", {"space": space_path, "functional": functional_path})
    space = load_space(space_path)
    F = load_free_vector(functional_path, space)
    dual, witness = free_norm_dual(F, state.mode, state.tolerances)
    primal, plan = free_norm_primal(F, state.mode, state.tolerances)
    mu = min_tv_representation(F, state.mode, state.tolerances)
    tv = mu.total_variation()
    margin = state.tolerances.margin(state.mode)
    agree = all(at_most(abs(a - b), Fraction(0), margin) for a, b in ((dual, primal), (dual, tv)))
    payload: dict[str, object] = {
        "check": "norm",
        "status": str(Status.of(agree)),
        "F": F.as_dict(),
        "dual": dual,
        "primal": primal,
        "min_tv": tv,
        "norming_function": witness.as_dict(),
        "transport_plan": plan.as_dict(),
        "representation": mu.as_dict(),
        "mode": str(state.mode),
        "tolerances": state.tolerances.to_dict(),
    }
    finish(state, run, payload, agree)


@main.command("generate")
@click.argument("kind")
@click.option("--K", "K", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--n", "n", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--dims", type=click.IntRange(min=1), default=4, show_default=True)
@click.option("--level-cap", type=click.IntRange(min=0), default=2, show_default=True)
@pass_state
@handle_errors
def generate_cmd(state: CliState, kind: str, K: int, n: int, dims: int, level_cap: int) -> None:
    """Write a generated space as JSON.

    KIND is kn, ex-sltp, ex-seqltp, ex-d2p, unbounded, limit-point,
    shrinking-pairs or daugavet-remark.
    """
    space = generate_space(kind, K=K, n=n, dims=dims, level_cap=level_cap, cap=state.cap)
    logger.info("generated %s with %d points", kind, space.size)
    if state.output is not None:
        dump_space(space, state.output)
    else:
        click.echo(emit(space_to_dict(space), "json"), nl=False)


@main.command("reproduce")
@click.argument("target", type=click.Choice([str(t) for t in Target]))
@click.option("--K", "K", type=click.IntRange(min=1), default=None)
@click.option("--n", "n", type=click.IntRange(min=1), default=None)
@click.option("--dims", type=click.IntRange(min=1), default=None)
@click.option("--eps", type=RATIONAL, default=None)
@click.option("--delta", type=RATIONAL, default=None)
@click.option("--samples", type=click.IntRange(min=1), default=None, help="Random functionals (daugavet-prop)")
@pass_state
@handle_errors
def reproduce_cmd(
    state: CliState,
    target: str,
    K: int | None,
    n: int | None,
    dims: int | None,
    eps: Fraction | None,
    delta: Fraction | None,
    samples: int | None,
) -> None:
    """Rebuild one example end to end and verify every claimed inequality."""
    params: dict[str, object] = {"cap": state.cap}
    if target in (Target.KN,):
        params.update(n=n, dims=dims, epsilon=eps)
    elif target == Target.EX_SLTP:
        params.update(K=K, epsilon=eps)
    elif target == Target.DAUGAVET_PROP:
        params.update(
            K=K, delta=delta, seed=state.seed, samples=samples,
            mode=state.mode, tolerances=state.tolerances,
        )
    else:
        params.update(K=K, delta=delta)
    run = state.run(f"reproduce {target}", {k: v for k, v in params.items() if k != "tolerances"})
    bundle = run_reproduction(target, **params)
    failure = bundle.first_failure()
    if failure is not None:
        click.echo(
            f"first failure: {failure.name} (expected {failure.expected}, observed {failure.observed})",
            err=True,
        )
    finish(state, run, bundle.to_dict(), bundle.passed)


if __name__ == "__main__":
    main()
