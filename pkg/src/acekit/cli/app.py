"""Typer CLI application for acekit."""

from __future__ import annotations

import json
from collections.abc import Iterator
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Annotated, Optional

import typer
from loguru import logger
from pydantic import ValidationError

from acekit import __version__
from acekit.cli.display import (
    console,
    create_progress,
    emit_error,
    print_estimate,
    print_json,
    print_methods,
    print_multipliers,
    print_scenarios,
    print_success,
    print_summary,
)
from acekit.core.config import Config, config_dir, data_dir
from acekit.core.models import (
    AceEstimate,
    Dataset,
    EstimatorSpec,
    ExperimentPlan,
    NormalLinearModel,
    Regime,
    Scenario,
)
from acekit.core.rng import SeededRng
from acekit.exceptions import AceKitError, ConfigError, DataError, WrongShapeError

app = typer.Typer(
    name="acekit",
    help="Average causal effect estimation and simulation studies.",
    no_args_is_help=True,
    rich_markup_mode="rich",
)


class MethodChoice(str, Enum):
    FACE = "face"
    REG = "reg"
    REG_LD = "reg-ld"
    REG_QD = "reg-qd"
    SUBCLASS = "subclass"
    IPW = "ipw"
    AIPW = "aipw"
    WRESP = "wresp"
    LOGIT = "logit"
    LOGIT_PS = "logit-ps"


class PsChoice(str, Enum):
    LOGISTIC = "logistic"
    LD = "ld"
    QD = "qd"


class OutcomeChoice(str, Enum):
    JOINT = "joint"
    PER_ARM = "per-arm"
    ZERO = "zero"
    OPTIMAL = "optimal"


_SCORE_FOR_PS = {PsChoice.LOGISTIC: "ps_logistic", PsChoice.LD: "ld_sample", PsChoice.QD: "qd_sample"}


def version_callback(value: bool) -> None:
    if value:
        console.print(f"acekit {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    version: Annotated[
        Optional[bool],
        typer.Option("--version", "-V", callback=version_callback, is_eager=True),
    ] = None,
    verbose: Annotated[
        bool,
        typer.Option("--verbose", "-v", help="Enable verbose logging"),
    ] = False,
) -> None:
    """acekit: estimate average causal effects and reproduce simulation studies."""
    if verbose:
        logger.enable("acekit")
    else:
        logger.disable("acekit")


@contextmanager
def _errors() -> Iterator[None]:
    """Turn library errors into a JSON document on stderr and the error's exit code."""
    try:
        yield
    except AceKitError as exc:
        emit_error(exc)
        raise typer.Exit(exc.exit_code) from exc
    except ValidationError as exc:
        error = ConfigError(f"Invalid input: {exc.errors(include_url=False)}")
        emit_error(error)
        raise typer.Exit(error.exit_code) from exc
    except OSError as exc:
        error = DataError(f"Cannot write output: {exc}")
        emit_error(error)
        raise typer.Exit(error.exit_code) from exc


def _split(text: str | None) -> list[str] | None:
    if text is None:
        return None
    return [item.strip() for item in text.split(",") if item.strip()]


def _parse_bins(text: str | None) -> list[float] | None:
    if text is None:
        return None
    from acekit.simgen.scenarios import seq

    try:
        start, stop, step = (float(part) for part in text.split(","))
    except ValueError:
        raise ConfigError(f"--bins expects 'start,stop,step', got {text!r}") from None
    if step <= 0 or stop <= start:
        raise ConfigError(f"--bins needs start < stop and step > 0, got {text!r}")
    return seq(start, stop, step)


def _load_scenario(name: str | None, path: Path | None) -> Scenario:
    from acekit.simgen import load_scenario_file, scenario

    if (name is None) == (path is None):
        raise ConfigError("give exactly one of --scenario and --scenario-file")
    return scenario(name) if name else load_scenario_file(path)


def _load_data(
    data: Path,
    treatment: str,
    response: str | None,
    covariates: str | None,
    impute_seed: int | None,
    config: Config,
) -> Dataset:
    from acekit.harness import hot_deck_impute, ingest_csv

    table = ingest_csv(data, treatment, response, _split(covariates))
    if table.has_missing:
        seed = config.harness.master_seed if impute_seed is None else impute_seed
        logger.info(f"Hot-deck imputing {int(table.mask.sum())} missing cells with seed {seed}")
        table = hot_deck_impute(table, SeededRng(seed))
    return table.to_dataset()


def estimator_spec(
    method: MethodChoice, ps: PsChoice, m: OutcomeChoice, k: int
) -> EstimatorSpec:
    """Library estimator configuration behind a CLI method choice."""
    common = {"name": method.value, "ps": ps.value, "m": m.value.replace("-", "_"), "k": k}
    match method:
        case MethodChoice.FACE:
            return EstimatorSpec(method="face", **common)
        case MethodChoice.REG:
            return EstimatorSpec(method="reg", adjust="x", **common)
        case MethodChoice.REG_LD:
            return EstimatorSpec(method="reg", adjust="ld_sample", **common)
        case MethodChoice.REG_QD:
            return EstimatorSpec(method="reg", adjust="qd_sample", **common)
        case MethodChoice.SUBCLASS:
            return EstimatorSpec(method="subclass", adjust=_SCORE_FOR_PS[ps], **common)
        case MethodChoice.IPW:
            return EstimatorSpec(method="ipw", **common)
        case MethodChoice.AIPW:
            return EstimatorSpec(method="aipw", **common)
        case MethodChoice.WRESP:
            return EstimatorSpec(method="wresp", **common)
        case MethodChoice.LOGIT:
            return EstimatorSpec(method="logit", adjust="x", **common)
        case MethodChoice.LOGIT_PS:
            return EstimatorSpec(method="logit", adjust="ps_logistic", **common)
    raise ConfigError(f"unknown method {method!r}")


@app.command()
def simulate(
    scenario: Annotated[
        Optional[str], typer.Option("--scenario", "-s", help="Built-in scenario name")
    ] = None,
    scenario_file: Annotated[
        Optional[Path], typer.Option("--scenario-file", help="Scenario JSON file")
    ] = None,
    reps: Annotated[Optional[int], typer.Option("--reps", help="Number of replicates")] = None,
    n: Annotated[Optional[int], typer.Option("--n", help="Sample size per replicate")] = None,
    seed: Annotated[Optional[int], typer.Option("--seed", help="Master seed")] = None,
    workers: Annotated[
        Optional[int], typer.Option("--workers", "-w", help="Worker threads")
    ] = None,
    bins: Annotated[
        Optional[str], typer.Option("--bins", help="Histogram edges as start,stop,step")
    ] = None,
    out: Annotated[
        Optional[Path], typer.Option("--out", "-o", help="Output directory")
    ] = None,
) -> None:
    """Run a Monte Carlo study and write summary and histogram files."""
    from acekit.harness import run_experiment, write_summary

    with _errors():
        config = Config.load()
        base = _load_scenario(scenario, scenario_file)
        # a built-in scenario is passed by name so its default estimators apply
        plan = ExperimentPlan(
            scenario=base.name if scenario is not None else None,
            model=None if scenario is not None else base.model,
            n=n or base.n,
            replicates=reps or base.replicates,
            bins=_parse_bins(bins) or base.bins,
            seed=config.harness.master_seed if seed is None else seed,
        )
        total = plan.replicates
        with create_progress() as progress:
            task = progress.add_task("Replicates", total=total)
            summary = run_experiment(
                plan,
                workers=workers or config.harness.workers,
                numerics=config.numerics,
                progress=lambda: progress.advance(task),
            )
        out_dir = out or config.harness.output_dir
        written = write_summary(summary, out_dir, config.harness.csv_decimals)
    print_summary(summary)
    print_success(f"Wrote {len(written)} files to {out_dir}")


@app.command()
def estimate(
    data: Annotated[Path, typer.Option("--data", "-d", help="CSV file")],
    treatment: Annotated[str, typer.Option("--treatment", help="Binary treatment column")],
    response: Annotated[str, typer.Option("--response", help="Response column")],
    method: Annotated[MethodChoice, typer.Option("--method", help="Estimator")],
    covariates: Annotated[
        Optional[str], typer.Option("--covariates", help="Comma-separated covariate columns")
    ] = None,
    ps: Annotated[PsChoice, typer.Option("--ps", help="Propensity score model")] = PsChoice.LOGISTIC,
    m: Annotated[
        OutcomeChoice, typer.Option("--m", help="Outcome model for AIPW")
    ] = OutcomeChoice.JOINT,
    k: Annotated[int, typer.Option("--k", min=1, help="Number of subclasses")] = 5,
    impute_seed: Annotated[
        Optional[int], typer.Option("--impute-seed", help="Seed for hot-deck imputation")
    ] = None,
    clip: Annotated[
        bool, typer.Option("--clip", help="Clip propensity scores instead of failing")
    ] = False,
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="Write JSON here")] = None,
    pretty: Annotated[bool, typer.Option("--pretty", help="Show a summary panel")] = False,
) -> None:
    """Estimate the ACE from a CSV file and print it as JSON."""
    from acekit.harness import EstimationContext, get_method

    with _errors():
        config = Config.load()
        dataset = _load_data(data, treatment, response, covariates, impute_seed, config)
        spec = estimator_spec(method, ps, m, k)
        numerics = config.numerics.model_copy(update={"clip_ps": clip or config.numerics.clip_ps})
        result: AceEstimate = get_method(spec.method).estimate(
            dataset, spec, EstimationContext(numerics=numerics)
        )
        document = result.model_dump_json()
        if out is not None:
            out.write_text(document + "\n")
    if pretty:
        print_estimate(result)
    else:
        print_json(document)


@app.command()
def asymptotics(
    scenario: Annotated[str, typer.Option("--scenario", "-s", help="Scenario name")] = "fig5",
    as_json: Annotated[bool, typer.Option("--json", help="Print JSON")] = False,
) -> None:
    """Print the closed-form asymptotic variance multipliers of the toy model."""
    from acekit.estimators import asymptotic_variance_toy
    from acekit.simgen import scenario as get_scenario

    with _errors():
        model = get_scenario(scenario).model
        if not isinstance(model, NormalLinearModel):
            raise WrongShapeError(f"scenario {scenario!r} is not a normal linear model")
        multipliers = {
            which: asymptotic_variance_toy(model, which) for which in ("M0", "M1", "M2", "M3")
        }
    if as_json:
        print_json(json.dumps(multipliers))
    else:
        print_multipliers(multipliers)


@app.command(name="ps-density")
def ps_density_command(
    data: Annotated[Path, typer.Option("--data", "-d", help="CSV file")],
    treatment: Annotated[str, typer.Option("--treatment", help="Binary treatment column")],
    covariates: Annotated[
        Optional[str], typer.Option("--covariates", help="Comma-separated covariate columns")
    ] = None,
    response: Annotated[
        Optional[str], typer.Option("--response", help="Response column to leave out")
    ] = None,
    ps: Annotated[PsChoice, typer.Option("--ps", help="Propensity score model")] = PsChoice.LOGISTIC,
    impute_seed: Annotated[
        Optional[int], typer.Option("--impute-seed", help="Seed for hot-deck imputation")
    ] = None,
    grid_points: Annotated[
        Optional[int], typer.Option("--grid-points", min=2, help="Grid size over [0, 1]")
    ] = None,
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="Write CSV here")] = None,
    ps_out: Annotated[
        Optional[Path], typer.Option("--ps-out", help="Write the fitted propensity score as JSON")
    ] = None,
) -> None:
    """Per-arm kernel density of the estimated propensity score."""
    from acekit.harness import EstimationContext, ps_density
    from acekit.harness.methods import resolve_ps

    with _errors():
        config = Config.load()
        dataset = _load_data(data, treatment, response, covariates, impute_seed, config)
        spec = EstimatorSpec(name="ps", method="ipw", ps=ps.value)
        score = resolve_ps(spec, dataset, EstimationContext(numerics=config.numerics))
        frame = ps_density(dataset, score, grid_points or config.density.grid_points)
        text = frame.to_csv(index=False, lineterminator="\n")
        if ps_out is not None:
            ps_out.write_text(json.dumps(score.to_document(), indent=2) + "\n")
        if out is not None:
            out.write_text(text)
    if out is None:
        print_json(text.rstrip("\n"))
    else:
        print_success(f"Wrote {out}")


@app.command()
def generate(
    out: Annotated[Path, typer.Option("--out", "-o", help="Output CSV file")],
    scenario: Annotated[
        Optional[str], typer.Option("--scenario", "-s", help="Built-in scenario name")
    ] = None,
    scenario_file: Annotated[
        Optional[Path], typer.Option("--scenario-file", help="Scenario JSON file")
    ] = None,
    n: Annotated[Optional[int], typer.Option("--n", min=1, help="Sample size")] = None,
    seed: Annotated[Optional[int], typer.Option("--seed", help="Master seed")] = None,
    replicate: Annotated[int, typer.Option("--replicate", min=0, help="Stream index")] = 0,
    regime: Annotated[Regime, typer.Option("--regime", help="Generation regime")] = (
        Regime.OBSERVATIONAL
    ),
) -> None:
    """Write one simulated dataset as CSV."""
    from acekit.harness import export_dataset_csv
    from acekit.simgen import generate as generate_data

    with _errors():
        config = Config.load()
        base = _load_scenario(scenario, scenario_file)
        rng = SeededRng(config.harness.master_seed if seed is None else seed, replicate)
        dataset = generate_data(base.model, n or base.n, regime, rng)
        export_dataset_csv(dataset, out)
    print_success(f"Wrote {dataset.n} rows to {out}")


@app.command()
def scenarios(
    dump: Annotated[
        Optional[str], typer.Option("--dump", help="Print one scenario as JSON")
    ] = None,
) -> None:
    """List built-in scenarios."""
    from acekit.simgen import list_scenarios, scenario, scenario_to_json

    if dump is None:
        print_scenarios(list_scenarios())
        return
    with _errors():
        print_json(scenario_to_json(scenario(dump)))


@app.command()
def methods() -> None:
    """List registered estimation methods."""
    from acekit.harness.methods import get_all_methods

    print_methods(get_all_methods())


@app.command(name="config-path")
def config_path() -> None:
    """Show config and data directory paths."""
    console.print(f"[bold]Config:[/bold] {config_dir() / 'acekit.toml'}")
    console.print(f"[bold]Data:[/bold]   {data_dir()}")


def run() -> None:
    app()
