"""Monte Carlo experiment runner and replicate summaries."""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Callable
from dataclasses import dataclass

import anyio
import numpy as np
from loguru import logger

from acekit.core.config import NumericsConfig
from acekit.core.models import (
    EstimatorSpec,
    EstimatorSummary,
    ExperimentPlan,
    HistogramBin,
    McSummary,
    Regime,
)
from acekit.core.rng import SeededRng
from acekit.exceptions import AceKitError, ConfigError
from acekit.harness.methods import (
    EstimationContext,
    GenerativeModel,
    Method,
    default_estimators,
    get_method,
)
from acekit.simgen import generate, scenario, true_ace

MAX_EXTRA_BINS = 100
DEFAULT_BIN_COUNT = 10


@dataclass(frozen=True)
class ResolvedPlan:
    """An experiment plan with scenario defaults filled in."""

    scenario: str | None
    model: GenerativeModel
    n: int
    replicates: int
    seed: int
    estimators: list[EstimatorSpec]
    bins: list[float] | None


def resolve_plan(plan: ExperimentPlan) -> ResolvedPlan:
    """Fill missing plan fields from the named scenario and check the estimator list."""
    base = scenario(plan.scenario) if plan.scenario else None
    model = plan.model or base.model
    n = plan.n or (base.n if base else None)
    replicates = plan.replicates or (base.replicates if base else None)
    if n is None or replicates is None:
        raise ConfigError("an inline model needs both n and replicates")
    estimators = plan.estimators or default_estimators(plan.scenario, model)
    names = [spec.name for spec in estimators]
    duplicates = sorted(name for name, count in Counter(names).items() if count > 1)
    if duplicates:
        raise ConfigError(f"estimator names must be unique: {', '.join(duplicates)}")
    for spec in estimators:
        get_method(spec.method)
    return ResolvedPlan(
        scenario=plan.scenario,
        model=model,
        n=n,
        replicates=replicates,
        seed=plan.seed,
        estimators=estimators,
        bins=plan.bins or (base.bins if base else None),
    )


ReplicateResult = list[float | str]


def run_replicate(
    resolved: ResolvedPlan,
    methods: list[Method],
    ctx: EstimationContext,
    replicate: int,
) -> ReplicateResult:
    """Generate replicate ``replicate`` and apply every estimator.

    Each entry is the estimate or, when the estimator failed, the error class name.
    """
    rng = SeededRng(resolved.seed, replicate)
    try:
        data = generate(resolved.model, resolved.n, Regime.OBSERVATIONAL, rng)
    except AceKitError as exc:
        logger.warning(f"Replicate {replicate}: data generation failed: {exc}")
        return [type(exc).__name__] * len(methods)

    results: ReplicateResult = []
    for spec, method in zip(resolved.estimators, methods):
        try:
            value = method.estimate(data, spec, ctx).estimate
        except AceKitError as exc:
            logger.warning(f"Replicate {replicate}: {spec.name} failed: {exc}")
            results.append(type(exc).__name__)
            continue
        if not math.isfinite(value):
            logger.warning(f"Replicate {replicate}: {spec.name} returned {value}")
            results.append("NonFiniteEstimate")
            continue
        results.append(value)
    return results


def histogram(values: list[float], edges: list[float] | None) -> list[HistogramBin]:
    """Bin counts over ``edges``, widened by whole bins until every value is covered."""
    if edges is None or len(edges) < 2:
        if not values:
            return []
        lo, hi = min(values), max(values)
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        edges = np.linspace(lo, hi, DEFAULT_BIN_COUNT + 1).tolist()
    edges = sorted(float(e) for e in edges)
    if values:
        lo, hi = min(values), max(values)
        left_width = edges[1] - edges[0]
        right_width = edges[-1] - edges[-2]
        if lo < edges[0]:
            extra = math.ceil((edges[0] - lo) / left_width)
            if extra > MAX_EXTRA_BINS:
                edges.insert(0, lo)
            else:
                edges = [edges[0] - left_width * i for i in range(extra, 0, -1)] + edges
        if hi > edges[-1]:
            extra = math.ceil((hi - edges[-1]) / right_width)
            if extra > MAX_EXTRA_BINS:
                edges.append(hi)
            else:
                edges = edges + [edges[-1] + right_width * i for i in range(1, extra + 1)]
        # rounding in the widened edges must not drop the extremes
        edges[0], edges[-1] = min(edges[0], lo), max(edges[-1], hi)
    counts, _ = np.histogram(np.asarray(values, dtype=np.float64), bins=np.asarray(edges))
    return [
        HistogramBin(bin_left=left, bin_right=right, count=int(count))
        for left, right, count in zip(edges[:-1], edges[1:], counts)
    ]


def summarize(
    name: str, outcomes: list[float | str], delta_true: float, edges: list[float] | None
) -> EstimatorSummary:
    """Mean, sd and MSE over successful replicates, with failures counted by error type."""
    values = [v for v in outcomes if not isinstance(v, str)]
    failures = Counter(v for v in outcomes if isinstance(v, str))
    mean = sd = mse = None
    if values:
        array = np.asarray(values, dtype=np.float64)
        mean = float(array.mean())
        sd = float(array.std(ddof=1)) if array.size > 1 else 0.0
        mse = sd**2 + (mean - delta_true) ** 2
    if failures:
        logger.warning(f"{name}: {sum(failures.values())} failed replicates {dict(failures)}")
    return EstimatorSummary(
        name=name,
        mean=mean,
        sd=sd,
        mse=mse,
        successes=len(values),
        failures=sum(failures.values()),
        failure_messages=dict(sorted(failures.items())),
        estimates=[None if isinstance(v, str) else v for v in outcomes],
        histogram=histogram(values, edges),
    )


async def _run_all(
    resolved: ResolvedPlan,
    methods: list[Method],
    ctx: EstimationContext,
    workers: int,
    progress: Callable[[], None] | None,
) -> list[ReplicateResult]:
    results: list[ReplicateResult | None] = [None] * resolved.replicates
    limiter = anyio.CapacityLimiter(max(1, workers))

    async def _one(replicate: int) -> None:
        results[replicate] = await anyio.to_thread.run_sync(
            run_replicate, resolved, methods, ctx, replicate, limiter=limiter
        )
        if progress is not None:
            progress()

    async with anyio.create_task_group() as tg:
        for replicate in range(resolved.replicates):
            tg.start_soon(_one, replicate)
    return results  # type: ignore[return-value]


def run_experiment(
    plan: ExperimentPlan,
    *,
    workers: int = 1,
    numerics: NumericsConfig | None = None,
    progress: Callable[[], None] | None = None,
) -> McSummary:
    """Run every estimator of ``plan`` on every replicate and summarize.

    Replicate ``r`` draws from stream ``r`` of the plan's seed, so the summary does
    not depend on ``workers`` or on the order replicates finish in.
    """
    resolved = resolve_plan(plan)
    methods = [get_method(spec.method) for spec in resolved.estimators]
    ctx = EstimationContext(model=resolved.model, numerics=numerics or NumericsConfig())
    logger.info(
        f"Running {resolved.replicates} replicates of n={resolved.n} "
        f"with {len(methods)} estimators on {workers} worker(s)"
    )
    results = anyio.run(_run_all, resolved, methods, ctx, workers, progress)

    delta = true_ace(resolved.model, max_p=ctx.numerics.enumerate_max_p)
    summaries = [
        summarize(spec.name, [row[j] for row in results], delta, resolved.bins)
        for j, spec in enumerate(resolved.estimators)
    ]
    return McSummary(
        scenario=resolved.scenario,
        delta_true=delta,
        n=resolved.n,
        replicates=resolved.replicates,
        seed=resolved.seed,
        estimators=summaries,
    )
