"""Run the four ablation variants over dynamic environment streams."""
from __future__ import annotations

import csv
import io
import logging
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Iterator, Optional

import numpy as np

from . import seeding
from .benchmarks import (
    DynamicProblem,
    SamplingPlan,
    advance_environment,
    evaluate_true,
    make_problem,
    sample_chunk,
)
from .data import DataChunk
from .de import Population, init_population, optimize
from .ensemble import train_current, update_ensemble
from .solution import FinalSolution, produce_final

log = logging.getLogger(__name__)

TrueEval = Callable[[DynamicProblem, np.ndarray], float]


@dataclass(frozen=True)
class VariantSpec:
    id: str
    surrogate: str  # single | ensemble
    init: str  # random | carryover
    final: str  # best | top_k_average


VARIANTS = {
    "SS": VariantSpec("SS", "single", "random", "best"),
    "KTS": VariantSpec("KTS", "ensemble", "random", "best"),
    "KTSPI": VariantSpec("KTSPI", "ensemble", "carryover", "best"),
    "KTSPI_TBA": VariantSpec("KTSPI_TBA", "ensemble", "carryover", "top_k_average"),
}


class RunError(RuntimeError):
    pass


@dataclass
class EnvOutcome:
    env_index: int
    final_x: np.ndarray
    true_value: float
    surrogate_value: float
    population: Optional[Population] = None


@dataclass
class RunRecord:
    variant: str
    problem_id: str
    run: int
    seed: int
    per_env: list = field(default_factory=list)

    @property
    def mean_true_value(self) -> float:
        return float(np.mean([e.true_value for e in self.per_env]))


class IncrementalOptimizer:
    """Stateful per-run pipeline: one call to :meth:`step` per incoming chunk.

    Holds the chunk history and the previous final population. Never sees
    the true objective.
    """

    def __init__(self, variant: VariantSpec, cfg, seed: int):
        self.variant = variant
        self.cfg = cfg
        self.seed = seed
        self.history: list[DataChunk] = []
        self.last_population: Optional[Population] = None

    def build_surrogate(self, chunk: DataChunk):
        if self.variant.surrogate == "single":
            return train_current(chunk, self.cfg.rbf, self.seed)
        return update_ensemble(
            self.history,
            chunk,
            self.cfg.rbf,
            self.seed,
            rmse_eval=self.cfg.ensemble.rmse_eval,
            max_history=self.cfg.ensemble.max_history,
        )

    def step(self, chunk: DataChunk) -> tuple[FinalSolution, Population]:
        de = self.cfg.de
        surrogate = self.build_surrogate(chunk)
        rng = seeding.substream(self.seed, seeding.OPTIMIZER, chunk.env_index)
        strategy = self.variant.init if self.last_population is not None else "random"
        init = init_population(strategy, chunk.bounds, de.np, rng, prev_final=self.last_population)
        final_pop = optimize(surrogate, init, de, chunk.bounds, rng)
        solution = produce_final(
            final_pop, self.variant.final, self.cfg.protocol.tba_fraction, surrogate=surrogate)
        self.history.append(chunk)
        self.last_population = final_pop
        return solution, final_pop


def algorithm_seed(run_seed: int) -> int:
    return seeding.derive_seed(run_seed, seeding.ALGORITHM)


def environment_stream(
    problem_id: str, cfg, run_seed: int, evaluate: TrueEval = evaluate_true
) -> Iterator[tuple[DynamicProblem, DataChunk]]:
    """Yield (problem state, sampled chunk) for each environment.

    Uses only the environment substream, so it is identical for every variant.
    """
    proto = cfg.protocol
    rng = seeding.substream(run_seed, seeding.ENVIRONMENT)
    problem = make_problem(problem_id, proto.dim, rng, proto.shift_severity, proto.offset_severity)
    plan = SamplingPlan.for_dim(proto.dim, proto.sampling)
    for t in range(proto.envs):
        if t > 0:
            problem = advance_environment(problem, rng)
        yield problem, sample_chunk(problem, plan, rng, evaluate)


def run_variant(
    variant: str | VariantSpec,
    problem_id: str,
    cfg,
    seed: int,
    run: int = 0,
    evaluate: TrueEval = evaluate_true,
    keep_populations: bool = False,
) -> RunRecord:
    """Run one variant on one problem for ``cfg.protocol.envs`` environments.

    ``seed`` is the per-run seed. True evaluations happen only for chunk
    sampling and for scoring each final solution once.
    """
    spec = variant if isinstance(variant, VariantSpec) else VARIANTS[variant]
    record = RunRecord(spec.id, problem_id, run, seed)
    opt = IncrementalOptimizer(spec, cfg, algorithm_seed(seed))
    for problem, chunk in environment_stream(problem_id, cfg, seed, evaluate):
        try:
            solution, pop = opt.step(chunk)
            value = evaluate(problem, solution.x)
        except Exception as exc:
            raise RunError(f"{problem_id}/{spec.id} run {run}: env {chunk.env_index}: {exc}") from exc
        record.per_env.append(EnvOutcome(
            chunk.env_index, solution.x, value, solution.surrogate_value,
            pop if keep_populations else None))
    return record


def replay_variant(variant: str, chunks: Iterable[DataChunk], cfg, seed: int, run: int = 0,
                   problem_id: str = "replay") -> RunRecord:
    """Same pipeline as :func:`run_variant` but fed from stored chunks; nothing is scored."""
    spec = VARIANTS[variant]
    record = RunRecord(spec.id, problem_id, run, seed)
    opt = IncrementalOptimizer(spec, cfg, algorithm_seed(seed))
    for chunk in chunks:
        try:
            solution, _ = opt.step(chunk)
        except Exception as exc:
            raise RunError(f"replay {spec.id}: env {chunk.env_index}: {exc}") from exc
        record.per_env.append(EnvOutcome(chunk.env_index, solution.x, math.nan, solution.surrogate_value))
    return record


def dump_chunks(problem_id: str, cfg, seed: int) -> list[DataChunk]:
    return [chunk for _, chunk in environment_stream(problem_id, cfg, seed)]


# -- experiments ------------------------------------------------------------

@dataclass
class ExperimentReport:
    records: list
    failures: dict  # (problem, variant, run) -> message
    problems: tuple
    variants: tuple

    def cell(self, problem: str, variant: str) -> float:
        vals = [r.mean_true_value for r in self.records
                if r.problem_id == problem and r.variant == variant]
        return float(np.mean(vals)) if vals else math.nan

    @property
    def cells(self) -> dict:
        return {(p, v): self.cell(p, v) for p in self.problems for v in self.variants}


def _run_cell(args):
    problem_id, variant, run, cfg = args
    seed = seeding.run_seed(cfg.seed, problem_id, run)
    try:
        return run_variant(variant, problem_id, cfg, seed, run=run), None
    except Exception as exc:  # recorded per cell; the report is still emitted
        return None, str(exc)


def run_experiment(cfg, parallelism: int = 1) -> ExperimentReport:
    """Execute problem x variant x run. Per-run seeds depend on position only."""
    cells = [(p, v, r, cfg) for p, v, r in product(cfg.problems, cfg.variants, range(cfg.protocol.runs))]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_run_cell, cells, chunksize=1))
    else:
        results = [_run_cell(c) for c in cells]
    records, failures = [], {}
    for (p, v, r, _), (record, err) in zip(cells, results):
        if err is not None:
            log.error("cell %s/%s/%d failed: %s", p, v, r, err)
            failures[(p, v, r)] = err
        else:
            records.append(record)
    return ExperimentReport(records, failures, tuple(cfg.problems), tuple(cfg.variants))


# -- summaries and CSV ------------------------------------------------------

@dataclass
class SummaryRow:
    problem: str
    variant: str
    mean: float
    sd: float
    runs: int
    wins: int

    @property
    def single_run(self) -> bool:
        return self.runs == 1


def summarize(records: list) -> list[SummaryRow]:
    """Mean and sample sd of per-run means per (problem, variant).

    ``wins`` counts the other variants on the same problem with a strictly
    larger mean.
    """
    if not records:
        raise ValueError("no run records to summarize")
    groups: dict = {}
    for r in records:
        groups.setdefault((r.problem_id, r.variant), []).append(r.mean_true_value)
    means = {k: math.fsum(v) / len(v) for k, v in groups.items()}
    rows = []
    for (p, v), vals in sorted(groups.items()):
        sd = statistics.stdev(vals) if len(vals) > 1 else 0.0
        wins = sum(1 for (p2, v2), m in means.items() if p2 == p and v2 != v and m > means[(p, v)])
        rows.append(SummaryRow(p, v, means[(p, v)], sd, len(vals), wins))
    return rows


def _fmt(v: float) -> str:
    return repr(float(v))


RESULT_HEADER = ["problem", "variant", "run", "seed", "env", "true_value"]
SUMMARY_HEADER = ["problem", "variant", "mean", "sd", "runs"]


def write_results_csv(records: list, fh) -> None:
    dim = max((len(e.final_x) for r in records for e in r.per_env), default=0)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(RESULT_HEADER + [f"x{j}" for j in range(dim)])
    for r in records:
        for e in r.per_env:
            w.writerow([r.problem_id, r.variant, r.run, r.seed, e.env_index, _fmt(e.true_value)]
                       + [_fmt(x) for x in e.final_x])


def write_summary_csv(rows: list[SummaryRow], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for row in rows:
        w.writerow([row.problem, row.variant, _fmt(row.mean), _fmt(row.sd), row.runs])


def read_results_csv(fh) -> list[RunRecord]:
    reader = csv.DictReader(fh)
    missing = set(RESULT_HEADER) - set(reader.fieldnames or [])
    if missing:
        raise ValueError(f"results CSV lacks column(s): {', '.join(sorted(missing))}")
    xcols = [c for c in reader.fieldnames if c.startswith("x") and c[1:].isdigit()]
    records: dict = {}
    for row in reader:
        key = (row["problem"], row["variant"], int(row["run"]))
        rec = records.setdefault(key, RunRecord(row["variant"], row["problem"], int(row["run"]), int(row["seed"])))
        x = np.array([float(row[c]) for c in xcols if row[c] != ""])
        rec.per_env.append(EnvOutcome(int(row["env"]), x, float(row["true_value"]), math.nan))
    return list(records.values())


def format_table(rows: list[SummaryRow], problems=None, variants=None) -> str:
    """Problems as rows, variants as columns."""
    means = {(r.problem, r.variant): r.mean for r in rows}
    problems = problems or sorted({r.problem for r in rows})
    variants = variants or [v for v in VARIANTS if any(r.variant == v for r in rows)]

    def cell(v):
        if v is None or math.isnan(v):
            return "-"
        return f"{v:.4f}" if abs(v) < 1000 else f"{v:.3e}"

    header = ["Name"] + [v.replace("_", "-") for v in variants]
    body = [[p] + [cell(means.get((p, v))) for v in variants] for p in problems]
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    out = io.StringIO()
    for line in [header] + body:
        out.write("  ".join(s.rjust(wd) for s, wd in zip(line, widths)).rstrip() + "\n")
    return out.getvalue()
