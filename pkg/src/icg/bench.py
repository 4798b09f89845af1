"""Benchmark matrices, (min, mean, max) summaries and Dolan-Moré profiles."""

from __future__ import annotations

import csv
import enum
import json
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import problems as P
from .cg import REFERENCE_VARIANTS, BetaVariant, RunRecord, SolverConfig, Status, run
from .linesearch import NotDescentDirection
from .qp import QPError

RUNS_COLUMNS = ["problem", "variant", "seed", "status", "iters", "wall_time_s", "final_xi", "restarts"]
SUMMARY_COLUMNS = ["problem", "variant", "runs", "failures",
                   "iters_min", "iters_mean", "iters_max",
                   "time_min", "time_mean", "time_max"]
SUCCESS = "Critical"


class Metric(enum.Enum):
    ITERATIONS = "iterations"
    CPU_TIME = "cputime"


@dataclass
class BenchMatrix:
    problems: Sequence[str]
    variants: Sequence[str] = tuple(REFERENCE_VARIANTS)
    seeds: Sequence[int] = tuple(range(100))
    config: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        self.problems = list(self.problems)
        self.variants = list(self.variants)
        self.seeds = list(self.seeds)
        if not self.problems:
            raise ValueError("benchmark matrix needs at least one problem")
        if not self.variants:
            raise ValueError("benchmark matrix needs at least one variant")
        if not self.seeds:
            raise ValueError("benchmark matrix needs at least one seed")
        for name in self.problems:
            P.lookup(name)
        for v in self.variants:
            _variant(v)

    def cells(self) -> list[tuple[str, str, int]]:
        return [(p, v, s) for p in self.problems for v in self.variants for s in self.seeds]


def _variant(v) -> BetaVariant:
    if isinstance(v, BetaVariant):
        return v
    try:
        return REFERENCE_VARIANTS[v]
    except KeyError:
        raise ValueError(f"unknown variant {v!r}") from None


def run_cell(problem: str, variant: str, seed: int, config: SolverConfig) -> RunRecord:
    spec = P.lookup(problem)
    cfg = replace(config, variant=_variant(variant))
    try:
        rec = run(spec.mo, P.sample_start(spec, seed), cfg, seed=seed)
    except (QPError, NotDescentDirection) as exc:
        # a broken run is reported, not allowed to take the whole matrix down
        rec = RunRecord(status=Status.LINE_SEARCH_FAIL, seed=seed, error=f"{type(exc).__name__}: {exc}")
    rec.problem, rec.variant = problem, _variant(variant).name
    return rec


def _run_cell_args(args):
    return run_cell(*args)


def run_matrix(matrix: BenchMatrix, parallelism: int = 1) -> list[RunRecord]:
    """Run every (problem, variant, seed) cell; results come back in cell order."""
    if parallelism < 1:
        raise ValueError("parallelism must be at least 1")
    tasks = [(p, v, s, matrix.config) for p, v, s in matrix.cells()]
    if parallelism == 1:
        return [_run_cell_args(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * parallelism))
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(_run_cell_args, tasks, chunksize=chunk))


# ---------------------------------------------------------------------------
# runs.csv


@dataclass(frozen=True)
class RunRow:
    problem: str
    variant: str
    seed: int
    status: str
    iters: int
    wall_time_s: float
    final_xi: float
    restarts: int

    @classmethod
    def from_record(cls, rec: RunRecord) -> "RunRow":
        return cls(rec.problem, rec.variant, int(rec.seed), rec.status.value, rec.iterations,
                   rec.wall_time, rec.final_xi, rec.restarts)

    @property
    def solved(self) -> bool:
        return self.status == SUCCESS


def _rows(records: Iterable) -> list[RunRow]:
    return [r if isinstance(r, RunRow) else RunRow.from_record(r) for r in records]


def write_runs_csv(records: Iterable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RUNS_COLUMNS)
        for r in _rows(records):
            w.writerow([r.problem, r.variant, r.seed, r.status, r.iters,
                        repr(r.wall_time_s), repr(r.final_xi), r.restarts])


def read_runs_csv(path) -> list[RunRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        return [RunRow(d["problem"], d["variant"], int(d["seed"]), d["status"], int(d["iters"]),
                       float(d["wall_time_s"]), float(d["final_xi"]), int(d["restarts"]))
                for d in csv.DictReader(fh)]


# ---------------------------------------------------------------------------
# summaries


@dataclass(frozen=True)
class SummaryCell:
    problem: str
    variant: str
    runs: int
    failures: int
    iters: tuple[float, float, float]
    time: tuple[float, float, float]

    @property
    def solved(self) -> bool:
        return self.runs > self.failures

    def metric(self, metric: Metric) -> float:
        """Mean over successful runs, or ``inf`` when nothing was solved."""
        if not self.solved:
            return math.inf
        return self.iters[1] if metric is Metric.ITERATIONS else self.time[1]


def _min_mean_max(xs):
    if not xs:
        return (math.nan, math.nan, math.nan)
    return (float(min(xs)), float(np.mean(xs)), float(max(xs)))


def aggregate(records: Iterable) -> list[SummaryCell]:
    """(min, mean, max) of iterations and time per (problem, variant) over successful runs."""
    rows = _rows(records)
    if not rows:
        raise ValueError("nothing to aggregate")
    groups: dict[tuple[str, str], list[RunRow]] = defaultdict(list)
    for r in rows:
        groups[(r.problem, r.variant)].append(r)
    out = []
    for (prob, var), rs in groups.items():
        ok = [r for r in rs if r.solved]
        out.append(SummaryCell(prob, var, len(rs), len(rs) - len(ok),
                               _min_mean_max([r.iters for r in ok]),
                               _min_mean_max([r.wall_time_s for r in ok])))
    return out


def write_summary_csv(summary: Sequence[SummaryCell], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for c in summary:
            w.writerow([c.problem, c.variant, c.runs, c.failures,
                        *(f"{x:.6g}" for x in c.iters), *(f"{x:.6g}" for x in c.time)])


# ---------------------------------------------------------------------------
# performance profiles


@dataclass
class ProfileData:
    metric: Metric
    problems: list[str]
    solvers: list[str]
    ratios: np.ndarray                 # (problems, solvers), +inf when unsolved
    z: np.ndarray                      # breakpoints
    curves: dict[str, np.ndarray]      # solver -> F at each breakpoint

    def F(self, solver: str, z: float) -> float:
        col = self.ratios[:, self.solvers.index(solver)]
        return float(np.count_nonzero(col <= z)) / len(self.problems)

    def to_json(self) -> dict:
        def enc(x):
            return None if not math.isfinite(x) else float(x)
        return {
            "metric": self.metric.value,
            "problems": self.problems,
            "solvers": self.solvers,
            "ratios": [[enc(x) for x in row] for row in self.ratios],
            "z": [float(x) for x in self.z],
            "curves": {s: [float(x) for x in c] for s, c in self.curves.items()},
        }


def performance_ratios(table: np.ndarray) -> np.ndarray:
    """Ratio of each solver's measure to the best on the same problem (rows = problems)."""
    table = np.asarray(table, dtype=float)
    ratios = np.full(table.shape, math.inf)
    for p, row in enumerate(table):
        finite = np.isfinite(row)
        if not finite.any():
            continue
        best = row[finite].min()
        if best > 0:
            ratios[p, finite] = row[finite] / best
        else:
            # all-zero best (e.g. every start already critical): compare on a +1 shifted scale
            ratios[p, finite] = (row[finite] + 1.0) / (best + 1.0)
    return ratios


def profile_from_table(table, problems: Sequence[str], solvers: Sequence[str],
                       metric: Metric = Metric.ITERATIONS) -> ProfileData:
    ratios = performance_ratios(table)
    finite = ratios[np.isfinite(ratios)]
    z = np.unique(finite) if finite.size else np.array([1.0])
    n_p = ratios.shape[0]
    curves = {s: np.array([np.count_nonzero(ratios[:, j] <= zz) / n_p for zz in z])
              for j, s in enumerate(solvers)}
    return ProfileData(metric, list(problems), list(solvers), ratios, z, curves)


def performance_profile(summary: Sequence[SummaryCell], metric: Metric | str) -> ProfileData:
    metric = Metric(metric)
    problems = list(dict.fromkeys(c.problem for c in summary))
    solvers = list(dict.fromkeys(c.variant for c in summary))
    table = np.full((len(problems), len(solvers)), math.inf)
    for c in summary:
        table[problems.index(c.problem), solvers.index(c.variant)] = c.metric(metric)
    return profile_from_table(table, problems, solvers, metric)


def write_profile(profile: ProfileData, out_dir) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    csv_path = out_dir / f"profile_{profile.metric.value}.csv"
    json_path = out_dir / f"profile_{profile.metric.value}.json"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["z", *profile.solvers])
        for i, zz in enumerate(profile.z):
            w.writerow([repr(float(zz)), *(repr(float(profile.curves[s][i])) for s in profile.solvers)])
    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(profile.to_json(), fh, indent=1)
        fh.write("\n")
    return csv_path, json_path
