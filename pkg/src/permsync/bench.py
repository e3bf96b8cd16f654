"""Seeded benchmark grids: sweep a model parameter, run solvers, emit CSV.

Output is fully determined by (flags, master seed): per-cell seeds come from
a documented 64-bit mix of (master, sweep index, trial index), rows are
buffered and written in sorted order, and numbers are rendered with Python's
shortest-roundtrip float repr.  Wall-clock timings are therefore *opt-in*
(``timing=True``); by default the runtime column is zero so that repeated
runs are byte-identical.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .analysis import relative_error
from .errors import PermSyncError
from .models import ModelConfig, SeededRng, derive_seed, generate_instance
from .solvers import (Schedule, SolverReport, irgcl_init_solve, irgcl_solve,
                      irls_cauchy_solve, irls_l1_solve, ppm_solve, spectral_solve)

RAW_HEADER = "model,algo,sweep_param,sweep_value,trial,seed,error,iterations,converged,runtime_ms"
AGG_HEADER = "model,algo,sweep_param,sweep_value,trials,mean_error,std_error"

THREADS_ENV = "PERMSYNC_THREADS"

ALGOS = {
    "spectral": lambda inst, sched: spectral_solve(inst),
    "ppm": lambda inst, sched: ppm_solve(inst, schedule=sched),
    "irls-l1": lambda inst, sched: irls_l1_solve(inst, schedule=sched),
    "irls-cauchy-s": lambda inst, sched: irls_cauchy_solve(inst, "S", schedule=sched),
    "irls-cauchy-p": lambda inst, sched: irls_cauchy_solve(inst, "P", schedule=sched),
    "irgcl-init": lambda inst, sched: irgcl_init_solve(inst, schedule=sched),
    "irgcl-s": lambda inst, sched: irgcl_solve(inst, schedule=sched, variant="S"),
    "irgcl-p": lambda inst, sched: irgcl_solve(inst, schedule=sched, variant="P"),
}

# sweepable flag name -> (ModelConfig field, coercion)
SWEEP_PARAMS = {
    "q": ("q", float),
    "eps": ("eps", float),
    "p": ("p", float),
    "n": ("n", int),
    "nc": ("n_c", int),
    "mc": ("m_c", int),
}

_MODEL_PARAMS = {
    "uniform": {"q", "p", "n"},
    "superspreader": {"eps", "p", "n"},
    "lbc": {"nc", "mc", "p", "n"},
    "lac": {"nc", "mc", "p", "n"},
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a benchmark run depends on, beyond the master seed."""

    base: ModelConfig
    algos: tuple[str, ...]
    sweep_param: str
    sweep_values: tuple[str, ...]  # raw tokens, preserved in the CSV
    trials: int
    seed: int
    error_metric: str = "auto"  # auto | bad-edges | all-pairs
    schedule: Schedule = Schedule()
    timing: bool = False

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("need trials >= 1")
        unknown = [a for a in self.algos if a not in ALGOS]
        if unknown:
            raise ValueError(f"unknown algorithm tag {unknown[0]!r}")
        if self.sweep_param not in SWEEP_PARAMS:
            raise ValueError(f"unknown sweep parameter {self.sweep_param!r}")
        if self.sweep_param not in _MODEL_PARAMS[self.base.model]:
            raise ValueError(
                f"sweep parameter {self.sweep_param!r} does not belong to model {self.base.model!r}")
        if self.error_metric not in ("auto", "bad-edges", "all-pairs"):
            raise ValueError(f"unknown error metric {self.error_metric!r}")
        if not self.sweep_values:
            raise ValueError("need at least one sweep value")


@dataclass(frozen=True)
class BenchmarkRow:
    model: str
    algo: str
    sweep_param: str
    sweep_value: str
    trial: int
    seed: int
    error: float
    iterations: int
    converged: bool
    runtime_ms: float

    def render(self) -> str:
        return ",".join([
            self.model, self.algo, self.sweep_param, self.sweep_value,
            str(self.trial), str(self.seed), repr(self.error),
            str(self.iterations), "true" if self.converged else "false",
            repr(self.runtime_ms),
        ])


def _cell_config(run: RunConfig, token: str) -> ModelConfig:
    field, coerce = SWEEP_PARAMS[run.sweep_param]
    return replace(run.base, **{field: coerce(float(token))})


def _metric_edges(run: RunConfig, inst) -> "np.ndarray | str":
    metric = run.error_metric
    if metric == "auto":
        metric = "all-pairs" if run.base.model == "uniform" else "bad-edges"
    if metric == "all-pairs":
        return "all_pairs"
    return np.array(sorted(inst.bad_edges), dtype=np.int64)


def _run_cell(args: tuple[RunConfig, int, str, int]) -> list[BenchmarkRow]:
    """One (sweep value, trial) cell: generate the instance, run every solver."""
    run, sweep_index, token, trial = args
    cell_seed = derive_seed(run.seed, sweep_index, trial)
    cfg = _cell_config(run, token)
    rows = []
    try:
        inst = generate_instance(cfg, SeededRng(cell_seed))
        edges = _metric_edges(run, inst)
    except (PermSyncError, ValueError) as _exc:
        for algo in run.algos:
            rows.append(BenchmarkRow(cfg.model, algo, run.sweep_param, token,
                                     trial, cell_seed, float("nan"), 0, False, 0.0))
        return rows
    for algo in run.algos:
        try:
            report: SolverReport = ALGOS[algo](inst, run.schedule)
            err = relative_error(report.estimate, inst.truth, edges).error
            runtime = round(report.wall_time_s * 1000.0, 3) if run.timing else 0.0
            rows.append(BenchmarkRow(cfg.model, algo, run.sweep_param, token,
                                     trial, cell_seed, err, report.iterations,
                                     report.converged, runtime))
        except (PermSyncError, ValueError):
            rows.append(BenchmarkRow(cfg.model, algo, run.sweep_param, token,
                                     trial, cell_seed, float("nan"), 0, False, 0.0))
    return rows


_POOL_LIMITER = None


def _limit_worker_threads() -> None:
    # One BLAS thread per worker process; the pool provides the parallelism.
    global _POOL_LIMITER
    try:
        from threadpoolctl import threadpool_limits

        _POOL_LIMITER = threadpool_limits(limits=1)
    except Exception:
        _POOL_LIMITER = None


def resolve_workers(tasks: int, requested: int | None = None) -> int:
    if requested is None:
        env = os.environ.get(THREADS_ENV)
        requested = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(requested, tasks))


def run_benchmark(run: RunConfig, workers: int | None = None
                  ) -> tuple[list[BenchmarkRow], list[str]]:
    """Execute the grid; returns sorted rows and aggregate CSV lines.

    Cells may run in parallel worker processes; output order is fixed by
    sorting on (algo, sweep value, trial) regardless.
    """
    tasks = [(run, si, token, trial)
             for si, token in enumerate(run.sweep_values)
             for trial in range(run.trials)]
    nworkers = resolve_workers(len(tasks), workers)
    if nworkers <= 1:
        results = [_run_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=nworkers,
                                 initializer=_limit_worker_threads) as pool:
            results = list(pool.map(_run_cell, tasks))
    rows = [row for cell in results for row in cell]
    rows.sort(key=lambda r: (r.algo, float(r.sweep_value), r.trial))
    return rows, aggregate_rows(rows)


def aggregate_rows(rows: list[BenchmarkRow]) -> list[str]:
    """Mean and sample std of the error per (algo, sweep value)."""
    groups: dict[tuple[str, str, str, str], list[float]] = {}
    for r in rows:
        groups.setdefault((r.algo, r.sweep_value, r.model, r.sweep_param), []).append(r.error)
    lines = []
    for (algo, value, model, param) in sorted(groups, key=lambda k: (k[0], float(k[1]))):
        errs = np.array(groups[(algo, value, model, param)])
        mean = float(errs.mean())
        std = float(errs.std(ddof=1)) if len(errs) > 1 else 0.0
        lines.append(f"{model},{algo},{param},{value},{len(errs)},{mean!r},{std!r}")
    return lines


def write_raw_csv(path: str, rows: list[BenchmarkRow]) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(RAW_HEADER + "\n")
        for r in rows:
            fh.write(r.render() + "\n")


def write_aggregate_csv(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(AGG_HEADER + "\n")
        for line in lines:
            fh.write(line + "\n")
