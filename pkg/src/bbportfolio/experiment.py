"""Benchmark driver: run a solver or portfolio over (function, dim, instance) triples.

Output layout for a run directory::

    {label}_f{ff}_d{dd}_i{ii}.mlog.csv   one per trial
    records.csv                           one row per trial
    meta.json                             config echo

Trial seeds derive from the trial coordinates and the master seed only, so
execution order and parallelism never change any output byte.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .optimizers import OptimizerSpec
from .portfolio import StrategyConfig, run_portfolio_trial
from .problems import MAX_DIM, MIN_DIM, FUNCTIONS, derive_seed, make_instance
from .records import STANDARD_LADDER, TrialRecord, write_mlog, write_records


@dataclass
class ExperimentConfig:
    functions: list[int] = field(default_factory=lambda: list(range(1, 11)))
    dims: list[int] = field(default_factory=lambda: [2, 3, 5, 10, 20])
    instances: int = 5
    maxfev: int = 10000
    maxfev_per_dim: bool = False
    solver: str | None = None
    portfolio: list[str] | None = None
    strategy: StrategyConfig | None = None
    final_delta: float = 1e-8
    master_seed: int = 0
    output_dir: str = "results"
    shortname: str = ""
    comments: str = ""
    jobs: int = 1

    def __post_init__(self):
        if self.maxfev < 1:
            raise ValueError("maxfev must be at least 1")
        if self.instances < 1:
            raise ValueError("instances must be at least 1")
        if (self.solver is None) == (self.portfolio is None):
            raise ValueError("give exactly one of solver or portfolio")
        if self.portfolio is not None and self.strategy is None:
            raise ValueError("a portfolio needs a selection strategy")
        if self.solver is not None and self.strategy is not None:
            raise ValueError("a selection strategy only applies to a portfolio")
        for name in [self.solver] if self.solver else self.portfolio:
            OptimizerSpec(name)
        for fid in self.functions:
            if fid not in FUNCTIONS:
                raise ValueError(f"unknown function {fid}")
        for d in self.dims:
            if not MIN_DIM <= d <= MAX_DIM:
                raise ValueError(f"dimension {d} out of range")
        if not self.final_delta > 0:
            raise ValueError("final_delta must be positive")

    @property
    def label(self) -> str:
        if self.shortname:
            return self.shortname
        return self.solver if self.solver else self.strategy.label

    def budget(self, dim: int) -> int:
        return self.maxfev * dim if self.maxfev_per_dim else self.maxfev

    def trials(self) -> list[tuple[int, int, int]]:
        return [(f, d, i) for f in sorted(self.functions) for d in sorted(self.dims)
                for i in range(1, self.instances + 1)]


def trial_seed(master_seed: int, function_id: int, dim: int, instance: int) -> int:
    return derive_seed(master_seed, function_id, dim, instance, "trial")


def mlog_name(label: str, function_id: int, dim: int, instance: int) -> str:
    return f"{label}_f{function_id:02d}_d{dim:02d}_i{instance:02d}.mlog.csv"


def run_trial(config: ExperimentConfig, function_id: int, dim: int, instance_seed: int):
    """One trial; returns (record, mlog rows, elapsed seconds)."""
    t0 = time.perf_counter()
    inst = make_instance(function_id, dim, instance_seed)
    if config.solver is not None:
        portfolio, strategy = [config.solver], StrategyConfig("UNIF")
    else:
        portfolio, strategy = config.portfolio, config.strategy
    seed = trial_seed(config.master_seed, function_id, dim, instance_seed)
    record, mlog = run_portfolio_trial(portfolio, strategy, inst, config.budget(dim),
                                       config.final_delta, seed, label=config.label)
    return record, mlog, time.perf_counter() - t0


def _run_trial_args(args):
    return run_trial(*args)


def progress_report(trial: TrialRecord, elapsed: float) -> str:
    assert trial.best_delta_final >= 0, "best delta cannot be negative"
    return (f"f{trial.function_id} d{trial.dim} i{trial.instance_seed} {trial.solver_label} "
            f"evals={trial.evals_total} delta={trial.best_delta_final:.3e} {elapsed:.1f}s")


def manifest(config: ExperimentConfig) -> dict:
    cfg = asdict(config)
    cfg.pop("jobs")
    cfg.pop("output_dir")
    return {
        "format": "bbportfolio-run v1",
        "shortname": config.label,
        "comments": config.comments,
        "config": cfg,
        "ladder": STANDARD_LADDER,
    }


def run_experiment(config: ExperimentConfig, echo=print) -> dict:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [(config, *t) for t in config.trials()]
    records = []
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = pool.map(_run_trial_args, tasks)
            for record, mlog, elapsed in results:
                _emit(out, config, record, mlog, elapsed, records, echo)
    else:
        for task in tasks:
            _emit(out, config, *_run_trial_args(task), records, echo)
    write_records(out / "records.csv", records)
    (out / "meta.json").write_text(json.dumps(manifest(config), indent=2, sort_keys=True) + "\n")
    successes = sum(r.best_delta_final <= config.final_delta for r in records)
    return {"trials": len(records), "successes": successes, "records": records}


def _emit(out, config, record, mlog, elapsed, records, echo):
    write_mlog(out / mlog_name(config.label, record.function_id, record.dim, record.instance_seed), mlog)
    records.append(record)
    if echo is not None:
        echo(progress_report(record, elapsed))
