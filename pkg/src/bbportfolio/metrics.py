"""Expected running time, simulated-restart run lengths and ECDF curves."""
from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .problems import GROUPS, TargetSpec, functions_in_group, stream
from .records import TrialRecord, fmt

DEFAULT_BUDGETS = np.logspace(0, 4, 61)


@dataclass
class ErtResult:
    delta_f: float
    ert: float
    n_success: int
    n_trials: int


@dataclass
class EcdfCurve:
    budgets: np.ndarray
    proportion: np.ndarray


def _check_same(trials, fields):
    if not trials:
        raise ValueError("no trials")
    keys = {tuple(getattr(t, f) for f in fields) for t in trials}
    if len(keys) > 1:
        raise ValueError(f"trials mix different {'/'.join(fields)}: {sorted(keys)}")


def compute_ert(trials: list[TrialRecord], delta_f: float) -> ErtResult:
    """Evaluations spent across all trials before reaching ``delta_f``, per successful trial.

    A successful trial contributes the index of the evaluation that reached
    the target; an unsuccessful one contributes all its evaluations.
    """
    _check_same(trials, ("function_id", "dim", "solver_label"))
    spent, n_success = 0, 0
    for t in trials:
        hit = t.evals_at(delta_f)
        if hit is None:
            spent += t.evals_total
        else:
            spent += hit
            n_success += 1
    ert = spent / n_success if n_success else math.inf
    return ErtResult(delta_f, ert, n_success, len(trials))


def bootstrap_runlength(trials: list[TrialRecord], delta_f: float, rng: np.random.Generator,
                        _hits=None) -> float:
    """One simulated-restart run length: draw trials with replacement until one succeeds."""
    if not trials:
        raise ValueError("no trials")
    hits = _hits if _hits is not None else [t.evals_at(delta_f) for t in trials]
    if all(h is None for h in hits):
        return math.inf
    total = 0
    while True:
        i = int(rng.integers(len(trials)))
        if hits[i] is None:
            total += trials[i].evals_total
        else:
            return total + hits[i]


def compute_ecdf(trials_by_function: dict[int, list[TrialRecord]], targets: list[TargetSpec | float],
                 budgets=DEFAULT_BUDGETS, samples_per_pair: int = 100,
                 rng: np.random.Generator | None = None) -> EcdfCurve:
    """Fraction of bootstrapped (function, target) run lengths within ``budget * dim`` evaluations."""
    if not trials_by_function or any(not v for v in trials_by_function.values()):
        raise ValueError("empty trial group")
    rng = rng if rng is not None else np.random.default_rng(0)
    budgets = np.asarray(budgets, dtype=float)
    if np.any(np.diff(budgets) < 0):
        raise ValueError("budgets must be ascending")
    dims = {t.dim for ts in trials_by_function.values() for t in ts}
    if len(dims) != 1:
        raise ValueError(f"trials span several dimensions: {sorted(dims)}")
    dim = dims.pop()
    deltas = [t.delta_f if isinstance(t, TargetSpec) else float(t) for t in targets]
    lengths = []
    for fid in sorted(trials_by_function):
        trials = trials_by_function[fid]
        for d in deltas:
            hits = [t.evals_at(d) for t in trials]
            lengths.extend(bootstrap_runlength(trials, d, rng, hits) for _ in range(samples_per_pair))
    lengths = np.sort(np.asarray(lengths, dtype=float))
    reached = np.searchsorted(lengths, budgets * dim, side="right")
    return EcdfCurve(budgets, reached / len(lengths))


def group_trials(records: list[TrialRecord]) -> dict[tuple[str, int], dict[int, list[TrialRecord]]]:
    """Index records as ``(solver, dim) -> function -> trials``."""
    out: dict = defaultdict(lambda: defaultdict(list))
    for r in records:
        out[(r.solver_label, r.dim)][r.function_id].append(r)
    return out


def ert_table(records: list[TrialRecord], deltas: list[float]) -> list[dict]:
    rows = []
    for (solver, dim), by_f in sorted(group_trials(records).items()):
        for fid, trials in sorted(by_f.items()):
            for d in deltas:
                res = compute_ert(trials, d)
                rows.append({"function": fid, "dim": dim, "solver": solver, "delta_f": d,
                             "ert": res.ert, "n_success": res.n_success, "n_trials": res.n_trials})
    return rows


def write_ert_csv(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["function", "dim", "solver", "delta_f", "ert", "n_success", "n_trials"])
        for r in rows:
            w.writerow([r["function"], r["dim"], r["solver"], fmt(r["delta_f"]), fmt(r["ert"]),
                        r["n_success"], r["n_trials"]])


def ecdf_tables(records: list[TrialRecord], targets, budgets=DEFAULT_BUDGETS, samples_per_pair: int = 100,
                seed: int = 0) -> dict[tuple[str, int], dict[str, EcdfCurve]]:
    """ECDF curves per (group, dim), one per solver, for the five groups plus ``all``."""
    grouped = group_trials(records)
    solvers = sorted({s for s, _ in grouped})
    dims = sorted({d for _, d in grouped})
    out = {}
    for group in (*GROUPS, "all"):
        fids = set(functions_in_group(group))
        for dim in dims:
            curves = {}
            for solver in solvers:
                by_f = {f: ts for f, ts in grouped.get((solver, dim), {}).items() if f in fids}
                if not by_f:
                    continue
                rng = stream(seed, dim, group, solver, "ecdf")
                curves[solver] = compute_ecdf(by_f, targets, budgets, samples_per_pair, rng)
            if curves:
                out[(group, dim)] = curves
    return out


def write_ecdf_csv(path: Path, curves: dict[str, EcdfCurve]) -> None:
    solvers = sorted(curves)
    budgets = curves[solvers[0]].budgets
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["budget_fevals_per_dim", *solvers])
        for j, b in enumerate(budgets):
            w.writerow([fmt(b), *(fmt(curves[s].proportion[j]) for s in solvers)])


def ecdf_filename(group: str, dim: int) -> str:
    return f"ecdf_{group}_{dim}D.csv"
