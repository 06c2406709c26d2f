"""Trial records and per-iteration mlog traces, plus their CSV formats."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

from .problems import target_ladder

MLOG_HEADER = "# cocopf-mlog v1"
MLOG_COLUMNS = ["round", "member", "name", "member_evals", "total_evals", "member_best", "portfolio_best"]
STANDARD_LADDER = [t.delta_f for t in target_ladder(50, 1e-8, 1e2)]
RECORD_COLUMNS = (["function", "dim", "instance", "solver", "evals_total", "best_delta_final"]
                  + [f"hit_{j}" for j in range(len(STANDARD_LADDER))])


def fmt(v: float) -> str:
    """17 significant digits; round-trips exactly through float()."""
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.16e}"


@dataclass
class MLogRow:
    round: int
    member_index: int
    member_name: str
    member_evals: int
    total_evals: int
    member_best_delta: float
    portfolio_best_delta: float

    def as_csv(self) -> list[str]:
        return [str(self.round), str(self.member_index), self.member_name, str(self.member_evals),
                str(self.total_evals), fmt(self.member_best_delta), fmt(self.portfolio_best_delta)]


@dataclass
class TrialRecord:
    """Outcome of one solver run on one (function, dim, instance).

    ``evals_to_target`` maps each standard-ladder target to the index of the
    evaluation that first reached it (None if never).  ``history`` holds the
    ``(eval_index, best_delta)`` improvement steps when the record comes
    straight from a run, which allows exact queries at any target.
    """

    function_id: int
    dim: int
    instance_seed: int
    solver_label: str
    evals_total: int
    best_delta_final: float
    evals_to_target: dict[float, int | None] = field(default_factory=dict)
    history: list[tuple[int, float]] | None = field(default=None, repr=False)

    def evals_at(self, delta_f: float) -> int | None:
        if self.history is not None:
            for n, d in self.history:
                if d <= delta_f:
                    return n
            return None
        for key, n in self.evals_to_target.items():
            if math.isclose(key, delta_f, rel_tol=1e-9):
                return n
        raise KeyError(f"target {delta_f:g} is not on this record's ladder and no history is stored")

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.function_id, self.dim, self.instance_seed)


def write_mlog(path: Path, rows: list[MLogRow]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(MLOG_HEADER + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MLOG_COLUMNS)
        for row in rows:
            w.writerow(row.as_csv())


def read_mlog(path: Path) -> list[MLogRow]:
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if first != MLOG_HEADER:
            raise ValueError(f"{path}: not an mlog file (header {first!r})")
        reader = csv.DictReader(fh)
        return [MLogRow(int(r["round"]), int(r["member"]), r["name"], int(r["member_evals"]),
                        int(r["total_evals"]), float(r["member_best"]), float(r["portfolio_best"]))
                for r in reader]


def record_row(rec: TrialRecord) -> list[str]:
    hits = [rec.evals_to_target.get(d) for d in STANDARD_LADDER]
    return ([str(rec.function_id), str(rec.dim), str(rec.instance_seed), rec.solver_label,
             str(rec.evals_total), fmt(rec.best_delta_final)]
            + ["" if h is None else str(h) for h in hits])


def write_records(path: Path, records: list[TrialRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_COLUMNS)
        for rec in records:
            w.writerow(record_row(rec))


def read_records(path: Path) -> list[TrialRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RECORD_COLUMNS:
            raise ValueError(f"{path}: unexpected records header")
        out = []
        for r in reader:
            hits = {d: (int(r[f"hit_{j}"]) if r[f"hit_{j}"] else None)
                    for j, d in enumerate(STANDARD_LADDER)}
            out.append(TrialRecord(int(r["function"]), int(r["dim"]), int(r["instance"]), r["solver"],
                                   int(r["evals_total"]), float(r["best_delta_final"]), hits))
        return out
