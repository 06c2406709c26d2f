"""Portfolio population and online selection strategies.

A population holds one resumable runner per member.  Each round a strategy
picks a member and that member advances by one iteration; nothing is ever
restarted by the selector itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .globalizer import make_runner
from .optimizers import OptimizerSpec, StepOutcome
from .problems import BudgetExhausted, ProblemInstance, TargetSpec, derive_seed, stream
from .records import STANDARD_LADDER, MLogRow, TrialRecord


@dataclass
class Member:
    method_name: str
    runner: object
    x: np.ndarray | None = None
    y: float = math.inf
    iterations: int = 0

    def sync(self) -> None:
        self.x, self.y = self.runner.best_x, self.runner.best_y


@dataclass
class Population:
    members: list[Member]
    f_opt: float
    round: int = 0
    total_evals: int = 0
    mlog: list[MLogRow] = field(default_factory=list)

    def __len__(self):
        return len(self.members)

    @property
    def values(self) -> list[float]:
        return [m.y for m in self.members]

    def best(self) -> tuple[int, float]:
        ys = self.values
        i = int(np.argmin(ys))
        return i, ys[i]


def _as_spec(spec) -> OptimizerSpec:
    return spec if isinstance(spec, OptimizerSpec) else OptimizerSpec(spec)


def _new_member(spec, instance, seed) -> Member:
    spec = _as_spec(spec)
    member = Member(spec.name, make_runner(spec, instance, seed))
    member.sync()
    return member


def population_init(portfolio, instance: ProblemInstance, seed: int) -> Population:
    if not portfolio:
        raise ValueError("portfolio is empty")
    members = [_new_member(spec, instance, derive_seed(seed, "member", i))
               for i, spec in enumerate(portfolio)]
    return Population(members, instance.f_opt, total_evals=instance.eval_count)


def add_member(pop: Population, spec, instance: ProblemInstance, seed: int) -> int:
    pop.members.append(_new_member(spec, instance, seed))
    pop.total_evals = instance.eval_count
    return len(pop.members) - 1


def member_step(pop: Population, idx: int, instance: ProblemInstance) -> StepOutcome:
    if not 0 <= idx < len(pop.members):
        raise IndexError(f"member index {idx} out of range for population of {len(pop.members)}")
    m = pop.members[idx]
    try:
        out = m.runner.step(instance)
    finally:
        m.iterations += 1
        pop.round += 1
        pop.total_evals = instance.eval_count
        m.sync()
        pop.mlog.append(MLogRow(pop.round, idx, m.method_name, m.runner.evals, pop.total_evals,
                                m.y - pop.f_opt, instance.best_f - pop.f_opt))
    return out


# -- selection strategies: read (pop, rng) only ------------------------------

def select_unif(pop: Population, rng: np.random.Generator) -> int:
    if not pop.members:
        raise ValueError("empty population")
    return int(rng.integers(len(pop.members)))


def select_epsilon_greedy(pop: Population, rng: np.random.Generator, epsilon: float = 0.5) -> int:
    """Best member with probability 1 - epsilon, else uniform over all members (best included)."""
    if not pop.members:
        raise ValueError("empty population")
    if rng.random() < epsilon:
        return int(rng.integers(len(pop.members)))
    return int(np.argmin(pop.values))


@dataclass(frozen=True)
class StrategyConfig:
    kind: str = "UNIF"
    epsilon: float | None = None

    def __post_init__(self):
        if self.kind not in ("UNIF", "EpsilonGreedy"):
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.kind == "EpsilonGreedy":
            if self.epsilon is None:
                object.__setattr__(self, "epsilon", 0.5)
            if not 0.0 <= self.epsilon <= 1.0:
                raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        elif self.epsilon is not None:
            raise ValueError("epsilon only applies to EpsilonGreedy")

    @property
    def label(self) -> str:
        if self.kind == "UNIF":
            return "UNIF"
        return f"EG{round(self.epsilon * 100):02d}"

    def select(self, pop: Population, rng: np.random.Generator) -> int:
        if self.kind == "UNIF":
            return select_unif(pop, rng)
        return select_epsilon_greedy(pop, rng, self.epsilon)


def trial_record(instance: ProblemInstance, label: str) -> TrialRecord:
    history = [(n, f - instance.f_opt) for n, f in instance.history]
    hits = {}
    for d in STANDARD_LADDER:
        hits[d] = next((n for n, bd in history if bd <= d), None)
    final = instance.best_f - instance.f_opt
    return TrialRecord(instance.problem_id.function_id, instance.dim, instance.instance_seed, label,
                       instance.eval_count, final, hits, history)


def run_portfolio_trial(portfolio, strategy: StrategyConfig, instance: ProblemInstance, budget: int,
                        final_target: TargetSpec | float = 1e-8, seed: int = 0,
                        label: str | None = None) -> tuple[TrialRecord, list[MLogRow]]:
    """Run select-and-step rounds until the final target is hit or ``budget`` evaluations are spent.

    Member initialization is not cut short by the budget; a budget below the
    initialization cost yields an unsuccessful trial with no rounds.
    """
    final = final_target.delta_f if isinstance(final_target, TargetSpec) else float(final_target)
    pop = population_init(portfolio, instance, seed)
    rng = stream(seed, "select")
    instance.budget = budget
    try:
        while instance.eval_count < budget:
            if instance.eval_count and instance.best_f - instance.f_opt <= final:
                break
            try:
                member_step(pop, strategy.select(pop, rng), instance)
            except BudgetExhausted:
                break
    finally:
        instance.budget = None
    if label is None:
        label = strategy.label if len(portfolio) > 1 else _as_spec(portfolio[0]).name
    return trial_record(instance, label), pop.mlog
