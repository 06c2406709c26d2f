"""Step-resumable optimizer contract.

An optimizer is an explicit state machine: ``step`` runs exactly one native
iteration against a problem instance and hands control back.  Everything an
optimizer needs between iterations lives on the object, so a state can be
copied or pickled between steps and resumed elsewhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..problems import BudgetExhausted, ProblemInstance

RUNNING, CONVERGED, FAILED = "running", "converged", "failed"


class NotRunningError(RuntimeError):
    pass


class NumericalFailure(ArithmeticError):
    pass


@dataclass
class StepOutcome:
    evals_used: int
    best_x: np.ndarray
    best_y: float
    converged: bool = False


@dataclass(frozen=True)
class OptimizerSpec:
    name: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        from . import REGISTRY

        if self.name not in REGISTRY:
            raise ValueError(f"unknown optimizer {self.name!r}; choose from {sorted(REGISTRY)}")
        unknown = set(self.params) - set(REGISTRY[self.name].DEFAULTS)
        if unknown:
            raise ValueError(f"unknown parameter(s) for {self.name}: {sorted(unknown)}")

    def __hash__(self):
        return hash((self.name, tuple(sorted(self.params.items()))))

    @property
    def is_local(self) -> bool:
        from . import REGISTRY

        return REGISTRY[self.name].LOCAL


class Optimizer:
    """Base class. Subclasses implement ``_start`` and ``_iterate``."""

    DEFAULTS: dict[str, Any] = {}
    LOCAL = True

    def __init__(self, spec: OptimizerSpec, instance: ProblemInstance, x0, seed: int = 0):
        x0 = np.asarray(x0, dtype=float)
        if x0.shape != (instance.dim,):
            raise ValueError(f"x0 has shape {x0.shape}, instance has dim {instance.dim}")
        self.spec = spec
        self.opts = {**self.DEFAULTS, **spec.params}
        self.dim = instance.dim
        self.rng = np.random.default_rng(seed)
        self.iteration_count = 0
        self.status = RUNNING
        self.evals = 0
        self.best_x = x0.copy()
        self.best_y = math.inf
        try:
            self._start(instance, x0)
        except BudgetExhausted as exc:
            self.status = FAILED
            exc.outcome = self.outcome(self.evals)
            raise

    def _f(self, instance: ProblemInstance, x: np.ndarray) -> float:
        if not np.isfinite(x).all():
            raise NumericalFailure(f"{self.spec.name} produced a non-finite point")
        y = instance.evaluate(x)
        self.evals += 1
        if y < self.best_y:
            self.best_y = y
            self.best_x = np.array(x, dtype=float)
        return y

    def _start(self, instance: ProblemInstance, x0: np.ndarray) -> None:
        raise NotImplementedError

    def _iterate(self, instance: ProblemInstance) -> bool:
        """Run one iteration; return True when the convergence test fires."""
        raise NotImplementedError

    def outcome(self, evals_used: int, converged: bool = False) -> StepOutcome:
        return StepOutcome(evals_used, self.best_x.copy(), self.best_y, converged)

    def step(self, instance: ProblemInstance) -> StepOutcome:
        if self.status != RUNNING:
            raise NotRunningError(f"{self.spec.name} state is {self.status}")
        before = self.evals
        self.iteration_count += 1
        try:
            converged = self._iterate(instance)
        except BudgetExhausted as exc:
            # the iteration was cut short; the state cannot be resumed
            self.status = FAILED
            exc.outcome = self.outcome(self.evals - before)
            raise
        except (NumericalFailure, FloatingPointError, np.linalg.LinAlgError):
            self.status = FAILED
            return self.outcome(self.evals - before)
        if converged:
            self.status = CONVERGED
        return self.outcome(self.evals - before, converged)


def fd_gradient(instance: ProblemInstance, x, h: float = 1e-8, fx: float | None = None,
                evaluate=None) -> np.ndarray:
    """Forward-difference gradient with per-coordinate step ``h * max(1, |x_i|)``.

    Costs ``k + 1`` evaluations, or ``k`` when ``fx`` (the value at ``x``) is
    passed in.  ``evaluate`` lets an optimizer route calls through its own
    accounting; it defaults to ``instance.evaluate``.
    """
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    evaluate = evaluate or instance.evaluate
    x = np.asarray(x, dtype=float)
    if fx is None:
        fx = evaluate(x)
    g = np.empty_like(x)
    for i in range(x.size):
        xi = x.copy()
        step = h * max(1.0, abs(x[i]))
        xi[i] = x[i] + step
        g[i] = (evaluate(xi) - fx) / (xi[i] - x[i])
    if not np.isfinite(g).all():
        raise NumericalFailure("non-finite finite-difference gradient")
    return g
