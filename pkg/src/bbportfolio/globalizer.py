"""Global wrappers around resumable optimizers.

:class:`BasinHopping` turns a local method into a global one: perturb the
accepted point, descend, accept or reject with a fixed-temperature Metropolis
rule, and start over from a uniform random point after ``max_hops`` hops.
:class:`Restarts` simply re-launches a method from a fresh random point each
time it stops; it is what CMA-ES gets instead of hopping.

Both expose the same ``step(instance) -> StepOutcome`` surface as a bare
optimizer and never stop on their own.
"""
from __future__ import annotations

import math

import numpy as np

from .optimizers import RUNNING, OptimizerSpec, StepOutcome, init_optimizer
from .problems import BudgetExhausted, ProblemInstance

DOMAIN = 5.0
MAX_HOPS = 100


class _Runner:
    def __init__(self, spec: OptimizerSpec | str, instance: ProblemInstance, seed: int):
        if isinstance(spec, str):
            spec = OptimizerSpec(spec)
        self.spec = spec
        self.dim = instance.dim
        self.rng = np.random.default_rng(seed)
        self.status = RUNNING
        self.iteration_count = 0
        self.evals = 0
        self.best_x = None
        self.best_y = math.inf
        self.start_points: list[np.ndarray] = []
        self.local = None

    @property
    def name(self) -> str:
        return self.spec.name

    def _uniform_start(self) -> np.ndarray:
        return self.rng.uniform(-DOMAIN, DOMAIN, self.dim)

    def _absorb(self, outcome: StepOutcome | None) -> None:
        if outcome is not None and outcome.best_y < self.best_y:
            self.best_y = outcome.best_y
            self.best_x = outcome.best_x.copy()

    def _launch(self, instance: ProblemInstance, x0: np.ndarray) -> None:
        self.start_points.append(x0.copy())
        seed = int(self.rng.integers(2**32))
        try:
            self.local = init_optimizer(self.spec, instance, x0, seed)
        except BudgetExhausted as exc:
            self._absorb(exc.outcome)
            raise
        self._absorb(self.local.outcome(0))

    def outcome(self, evals_used: int) -> StepOutcome:
        best_x = None if self.best_x is None else self.best_x.copy()
        return StepOutcome(evals_used, best_x, self.best_y, False)

    def step(self, instance: ProblemInstance) -> StepOutcome:
        start, base = instance.eval_count, self.evals
        self.iteration_count += 1
        try:
            self._absorb(self.local.step(instance))
            if self.local.status != RUNNING:
                self._local_finished(instance)
        except BudgetExhausted as exc:
            self._absorb(exc.outcome)
            self.evals = base + instance.eval_count - start
            exc.outcome = self.outcome(instance.eval_count - start)
            raise
        self.evals = base + instance.eval_count - start
        return self.outcome(instance.eval_count - start)

    def _local_finished(self, instance: ProblemInstance) -> None:
        raise NotImplementedError


class BasinHopping(_Runner):
    """Basin hopping over a local optimizer; one step is one local iteration."""

    def __init__(self, spec, instance, seed, temperature: float = 1.0, step_size: float = 0.5,
                 max_hops: int = MAX_HOPS):
        super().__init__(spec, instance, seed)
        if not self.spec.is_local:
            raise ValueError(f"{self.spec.name} is not a local method; use Restarts")
        self.temperature = temperature
        self.step_size = step_size
        self.max_hops = max_hops
        self.hop_count = 0
        self.restarts = 0
        self.accepted = 0
        self.anchor_x = self._uniform_start()
        self.anchor_y = math.inf
        start = instance.eval_count
        self._launch(instance, self.anchor_x)
        self.evals = instance.eval_count - start

    @property
    def global_best_x(self):
        return self.best_x

    @property
    def global_best_y(self):
        return self.best_y

    def accept(self, y_new: float) -> bool:
        if y_new < self.anchor_y:
            return True
        if self.temperature <= 0:
            return False
        return self.rng.random() < math.exp(-(y_new - self.anchor_y) / self.temperature)

    def _local_finished(self, instance):
        if self.accept(self.local.best_y):
            self.anchor_x, self.anchor_y = self.local.best_x.copy(), self.local.best_y
            self.accepted += 1
        self.hop_count += 1
        if self.hop_count < self.max_hops:
            x0 = self.anchor_x + self.rng.uniform(-self.step_size, self.step_size, self.dim)
        else:
            self.hop_count = 0
            self.restarts += 1
            self.anchor_y = math.inf
            x0 = self._uniform_start()
            self.anchor_x = x0
        self._launch(instance, x0)


class Restarts(_Runner):
    """Relaunch from a uniform random point whenever the inner method stops.

    With ``popsize_factor > 1`` and a method that takes a ``popsize`` parameter,
    each relaunch multiplies the population size (IPOP-style restarts).
    """

    def __init__(self, spec, instance, seed, popsize_factor: float = 2.0):
        super().__init__(spec, instance, seed)
        self.base_spec = self.spec
        self.popsize_factor = popsize_factor
        self.restarts = 0
        start = instance.eval_count
        self._launch(instance, self._uniform_start())
        self.evals = instance.eval_count - start

    def _local_finished(self, instance):
        self.restarts += 1
        if self.popsize_factor != 1 and hasattr(self.local, "lam"):
            lam = int(round(self.local.lam * self.popsize_factor))
            self.spec = OptimizerSpec(self.base_spec.name, {**self.base_spec.params, "popsize": lam})
        self._launch(instance, self._uniform_start())


def make_runner(spec: OptimizerSpec | str, instance: ProblemInstance, seed: int):
    if isinstance(spec, str):
        spec = OptimizerSpec(spec)
    if spec.is_local:
        return BasinHopping(spec, instance, seed)
    return Restarts(spec, instance, seed)


def bh_init(spec, instance, seed, **kwargs) -> BasinHopping:
    return BasinHopping(spec, instance, seed, **kwargs)


def bh_step(state: BasinHopping, instance) -> StepOutcome:
    return state.step(instance)
