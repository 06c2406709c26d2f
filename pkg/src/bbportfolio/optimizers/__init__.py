"""Step-resumable optimizers: Nelder-Mead, Powell, CG, BFGS and CMA-ES."""
from .base import (
    CONVERGED,
    FAILED,
    RUNNING,
    NotRunningError,
    NumericalFailure,
    Optimizer,
    OptimizerSpec,
    StepOutcome,
    fd_gradient,
)
from .cma import CMA
from .gradient import BFGS, CG
from .nelder_mead import NelderMead
from .powell import Powell

REGISTRY: dict[str, type[Optimizer]] = {
    "NelderMead": NelderMead,
    "Powell": Powell,
    "CG": CG,
    "BFGS": BFGS,
    "CMA": CMA,
}

DEFAULT_PORTFOLIO = ("NelderMead", "Powell", "CG", "BFGS", "CMA")


def init_optimizer(spec: OptimizerSpec | str, instance, x0, seed: int = 0) -> Optimizer:
    if isinstance(spec, str):
        spec = OptimizerSpec(spec)
    return REGISTRY[spec.name](spec, instance, x0, seed)


def step_optimizer(state: Optimizer, instance) -> StepOutcome:
    return state.step(instance)


def cma_generation(state: CMA, instance) -> StepOutcome:
    if not isinstance(state, CMA):
        raise TypeError("cma_generation needs a CMA state")
    return state.step(instance)


__all__ = [
    "BFGS", "CG", "CMA", "CONVERGED", "DEFAULT_PORTFOLIO", "FAILED", "NelderMead",
    "NotRunningError", "NumericalFailure", "Optimizer", "OptimizerSpec", "Powell",
    "REGISTRY", "RUNNING", "StepOutcome", "cma_generation", "fd_gradient",
    "init_optimizer", "step_optimizer",
]
