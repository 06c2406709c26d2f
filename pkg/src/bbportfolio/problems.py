"""Benchmark suite: ten shifted/rotated test functions in five groups.

Each function is ``f(x) = g(R (x - x_opt)) + f_opt`` with a core ``g`` that
is zero at the origin, so ``f(x_opt) == f_opt`` exactly.  Instances are a
pure function of ``(function_id, dim, instance_seed)``.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

MIN_DIM, MAX_DIM = 2, 40

GROUPS = ("separable", "moderate", "ill-conditioned", "multi-modal", "weakly-structured")

FUNCTIONS = {
    1: ("sphere", "separable"),
    2: ("separable ellipsoid", "separable"),
    3: ("separable Rastrigin", "multi-modal"),
    4: ("Rosenbrock", "moderate"),
    5: ("attractive sector", "moderate"),
    6: ("rotated ellipsoid", "ill-conditioned"),
    7: ("bent cigar", "ill-conditioned"),
    8: ("rotated Rastrigin", "multi-modal"),
    9: ("Schaffers F7", "weakly-structured"),
    10: ("Gallagher 101 peaks", "weakly-structured"),
}

SEPARABLE_IDS = (1, 2, 3)
N_PEAKS = 101


class BudgetExhausted(Exception):
    """Raised by :meth:`ProblemInstance.evaluate` when the evaluation budget is spent.

    ``outcome`` is filled in by whoever was iterating when the budget ran out,
    so callers can still account for the partial iteration.
    """

    def __init__(self, eval_count: int):
        super().__init__(f"evaluation budget exhausted after {eval_count} evaluations")
        self.eval_count = eval_count
        self.outcome = None


@dataclass(frozen=True)
class ProblemId:
    function_id: int

    def __post_init__(self):
        if self.function_id not in FUNCTIONS:
            raise ValueError(f"unknown function_id {self.function_id!r} (expected 1..10)")

    @property
    def name(self) -> str:
        return FUNCTIONS[self.function_id][0]

    @property
    def group(self) -> str:
        return FUNCTIONS[self.function_id][1]


def functions_in_group(group: str) -> list[int]:
    if group == "all":
        return sorted(FUNCTIONS)
    if group not in GROUPS:
        raise ValueError(f"unknown group {group!r}")
    return [fid for fid, (_, g) in sorted(FUNCTIONS.items()) if g == group]


def stream(*key: int | str) -> np.random.Generator:
    """Named random stream; string parts are hashed to stable integers."""
    words = [zlib.crc32(k.encode()) if isinstance(k, str) else int(k) for k in key]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(words)))


def derive_seed(*key: int | str) -> int:
    words = [zlib.crc32(k.encode()) if isinstance(k, str) else int(k) for k in key]
    return int(np.random.SeedSequence(words).generate_state(1, dtype=np.uint32)[0])


def random_rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    # sign-fix so the factorization is unique
    return q * np.where(np.diag(r) < 0, -1.0, 1.0)


# -- core functions, all with g(0) == 0 -------------------------------------

def _ellipsoid_coefs(dim: int) -> np.ndarray:
    return 10.0 ** (6.0 * np.arange(dim) / (dim - 1))


def _rastrigin(z):
    return 10.0 * (z.size - np.cos(2.0 * math.pi * z).sum()) + z @ z


def _rosenbrock(z):
    z = z + 1.0
    return float(np.sum(100.0 * (z[:-1] ** 2 - z[1:]) ** 2 + (z[:-1] - 1.0) ** 2))


def _schaffers(z):
    s = np.sqrt(z[:-1] ** 2 + z[1:] ** 2)
    rs = np.sqrt(s)
    return float(((rs + rs * np.sin(50.0 * s**0.2) ** 2).sum() / (z.size - 1)) ** 2)


def _make_core(function_id: int, dim: int, x_opt: np.ndarray, rotation: np.ndarray,
               rng: np.random.Generator) -> Callable[[np.ndarray], float]:
    if function_id == 1:
        return lambda z: float(z @ z)
    if function_id in (2, 6):
        coefs = _ellipsoid_coefs(dim)
        return lambda z: float(coefs @ (z * z))
    if function_id in (3, 8):
        return lambda z: float(_rastrigin(z))
    if function_id == 4:
        return _rosenbrock
    if function_id == 5:
        sign = np.sign(x_opt)

        def sector(z):
            return float(np.where(z * sign > 0, 100.0, 1.0) @ (z * z))
        return sector
    if function_id == 7:
        return lambda z: float(z[0] ** 2 + 1e6 * (z[1:] @ z[1:]))
    if function_id == 9:
        return _schaffers
    if function_id == 10:
        centers = rng.uniform(-4.0, 4.0, size=(N_PEAKS, dim))
        centers[0] = x_opt
        peaks = (centers - x_opt) @ rotation.T
        peaks[0] = 0.0
        heights = np.concatenate(([10.0], 1.1 + 8.0 * np.arange(N_PEAKS - 1) / (N_PEAKS - 2)))
        widths = 10.0 ** rng.uniform(0.0, 3.0, size=N_PEAKS) / (2.0 * dim)

        def gallagher(z):
            d2 = ((peaks - z) ** 2).sum(axis=1)
            return float(10.0 - np.max(heights * np.exp(-widths * d2)))
        return gallagher
    raise ValueError(f"unknown function_id {function_id!r}")


@dataclass(frozen=True)
class TargetSpec:
    delta_f: float
    f_t: float | None = None


@dataclass(eq=False)
class ProblemInstance:
    """One benchmark function instance plus its evaluation bookkeeping.

    ``history`` lists ``(eval_index, best_f)`` at every improvement, which is
    enough to recover the first-hit evaluation of any target afterwards.
    Setting ``trace`` to a list records every evaluated point and value.
    """

    problem_id: ProblemId
    dim: int
    instance_seed: int
    x_opt: np.ndarray
    f_opt: float
    rotation: np.ndarray
    core: Callable[[np.ndarray], float] = field(repr=False)
    eval_count: int = 0
    best_f: float = math.inf
    best_x: np.ndarray | None = None
    budget: int | None = None
    history: list = field(default_factory=list, repr=False)
    trace: list | None = field(default=None, repr=False)

    def evaluate(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected a vector of length {self.dim}, got shape {x.shape}")
        if not np.isfinite(x).all():
            raise ValueError("non-finite coordinates passed to evaluate")
        if self.budget is not None and self.eval_count >= self.budget:
            raise BudgetExhausted(self.eval_count)
        z = x - self.x_opt
        if self.problem_id.function_id not in SEPARABLE_IDS:
            z = self.rotation @ z
        f = self.core(z) + self.f_opt
        self.eval_count += 1
        if f < self.best_f:
            self.best_f = f
            self.best_x = x.copy()
            self.history.append((self.eval_count, f))
        if self.trace is not None:
            self.trace.append((x.copy(), f))
        return f

    def __call__(self, x) -> float:
        return self.evaluate(x)

    def first_hit(self, delta_f: float) -> int | None:
        """Evaluation index at which best_f - f_opt first dropped to ``delta_f`` or below."""
        for n, f in self.history:
            if f - self.f_opt <= delta_f:
                return n
        return None


def make_instance(problem_id: ProblemId | int, dim: int, instance_seed: int) -> ProblemInstance:
    if not isinstance(problem_id, ProblemId):
        problem_id = ProblemId(int(problem_id))
    if not MIN_DIM <= dim <= MAX_DIM:
        raise ValueError(f"dimension must be in [{MIN_DIM}, {MAX_DIM}], got {dim}")
    fid = problem_id.function_id
    rng = stream(fid, dim, instance_seed, "instance")
    x_opt = rng.uniform(-4.0, 4.0, size=dim)
    f_opt = float(rng.uniform(-100.0, 100.0))
    if fid in SEPARABLE_IDS:
        rotation = np.eye(dim)
    else:
        rotation = random_rotation(stream(fid, dim, instance_seed, "rotation"), dim)
    core = _make_core(fid, dim, x_opt, rotation, stream(fid, dim, instance_seed, "core"))
    return ProblemInstance(problem_id, dim, instance_seed, x_opt, f_opt, rotation, core)


def target_ladder(n: int = 50, low: float = 1e-8, high: float = 1e2) -> list[TargetSpec]:
    """``n`` target precisions spaced evenly in log10, from ``high`` down to ``low``."""
    if n < 2:
        raise ValueError("a target ladder needs at least two targets")
    if not 0 < low < high:
        raise ValueError("need 0 < low < high")
    hi, lo = math.log10(high), math.log10(low)
    return [TargetSpec(10.0 ** (hi - (hi - lo) * j / (n - 1))) for j in range(n)]


def instance_targets(instance: ProblemInstance, ladder: list[TargetSpec]) -> list[TargetSpec]:
    return [TargetSpec(t.delta_f, instance.f_opt + t.delta_f) for t in ladder]


def best_delta(instance: ProblemInstance) -> float:
    if instance.eval_count < 1:
        raise ValueError("no evaluations yet")
    return instance.best_f - instance.f_opt
