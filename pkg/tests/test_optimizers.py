import copy
import math
import pickle

import numpy as np
import pytest

from bbportfolio.optimizers import (
    CONVERGED,
    DEFAULT_PORTFOLIO,
    RUNNING,
    NotRunningError,
    OptimizerSpec,
    cma_generation,
    fd_gradient,
    init_optimizer,
    step_optimizer,
)
from bbportfolio.problems import BudgetExhausted, make_instance


def best_delta(inst):
    return inst.best_f - inst.f_opt


def traced(fid, dim, seed):
    inst = make_instance(fid, dim, seed)
    inst.trace = []
    return inst


def reference_run(name, fid, dim, seed, max_evals):
    inst = traced(fid, dim, seed)
    x0 = np.random.default_rng(seed).uniform(-5, 5, dim)
    state = init_optimizer(name, inst, x0, seed)
    while state.status == RUNNING and inst.eval_count < max_evals:
        state.step(inst)
    return inst.trace


def interrupted_run(name, fid, dim, seed, max_evals):
    """Step one iteration at a time, pickling the state between steps and
    interleaving an unrelated optimizer on another instance."""
    inst = traced(fid, dim, seed)
    x0 = np.random.default_rng(seed).uniform(-5, 5, dim)
    state = init_optimizer(name, inst, x0, seed)
    other_inst = make_instance(8, 3, seed + 100)
    other = init_optimizer("CMA", other_inst, np.ones(3), seed + 7)
    while state.status == RUNNING and inst.eval_count < max_evals:
        state = pickle.loads(pickle.dumps(state))
        step_optimizer(state, inst)
        if other.status == RUNNING:
            other.step(other_inst)
        state = copy.deepcopy(state)
    return inst.trace


@pytest.mark.parametrize("name", DEFAULT_PORTFOLIO)
@pytest.mark.parametrize("fid,dim", [(1, 2), (4, 5), (6, 5)])
@pytest.mark.parametrize("seed", [1, 2])
def test_stepwise_equals_continuous(name, fid, dim, seed):
    ref = reference_run(name, fid, dim, seed, 1500)
    got = interrupted_run(name, fid, dim, seed, 1500)
    assert len(ref) == len(got) > 0
    for (xa, fa), (xb, fb) in zip(ref, got):
        np.testing.assert_array_equal(xa, xb)
        assert fa == fb


@pytest.mark.parametrize("name", DEFAULT_PORTFOLIO)
def test_budget_accounting_and_monotone_incumbent(name):
    inst = make_instance(4, 3, 2)
    state = init_optimizer(name, inst, np.zeros(3), 5)
    total = state.evals
    prev = math.inf if name == "CMA" else state.best_y
    for _ in range(60):
        if state.status != RUNNING:
            break
        out = state.step(inst)
        assert out.evals_used >= 1
        total += out.evals_used
        assert out.best_y <= prev
        prev = out.best_y
    assert total == inst.eval_count
    assert state.best_y == inst.best_f


@pytest.mark.parametrize("name", DEFAULT_PORTFOLIO)
def test_iteration_count_and_incumbent_value(name):
    inst = make_instance(2, 3, 1)
    inst.trace = []
    state = init_optimizer(name, inst, np.ones(3), 0)
    for i in range(1, 11):
        if state.status != RUNNING:
            break
        out = state.step(inst)
        assert state.iteration_count == i
        # the incumbent is a point that was actually evaluated, with its recorded value
        assert any(np.array_equal(x, out.best_x) and f == out.best_y for x, f in inst.trace)


@pytest.mark.parametrize("name", DEFAULT_PORTFOLIO)
def test_convergence_suite_sphere(name):
    successes = 0
    for seed in range(1, 11):
        inst = make_instance(1, 2, seed)
        state = init_optimizer(name, inst, np.zeros(2), seed)
        while state.status == RUNNING and inst.eval_count < 2000 and best_delta(inst) > 1e-6:
            state.step(inst)
        successes += best_delta(inst) <= 1e-6 and inst.eval_count <= 2000
    assert successes >= 9


def test_nelder_mead_initial_simplex():
    inst = make_instance(1, 2, 1)
    state = init_optimizer("NelderMead", inst, np.array([2.0, 0.0]), 0)
    assert inst.eval_count == 3
    vertices = {tuple(v) for v in state.sim}
    assert vertices == {(2.0, 0.0), (2.1, 0.0), (2.0, 0.00025)}


@pytest.mark.parametrize("fid", [1, 3, 4, 8, 10])
def test_nelder_mead_step_cost(fid):
    inst = make_instance(fid, 2, 3)
    state = init_optimizer("NelderMead", inst, np.zeros(2), 0)
    costs = set()
    while state.status == RUNNING and state.iteration_count < 400:
        costs.add(state.step(inst).evals_used)
    # reflect, reflect+expand, reflect+contract, reflect+contract+shrink(k)
    assert costs <= {1, 2, 4}
    assert 1 in costs


def test_bfgs_sphere_within_ten_iterations():
    for seed in range(1, 6):
        inst = make_instance(1, 2, seed)
        x0 = np.random.default_rng(seed).uniform(-5, 5, 2)
        state = init_optimizer("BFGS", inst, x0, 0)
        np.testing.assert_array_equal(state.H, np.eye(2))
        for _ in range(10):
            if state.status != RUNNING or best_delta(inst) <= 1e-8:
                break
            state.step(inst)
        assert best_delta(inst) <= 1e-8


def test_stepping_a_stopped_state_fails():
    inst = make_instance(1, 2, 1)
    state = init_optimizer("BFGS", inst, np.zeros(2), 0)
    while state.status == RUNNING:
        state.step(inst)
    assert state.status == CONVERGED
    with pytest.raises(NotRunningError):
        state.step(inst)


def test_spec_validation():
    with pytest.raises(ValueError):
        OptimizerSpec("LBFGSB")
    with pytest.raises(ValueError):
        OptimizerSpec("CMA", {"sigma": 1.0})
    assert OptimizerSpec("CMA", {"sigma0": 1.0}).params == {"sigma0": 1.0}
    with pytest.raises(ValueError):
        init_optimizer("Powell", make_instance(1, 3, 1), np.zeros(2))


def test_budget_exhaustion_mid_iteration_carries_incumbent():
    inst = make_instance(1, 5, 1)
    state = init_optimizer("Powell", inst, np.zeros(5), 0)
    inst.budget = inst.eval_count + 7
    with pytest.raises(BudgetExhausted) as info:
        state.step(inst)
    out = info.value.outcome
    assert out.evals_used == 7
    assert out.best_y == inst.best_f
    assert state.status != RUNNING


# -- finite differences --------------------------------------------------------

def test_fd_gradient_sphere():
    inst = make_instance(1, 2, 1)
    g = fd_gradient(inst, inst.x_opt + np.array([1.0, 2.0]), 1e-8)
    np.testing.assert_allclose(g, [2.0, 4.0], atol=1e-5)
    assert inst.eval_count == 3


def test_fd_gradient_reuses_known_value():
    inst = make_instance(1, 4, 1)
    fx = inst.evaluate(np.zeros(4))
    fd_gradient(inst, np.zeros(4), 1e-8, fx=fx)
    assert inst.eval_count == 5


def test_fd_gradient_vanishes_at_sphere_optimum():
    inst = make_instance(1, 5, 2)
    assert np.linalg.norm(fd_gradient(inst, inst.x_opt, 1e-8)) <= 1e-4


@pytest.mark.parametrize("fid", [2, 6, 7])
def test_fd_gradient_at_optimum_matches_truncation_term(fid):
    # For a quadratic g(z) = z^T A z with z = R (x - x_opt), the forward difference at
    # x_opt is exactly h_i * (R^T A R)_ii; compare against that analytic value.
    inst = make_instance(fid, 5, 2)
    if fid == 7:
        A = np.diag([1.0] + [1e6] * 4)
    else:
        A = np.diag(10.0 ** (6.0 * np.arange(5) / 4))
    R = inst.rotation
    h = 1e-8 * np.maximum(1.0, np.abs(inst.x_opt))
    xh = inst.x_opt + h
    expected = (xh - inst.x_opt) * np.diag(R.T @ A @ R)
    g = fd_gradient(inst, inst.x_opt, 1e-8)
    # rounding noise of f near f_opt divided by the step
    noise = 4 * np.finfo(float).eps * abs(inst.f_opt) / h
    assert np.all(np.abs(g - expected) <= noise + 1e-6 * expected)


def test_fd_gradient_rejects_nonpositive_step():
    with pytest.raises(ValueError):
        fd_gradient(make_instance(1, 2, 1), np.zeros(2), 0.0)


# -- CMA-ES -----------------------------------------------------------------------

def test_cma_default_population():
    inst = make_instance(1, 10, 1)
    state = init_optimizer("CMA", inst, np.zeros(10), 0)
    assert state.lam == 4 + math.floor(3 * math.log(10)) == 10
    assert state.mu == 5
    assert inst.eval_count == 0
    out = cma_generation(state, inst)
    assert out.evals_used == 10


def test_cma_sphere_run_to_target():
    inst = make_instance(1, 5, 1)
    state = init_optimizer("CMA", inst, np.zeros(5), 3)
    while state.status == RUNNING and inst.eval_count < 3000 and best_delta(inst) > 1e-8:
        assert cma_generation(state, inst).evals_used == state.lam
    assert best_delta(inst) <= 1e-8


def test_cma_sigma_stays_finite_on_rotated_ellipsoid():
    inst = make_instance(6, 10, 1)
    state = init_optimizer("CMA", inst, np.zeros(10), 1)
    for _ in range(500):
        if state.status != RUNNING:
            break
        cma_generation(state, inst)
        assert 0 < state.sigma < math.inf
    assert state.status != "failed"


def test_cma_generation_rejects_other_methods():
    inst = make_instance(1, 2, 1)
    with pytest.raises(TypeError):
        cma_generation(init_optimizer("BFGS", inst, np.zeros(2)), inst)


@pytest.mark.parametrize("name", DEFAULT_PORTFOLIO)
def test_seeded_determinism(name):
    a = reference_run(name, 8, 3, 4, 600)
    b = reference_run(name, 8, 3, 4, 600)
    assert len(a) == len(b)
    assert all(np.array_equal(x, y) and fa == fb for (x, fa), (y, fb) in zip(a, b))
