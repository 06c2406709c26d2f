import numpy as np
import pytest

from bbportfolio.problems import ProblemId, ProblemInstance, make_instance


@pytest.fixture
def sphere2():
    return make_instance(1, 2, 1)


def plain_instance(function_id, dim, core_instance=None):
    """Instance with x_opt = 0, f_opt = 0 and R = I but the given function's core."""
    base = core_instance or make_instance(function_id, dim, 1)
    return ProblemInstance(ProblemId(function_id), dim, 0, np.zeros(dim), 0.0, np.eye(dim), base.core)


ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line for an acceptance criterion."""
    name = request.node.name

    def record(ok: bool, detail: str):
        ACCEPTANCE[name] = (bool(ok), detail)
        return ok
    yield record
    if name not in ACCEPTANCE:
        ACCEPTANCE[name] = (False, "did not complete")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
