"""Pattern search on problems with known optima."""

import numpy as np
import pytest

from windrow.errors import DomainError
from windrow.search import PatternSearchOptions, pattern_search


def test_recovers_1d_quadratic_maximum():
    res = pattern_search(lambda x: -(x[0] - 3.0) ** 2, [0.0], [-10.0], [10.0])
    assert res.x[0] == pytest.approx(3.0, abs=1e-4)
    assert res.violation == 0.0
    assert not res.budget_exhausted


def test_active_upper_bound():
    res = pattern_search(lambda x: -(x[0] - 3.0) ** 2, [0.0], [-10.0], [2.0])
    assert res.x[0] == pytest.approx(2.0, abs=1e-6)


def test_2d_quadratic_from_random_multistarts():
    target = np.array([1.2, -0.7])

    def objective(x):
        d = x - target
        return -(d[0] ** 2) - 2.0 * d[1] ** 2

    rng = np.random.default_rng(7)
    for _ in range(5):
        x0 = rng.uniform(-10.0, 10.0, size=2)
        res = pattern_search(objective, x0, [-10.0, -10.0], [10.0, 10.0])
        assert np.allclose(res.x, target, atol=1e-3)


def test_penalized_infeasibility_never_displaces_feasible_incumbent():
    # the unconstrained maximum at x = 5 is infeasible; the search must
    # stay on the feasible side of the line
    def objective(x):
        violation = max(0.0, x[0] - 2.0)
        return -(x[0] - 5.0) ** 2, violation

    res = pattern_search(objective, [0.0], [-10.0], [10.0])
    assert res.violation == 0.0
    assert res.x[0] == pytest.approx(2.0, abs=1e-4)


def test_budget_exhaustion_is_flagged():
    opts = PatternSearchOptions(max_evals=5)
    res = pattern_search(lambda x: -(x[0] - 3.0) ** 2, [0.0], [-10.0], [10.0], opts)
    assert res.budget_exhausted
    assert res.evaluations <= 5


def test_first_improvement_poll_converges_too():
    opts = PatternSearchOptions(poll="first")
    res = pattern_search(lambda x: -(x[0] - 3.0) ** 2, [0.0], [-10.0], [10.0], opts)
    assert res.x[0] == pytest.approx(3.0, abs=1e-4)


def test_deterministic_trajectory():
    def objective(x):
        return -(x[0] - 1.0) ** 2 - (x[1] + 2.0) ** 2

    a = pattern_search(objective, [4.0, 4.0], [-5.0, -5.0], [5.0, 5.0])
    b = pattern_search(objective, [4.0, 4.0], [-5.0, -5.0], [5.0, 5.0])
    assert a.history == b.history
    assert np.array_equal(a.x, b.x)
    assert a.evaluations == b.evaluations


def test_option_validation():
    with pytest.raises(DomainError):
        PatternSearchOptions(poll="spiral")
    with pytest.raises(DomainError):
        PatternSearchOptions(initial_mesh=1e-6, mesh_tol=1e-3)
    with pytest.raises(DomainError):
        pattern_search(lambda x: x[0], [0.0], [1.0], [-1.0])
