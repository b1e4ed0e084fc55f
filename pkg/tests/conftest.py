import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from setcg.cone import OrderingCone
from setcg.problem import SetValuedProblem

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

K2_GENERATORS = [[-1.0, 3.0], [3.0, -1.0]]


@pytest.fixture(params=["orthant2", "orthant3", "k2", "soc3"])
def any_cone(request):
    return {
        "orthant2": OrderingCone.orthant(2),
        "orthant3": OrderingCone.orthant(3),
        "k2": OrderingCone.polyhedral(K2_GENERATORS),
        "soc3": OrderingCone.soc3(),
    }[request.param]


def quadratic_problem(n=2, name="quad"):
    """``p = 1`` problem ``f(x) = |x|^2 / 2`` in ``R^1`` ordered by ``R_+``."""
    def values(x):
        return np.array([[0.5 * float(x @ x)]])

    def jac(x):
        return np.asarray(x, dtype=float).reshape(1, 1, n)

    return SetValuedProblem(name, n, 1, 1, values, jac, OrderingCone.orthant(1), [[-5.0, 5.0]] * n)


@pytest.fixture
def quad2():
    return quadratic_problem(2)


@pytest.fixture
def quad1():
    return quadratic_problem(1)
