import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from setcg.cone import OrderingCone
from setcg.errors import PartitionTooLarge
from setcg.problems import builtin_problem, ex1_hull_points
from setcg.subproblem import (F_value, compute_direction, direction_from_arrays, min_norm_point,
                              solve_direction_for_a)

from conftest import K2_GENERATORS
from oracles import grid_points, min_norm_point_pg, subproblem_values

CONES = {
    "orthant2": OrderingCone.orthant(2),
    "k2": OrderingCone.polyhedral(K2_GENERATORS),
    "orthant3": OrderingCone.orthant(3),
    "soc3": OrderingCone.soc3(),
}


class TestMinNormPoint:
    @pytest.mark.parametrize("P, lam, v", [
        ([[1, 0], [0, 1]], [0.5, 0.5], [0.5, 0.5]),
        ([[2, 2]], [1.0], [2, 2]),
        ([[1, 0], [-1, 0]], [0.5, 0.5], [0, 0]),
    ])
    def test_examples(self, P, lam, v):
        w, out = min_norm_point(P)
        np.testing.assert_allclose(out, v, atol=1e-12)
        np.testing.assert_allclose(w, lam, atol=1e-12)

    def test_empty(self):
        with pytest.raises(ValueError):
            min_norm_point(np.zeros((0, 2)))

    def test_duplicates_and_collinear(self):
        P = np.array([[1.0, 1.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
        _, v = min_norm_point(P)
        np.testing.assert_allclose(v, [1.0, 1.0])

    @given(arrays(float, st.tuples(st.integers(1, 12), st.integers(1, 5)), elements=st.floats(-10, 10)))
    def test_certificate_and_simplex(self, P):
        w, v = min_norm_point(P)
        assert np.all(w >= 0.0) and w.sum() == pytest.approx(1.0)
        np.testing.assert_allclose(w @ P, v, atol=1e-9)
        scale = max(1.0, float(np.max(np.sum(P * P, axis=1))))
        assert np.min(P @ v) >= v @ v - 1e-9 * scale

    def test_against_projected_gradient(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            P = rng.normal(size=(rng.integers(1, 21), 5)) + 2 * rng.normal(size=5)
            _, v = min_norm_point(P)
            _, ref = min_norm_point_pg(P)
            np.testing.assert_allclose(v, ref, atol=1e-7)


class TestFValue:
    def test_examples(self):
        cone = OrderingCone.orthant(2)
        jac = np.array([[[3.0], [-1.0]], [[-1.0], [-2.0]]])
        assert F_value(jac, (0,), cone, [1.0]) == 3.0
        assert F_value(jac, (0, 1), cone, [1.0]) == 3.0
        assert F_value(jac, (1,), cone, [1.0]) == -1.0
        assert F_value(jac, (0, 1), cone, [0.0]) == 0.0


class TestSolveForA:
    def test_zero_jacobian(self):
        u, phi, _ = solve_direction_for_a(np.zeros((2, 2, 3)), (0, 1), OrderingCone.orthant(2))
        np.testing.assert_allclose(u, 0.0)
        assert phi == 0.0

    def test_steepest_descent(self):
        g = np.array([1.0, -2.0, 0.5])
        u, phi, _ = solve_direction_for_a(g.reshape(1, 1, 3), (0,), OrderingCone.orthant(1))
        np.testing.assert_allclose(u, -g, atol=1e-12)
        assert phi == pytest.approx(-0.5 * g @ g)

    def test_two_generators(self):
        # scalarized gradients (1,0) and (0,1): J = I with the orthant cone
        u, phi, _ = solve_direction_for_a(np.eye(2)[None], (0,), OrderingCone.orthant(2))
        np.testing.assert_allclose(u, [-0.5, -0.5], atol=1e-12)
        assert phi == pytest.approx(-0.25)

    def test_two_generators_grid(self):
        D, _ = grid_points(2, -2.0, 2.0)
        vals = subproblem_values(np.eye(2)[None], OrderingCone.orthant(2), D)
        np.testing.assert_allclose(D[np.argmin(vals)], [-0.5, -0.5])
        assert vals.min() == pytest.approx(-0.25)

    @pytest.mark.parametrize("method", ["column", "subgradient"])
    def test_soc_methods(self, method):
        rng = np.random.default_rng(5)
        J = rng.normal(size=(2, 3, 2))
        u, phi, _ = solve_direction_for_a(J, (0, 1), OrderingCone.soc3(), soc_method=method)
        D, h = grid_points(2)
        vals = subproblem_values(J, OrderingCone.soc3(), D)
        assert phi <= vals.min() + 1e-6
        assert abs(phi - vals.min()) <= 5e-2

    def test_soc_method_unknown(self):
        with pytest.raises(ValueError):
            solve_direction_for_a(np.ones((1, 3, 1)), (0,), OrderingCone.soc3(), soc_method="ipm")

    @pytest.mark.parametrize("cone_name", list(CONES))
    @pytest.mark.parametrize("n", [1, 2])
    def test_grid_oracle(self, cone_name, n):
        cone = CONES[cone_name]
        rng = np.random.default_rng([list(CONES).index(cone_name), n])
        D, h = grid_points(n)
        for _ in range(5):
            om = int(rng.integers(1, 4))
            J = rng.normal(size=(om, cone.dim, n))
            u, phi, _ = solve_direction_for_a(J, tuple(range(om)), cone)
            vals = subproblem_values(J, cone, D)
            # the solver is exact, so it can only beat the grid
            assert phi <= vals.min() + 1e-9
            assert vals.min() - phi <= 2 * h * (np.abs(J).sum() + 5.0)

    @given(st.integers(0, 2 ** 31))
    def test_invariants(self, seed):
        rng = np.random.default_rng(seed)
        cone = list(CONES.values())[seed % 4]
        om, n = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        J = rng.normal(size=(om, cone.dim, n))
        u, phi, _ = solve_direction_for_a(J, tuple(range(om)), cone)
        F = F_value(J, tuple(range(om)), cone, u)
        assert phi <= 1e-12
        assert phi == pytest.approx(F + 0.5 * u @ u, abs=1e-8)
        if np.linalg.norm(u) > 1e-4:
            assert F <= phi - 0.5 * u @ u + 1e-8
            assert F < 0.0


class TestComputeDirection:
    def test_ex4_k2_stationary(self):
        res = compute_direction(builtin_problem("ex4_k2"), [-10.4])
        assert np.linalg.norm(res.u) < 1e-4

    def test_ex1_hull_points_stationary(self):
        prob = builtin_problem("ex1")
        rng = np.random.default_rng(2)
        pts = ex1_hull_points()
        for _ in range(10):
            w = rng.dirichlet(np.ones(3))
            x = w @ pts[rng.choice(len(pts), 3, replace=False)]
            res = compute_direction(prob, x)
            assert abs(res.phi) <= 1e-6

    def test_quadratic(self, quad2):
        res = compute_direction(quad2, [1.0, 0.0])
        np.testing.assert_allclose(res.u, [-1.0, 0.0])
        assert res.phi == pytest.approx(-0.5)

    def test_tie_break_first(self):
        # two equal images, identical Jacobians: both partition elements tie
        images = np.zeros((2, 2))
        jac = np.repeat(np.eye(2)[None], 2, axis=0)
        res = direction_from_arrays(images, jac, OrderingCone.orthant(2))
        assert res.a == (0,)

    def test_picks_smaller_phi(self):
        images = np.zeros((2, 1))
        jac = np.array([[[1.0]], [[3.0]]])
        res = direction_from_arrays(images, jac, OrderingCone.orthant(1))
        assert res.a == (1,)
        assert res.phi == pytest.approx(-4.5)

    def test_partition_cap(self):
        images = np.zeros((5, 1))
        jac = np.ones((5, 1, 1))
        with pytest.raises(PartitionTooLarge):
            direction_from_arrays(images, jac, OrderingCone.orthant(1), cap=4)
