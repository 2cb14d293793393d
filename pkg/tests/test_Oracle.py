import unittest

import numpy as np
from fwlasso import SparseColumnMatrix, ContractViolation, OracleFailure, make_rng, project_l1_ball, \
    solve_constrained_reference, solve_penalized_reference, least_squares_reference


class TestOracle(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        rng = make_rng(10)
        cls.X = rng.standard_normal((10, 5))
        cls.y = cls.X @ np.array([2.0, 0.0, -1.0, 0.0, 0.5]) + 0.2 * rng.standard_normal(10)

    def test_scalar_problem(self):
        result = solve_constrained_reference(np.array([[1.0]]), np.array([1.0]), 1.0)

        np.testing.assert_allclose(result.alpha, [1.0])
        self.assertAlmostEqual(result.objective, 0.0)
        self.assertLessEqual(result.certified_gap, 1e-10)

    def test_zero_radius(self):
        result = solve_constrained_reference(self.X, self.y, 0.0)

        np.testing.assert_array_equal(result.alpha, np.zeros(5))
        self.assertAlmostEqual(result.objective, 0.5 * float(self.y @ self.y))

        with self.assertRaises(ContractViolation):
            solve_constrained_reference(self.X, self.y, -1.0)

    def test_sparse_input(self):
        dense = solve_constrained_reference(self.X, self.y, 1.0)
        sparse = solve_constrained_reference(SparseColumnMatrix(self.X), self.y, 1.0)

        self.assertAlmostEqual(dense.objective, sparse.objective, places=9)

    def test_constrained_matches_penalized(self):
        lam = 0.2 * float(np.max(np.abs(self.X.T @ self.y)))
        penalized = solve_penalized_reference(self.X, self.y, lam)
        delta = float(np.sum(np.abs(penalized.alpha)))
        constrained = solve_constrained_reference(self.X, self.y, delta)

        residual = self.X @ penalized.alpha - self.y
        self.assertAlmostEqual(constrained.objective, 0.5 * float(residual @ residual), delta=1e-8)
        self.assertLessEqual(float(np.sum(np.abs(constrained.alpha))), delta * (1.0 + 1e-12))

    def test_penalized_zero_lambda(self):
        result = solve_penalized_reference(self.X, self.y, 0.0)

        np.testing.assert_allclose(result.alpha, least_squares_reference(self.X, self.y))
        np.testing.assert_allclose(result.alpha, np.linalg.solve(self.X.T @ self.X, self.X.T @ self.y), atol=1e-10)

    def test_penalized_above_lambda_max(self):
        lam = 1.01 * float(np.max(np.abs(self.X.T @ self.y)))
        result = solve_penalized_reference(self.X, self.y, lam)

        np.testing.assert_array_equal(result.alpha, np.zeros(5))
        self.assertEqual(result.iterations, 0)

    def test_failure(self):
        delta = 0.5 * float(np.sum(np.abs(least_squares_reference(self.X, self.y))))
        self.assertGreaterEqual(np.count_nonzero(solve_constrained_reference(self.X, self.y, delta).alpha), 2)

        with self.assertRaises(OracleFailure):
            solve_constrained_reference(self.X, self.y, delta, tol=1e-30, max_iter=3)

        lam = 0.05 * float(np.max(np.abs(self.X.T @ self.y)))
        self.assertGreaterEqual(np.count_nonzero(solve_penalized_reference(self.X, self.y, lam).alpha), 2)

        with self.assertRaises(OracleFailure):
            solve_penalized_reference(self.X, self.y, lam, tol=1e-30, max_iter=3)

    def test_projection(self):
        np.testing.assert_array_equal(project_l1_ball(np.array([0.2, -0.3]), 1.0), [0.2, -0.3])
        np.testing.assert_allclose(project_l1_ball(np.array([3.0, 0.0]), 1.0), [1.0, 0.0])
        np.testing.assert_array_equal(project_l1_ball(np.array([3.0, -1.0]), 0.0), [0.0, 0.0])

        with self.assertRaises(ContractViolation):
            project_l1_ball(np.array([1.0]), -1.0)

    def test_projection_is_closest_point(self):
        rng = make_rng(12)
        for _ in range(20):
            v = 3.0 * rng.standard_normal(6)
            projected = project_l1_ball(v, 1.5)

            self.assertAlmostEqual(float(np.sum(np.abs(projected))), 1.5, places=12)
            for _ in range(20):
                other = project_l1_ball(projected + 0.1 * rng.standard_normal(6), 1.5)
                self.assertLessEqual(np.linalg.norm(v - projected), np.linalg.norm(v - other) + 1e-12)


if __name__ == '__main__':
    unittest.main()
