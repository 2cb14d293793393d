import unittest

import numpy as np
from fwlasso import CDSolver, CdOptions, CdProblem, LassoProblem, SparseColumnMatrix, CDOrder, OpCounter, Trace, \
    StopReason, TraceLevel, ContractViolation, StateAuditError, make_rng, soft_threshold, least_squares_reference, \
    solve_penalized_reference


def make_problem(X, y, lam):
    return CdProblem(LassoProblem.build(SparseColumnMatrix(np.asarray(X, dtype=float)), np.asarray(y, dtype=float)), lam)


class TestCDSolver(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        rng = make_rng(8)
        cls.X = rng.standard_normal((15, 8))
        cls.y = cls.X @ np.array([1.0, 0.0, -2.0, 0.0, 0.0, 0.5, 0.0, 0.0]) + 0.1 * rng.standard_normal(15)
        cls.lam = 0.3 * float(np.max(np.abs(cls.X.T @ cls.y)))
        cls.reference = solve_penalized_reference(cls.X, cls.y, cls.lam)

    def setUp(self):
        self.ctr = OpCounter()
        self.rng = make_rng(0)

    def test_soft_threshold(self):
        self.assertEqual(soft_threshold(5.0, 2.0), 3.0)
        self.assertEqual(soft_threshold(-1.0, 2.0), 0.0)
        self.assertEqual(soft_threshold(-5.0, 2.0), -3.0)

        x = make_rng(1).standard_normal(20)
        np.testing.assert_array_equal(soft_threshold(x, 0.0), x)

        with self.assertRaises(ContractViolation):
            soft_threshold(1.0, -0.1)

    def test_single_feature_epoch(self):
        solver = CDSolver(make_problem([[0.6], [0.8]], [1.0, 2.0], 0.5))
        state = solver.initial_state()
        max_delta = solver.cd_epoch(state, CDOrder.CYCLIC, self.rng, self.ctr)

        self.assertAlmostEqual(state.alpha[0], 1.7, places=12)
        self.assertAlmostEqual(max_delta, 1.7, places=12)
        self.assertEqual(self.ctr.dot_products, 1)
        self.assertEqual(self.ctr.axpy_ops, 1)
        self.assertEqual(self.ctr.coordinate_touches, 1)

    def test_epoch_above_lambda_max(self):
        lam = 1.000001 * float(np.max(np.abs(self.X.T @ self.y)))
        solver = CDSolver(make_problem(self.X, self.y, lam))
        state = solver.initial_state()

        self.assertEqual(solver.cd_epoch(state, CDOrder.CYCLIC, self.rng, self.ctr), 0.0)
        self.assertEqual(state.nnz, 0)
        self.assertEqual(self.ctr.dot_products, 8)
        self.assertEqual(self.ctr.axpy_ops, 0)

    def test_zero_columns_skipped(self):
        solver = CDSolver(make_problem([[1.0, 0.0], [1.0, 0.0]], [1.0, 3.0], 0.0))
        state = solver.initial_state()
        solver.cd_epoch(state, CDOrder.CYCLIC, self.rng, self.ctr)

        np.testing.assert_allclose(state.alpha, [2.0, 0.0])
        self.assertEqual(self.ctr.dot_products, 1)

    def test_least_squares_at_zero_penalty(self):
        rng = make_rng(2)
        X = rng.standard_normal((20, 5))
        y = rng.standard_normal(20)
        solution = CDSolver(make_problem(X, y, 0.0), CdOptions(epsilon=1e-12, max_epochs=100000)).solve_penalized()

        np.testing.assert_allclose(solution.dense(5), least_squares_reference(X, y), atol=1e-6)
        self.assertEqual(solution.stop_reason, StopReason.TOLERANCE)

    def test_matches_reference(self):
        solution = CDSolver(make_problem(self.X, self.y, self.lam), CdOptions(epsilon=1e-12, max_epochs=100000)).solve_penalized()

        self.assertAlmostEqual(solution.penalized_objective, self.reference.objective,
                               delta=1e-8 * abs(self.reference.objective))
        self.assertAlmostEqual(solution.penalized_objective, solution.objective + self.lam * solution.l1_norm, places=12)

    def test_orders_agree(self):
        objectives = []
        for order in CDOrder:
            options = CdOptions(epsilon=1e-12, max_epochs=100000, order=order, seed=4)
            objectives.append(CDSolver(make_problem(self.X, self.y, self.lam), options).solve_penalized().penalized_objective)

        for objective in objectives:
            self.assertAlmostEqual(objective, self.reference.objective, delta=1e-6 * abs(self.reference.objective))

    def test_iid_order_over_many_seeds(self):
        problem = make_problem(self.X, self.y, self.lam)
        for seed in range(50):
            options = CdOptions(epsilon=1e-12, max_epochs=100000, order=CDOrder.IID_UNIFORM, seed=seed)
            solution = CDSolver(problem, options).solve_penalized()

            self.assertEqual(solution.stop_reason, StopReason.TOLERANCE, seed)
            self.assertAlmostEqual(solution.penalized_objective, self.reference.objective,
                                   delta=1e-6 * abs(self.reference.objective), msg=seed)

    def test_iid_order_confirms_with_cyclic_sweep(self):
        options = CdOptions(epsilon=1e-3, order=CDOrder.IID_UNIFORM, seed=1)
        solution = CDSolver(make_problem(self.X, self.y, self.lam), options).solve_penalized(self.reference.alpha)

        self.assertEqual(solution.iterations, 2)
        self.assertEqual(solution.counters.dot_products, 2 * 8)
        self.assertEqual(solution.stop_reason, StopReason.TOLERANCE)

    def test_active_set(self):
        options = CdOptions(epsilon=1e-12, max_epochs=100000, active_set=True)
        solution = CDSolver(make_problem(self.X, self.y, self.lam), options).solve_penalized()

        self.assertAlmostEqual(solution.penalized_objective, self.reference.objective,
                               delta=1e-8 * abs(self.reference.objective))

    def test_warm_start_at_optimum(self):
        solver = CDSolver(make_problem(self.X, self.y, self.lam), CdOptions(epsilon=1e-3))
        solution = solver.solve_penalized(self.reference.alpha)

        self.assertEqual(solution.iterations, 1)
        self.assertEqual(solution.stop_reason, StopReason.TOLERANCE)

    def test_trace(self):
        trace = Trace()
        options = CdOptions(epsilon=1e-10, max_epochs=500, trace_level=TraceLevel.ITERATION)
        solution = CDSolver(make_problem(self.X, self.y, self.lam), options).solve_penalized(trace=trace)
        objectives = trace.objectives()

        self.assertEqual(len(trace), solution.iterations + 1)
        self.assertTrue(np.all(np.diff(objectives) <= 1e-12 * objectives[0]))

        summary = Trace()
        CDSolver(make_problem(self.X, self.y, self.lam)).solve_penalized(trace=summary)
        self.assertEqual(len(summary), 1)

    def test_max_epochs(self):
        solution = CDSolver(make_problem(self.X, self.y, self.lam), CdOptions(epsilon=1e-15, max_epochs=2)).solve_penalized()

        self.assertEqual(solution.iterations, 2)
        self.assertEqual(solution.stop_reason, StopReason.MAX_ITER)

    def test_audit(self):
        solver = CDSolver(make_problem(self.X, self.y, self.lam))
        state = solver.initial_state({0: 1.0}, self.ctr)
        solver.audit(state)
        self.assertEqual(self.ctr.axpy_ops, 1)

        state.R[0] += 1.0
        with self.assertRaises(StateAuditError):
            solver.audit(state)

    def test_invalid(self):
        with self.assertRaises(ContractViolation):
            CdOptions(epsilon=-1.0)

        with self.assertRaises(ContractViolation):
            CDSolver(make_problem(self.X, self.y, self.lam)).initial_state({8: 1.0})


if __name__ == '__main__':
    unittest.main()
