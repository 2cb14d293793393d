import unittest

import numpy as np
from fwlasso import FWSolver, FwOptions, FwState, FwProblem, LassoProblem, SparseColumnMatrix, SamplingPlan, \
    OpCounter, StopReason, TraceLevel, ContractViolation, NumericError, StateAuditError, CDSolver, CdOptions, CdProblem, \
    SyntheticSpec, make_rng, curvature_bound, generate_synthetic, standardize, least_squares_reference, \
    solve_constrained_reference
from fwlasso.Verify import random_instance


def make_problem(X, y, delta):
    return FwProblem(LassoProblem.build(SparseColumnMatrix(np.asarray(X, dtype=float)), np.asarray(y, dtype=float)), delta)


def tiny_instance(seed, vertex_optimum):
    rng = make_rng(seed)
    X = rng.standard_normal((10, 5))
    y = X @ rng.standard_normal(5) + rng.standard_normal(10)
    if not vertex_optimum:
        return X, y, 10.0 * float(np.sum(np.abs(least_squares_reference(X, y))))

    # Small enough that the first vertex FW picks is already optimal.
    sigma = np.abs(X.T @ y)
    gram = X.T @ X
    i = int(np.argmax(sigma))
    margins = [(sigma[i] - sigma[j]) / (gram[i, i] + abs(gram[i, j])) for j in range(5) if j != i]
    return X, y, 0.5 * min(margins)


class TestFWSolver(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.identity_problem = make_problem(np.eye(3), [3.0, -5.0, 1.0], 2.0)
        cls.scalar_problem = make_problem([[1.0]], [1.0], 1.0)
        cls.random_problem, _ = random_instance(17)
        cls.f_star = solve_constrained_reference(cls.random_problem.X, cls.random_problem.y,
                                                 cls.random_problem.delta, tol=1e-10).objective

    def setUp(self):
        self.ctr = OpCounter()

    def test_select_vertex(self):
        solver = FWSolver(self.identity_problem)
        state = solver.initial_state()

        index, signed_delta, g = solver.select_vertex(state, np.array([0, 1, 2]), self.ctr)
        self.assertEqual((index, signed_delta, g), (1, -2.0, 5.0))
        self.assertEqual(self.ctr.dot_products, 3)

        index, signed_delta, g = solver.select_vertex(state, np.array([0]), self.ctr)
        self.assertEqual((index, signed_delta, g), (0, 2.0, -3.0))
        self.assertEqual(self.ctr.dot_products, 4)

        self.assertEqual(solver.select_vertex(state, None, self.ctr)[0], 1)

    def test_select_vertex_ties(self):
        solver = FWSolver(make_problem(np.eye(3), [1.0, -1.0, 1.0], 1.0))
        index, signed_delta, _ = solver.select_vertex(solver.initial_state(), None, self.ctr)

        self.assertEqual(index, 0)
        self.assertEqual(signed_delta, 1.0)

    def test_line_search_from_zero(self):
        solver = FWSolver(make_problem(np.eye(3), [3.0, -5.0, 1.0], 10.0))
        state = solver.initial_state()
        index, signed_delta, g = solver.select_vertex(state, None, self.ctr)
        step, degenerate = solver.line_search(state, index, signed_delta, g)

        self.assertAlmostEqual(step, abs(g) / (10.0 * 1.0))
        self.assertFalse(degenerate)

        solver = FWSolver(self.identity_problem)
        state = solver.initial_state()
        self.assertEqual(solver.line_search(state, *solver.select_vertex(state, None, self.ctr)), (1.0, False))

    def test_line_search_matches_grid(self):
        problem, _ = random_instance(23, m=20, p=40)
        solver = FWSolver(problem)
        state = solver.initial_state()
        for _ in range(5):
            index, signed_delta, g = solver.select_vertex(state, None, self.ctr)
            step, _ = solver.line_search(state, index, signed_delta, g)
            solver.apply_step(state, index, signed_delta, step, g, self.ctr)

        index, signed_delta, g = solver.select_vertex(state, None, self.ctr)
        step, _ = solver.line_search(state, index, signed_delta, g)

        dense = problem.X.to_dense()
        alpha = np.zeros(problem.p)
        for j, value in state.alpha.items():
            alpha[j] = value
        vertex = np.zeros(problem.p)
        vertex[index] = signed_delta

        steps = np.linspace(0.0, 1.0, 100001)
        segment = dense @ alpha - problem.y
        direction = dense @ (vertex - alpha)
        values = 0.5 * np.sum((segment[None, :] + steps[:, None] * direction[None, :]) ** 2, axis=1)

        self.assertLessEqual(abs(step - steps[np.argmin(values)]), 1e-5)

    def test_line_search_non_finite(self):
        solver = FWSolver(self.scalar_problem)
        state = FwState(dict(), np.zeros(1), S=float('nan'))

        with self.assertRaises(NumericError) as context:
            solver.line_search(state, 0, 1.0, -1.0)

        self.assertIn('S', context.exception.state)

    def test_apply_step(self):
        solver = FWSolver(self.identity_problem)
        state = solver.initial_state()
        index, signed_delta, g = solver.select_vertex(state, None, self.ctr)

        self.assertEqual(solver.apply_step(state, index, signed_delta, 0.0, g, self.ctr), 0.0)
        self.assertEqual(state.k, 1)
        self.assertEqual(state.alpha, {})

        change = solver.apply_step(state, index, signed_delta, 1.0, g, self.ctr)
        self.assertEqual(change, 2.0)
        self.assertEqual(state.alpha, {1: -2.0})
        np.testing.assert_array_equal(state.p_vec, [0.0, -2.0, 0.0])
        self.assertEqual(state.S, 4.0)
        self.assertEqual(state.F, 10.0)
        self.assertEqual(state.k, 2)
        self.assertEqual(self.ctr.axpy_ops, 1)

    def test_scalar_problem(self):
        solution, _ = FWSolver(self.scalar_problem).solve()

        self.assertEqual(solution.alpha, {0: 1.0})
        self.assertEqual(solution.objective, 0.0)
        self.assertEqual(solution.stop_reason, StopReason.STATIONARY)

    def test_zero_response(self):
        solution, _ = FWSolver(make_problem(np.eye(3), [0.0, 0.0, 0.0], 1.0)).solve()

        self.assertEqual(solution.alpha, {})
        self.assertEqual(solution.iterations, 1)
        self.assertEqual(solution.stop_reason, StopReason.STATIONARY)

    def test_duality_gap(self):
        solver = FWSolver(self.identity_problem)
        self.assertEqual(solver.duality_gap(solver.initial_state(), self.ctr), 10.0)
        self.assertEqual(self.ctr.dot_products, 3)

        solver = FWSolver(self.scalar_problem)
        self.assertEqual(solver.duality_gap(solver.initial_state({0: 1.0}), self.ctr), 0.0)

    def test_interior_optimum_reaches_least_squares(self):
        rng = make_rng(5)
        Q, _ = np.linalg.qr(rng.standard_normal((20, 5)))
        y = Q @ np.array([1.0, -2.0, 0.5, 0.0, 3.0]) + 0.1 * rng.standard_normal(20)
        alpha_ls = Q.T @ y
        f_ls = 0.5 * float(np.sum((y - Q @ alpha_ls) ** 2))

        problem = make_problem(Q, y, 5.0 * float(np.sum(np.abs(alpha_ls))))
        options = FwOptions(epsilon=1e-9, max_iter=200000, stop_on_gap=True)
        solution, _ = FWSolver(problem, options).solve()

        self.assertLessEqual(solution.objective - f_ls, 1e-8)
        self.assertGreaterEqual(solution.objective, f_ls - 1e-10)

    def test_deterministic_rate_bound(self):
        bound = 4.0 * curvature_bound(self.random_problem)
        options = FwOptions(epsilon=1e-15, max_iter=300, trace_level=TraceLevel.ITERATION)
        _, trace = FWSolver(self.random_problem, options).solve()

        for row in trace.rows:
            self.assertLessEqual(row.nnz, row.k)
            if row.k >= 1:
                self.assertLessEqual(row.objective - self.f_star, bound / (row.k + 2) + 1e-9)

    def test_trace_monotone(self):
        options = FwOptions(epsilon=1e-15, max_iter=200, sampling=SamplingPlan.fixed(10),
                            trace_level=TraceLevel.ITERATION, stall_patience=200)
        solution, trace = FWSolver(self.random_problem, options).solve(seed=3)
        objectives = trace.objectives()

        self.assertEqual(trace.rows[0].k, 0)
        self.assertEqual(len(trace), solution.iterations + 1)
        self.assertTrue(np.all(np.diff(objectives) <= 1e-9 * (1.0 + abs(objectives[0]))))
        self.assertGreaterEqual(objectives[-1], self.f_star - 1e-9)

    def test_counters(self):
        options = FwOptions(epsilon=1e-15, max_iter=150, sampling=SamplingPlan.fixed(10), stall_patience=150,
                            trace_level=TraceLevel.ITERATION)
        solution, trace = FWSolver(self.random_problem, options).solve()
        costs = np.diff([row.dot_products for row in trace.rows])

        self.assertEqual(len(costs), solution.iterations)
        self.assertTrue(set(costs.tolist()) <= {10, self.random_problem.p})
        self.assertEqual(solution.counters.dot_products, int(np.sum(costs)))
        self.assertGreater(solution.diagnostic_counters.axpy_ops, 0)

        solution, _ = FWSolver(self.random_problem, FwOptions(max_iter=40)).solve()
        self.assertEqual(solution.counters.dot_products, self.random_problem.p * solution.iterations)

    def test_same_seed_same_run(self):
        options = FwOptions(epsilon=1e-6, max_iter=500, sampling=SamplingPlan.fraction_of_p(0.2))
        first, _ = FWSolver(self.random_problem, options).solve(seed=11)
        second, _ = FWSolver(self.random_problem, options).solve(seed=11)

        self.assertEqual(first.alpha, second.alpha)
        self.assertEqual(first.iterations, second.iterations)
        self.assertEqual(first.counters, second.counters)

    def test_recursive_objective_matches_direct(self):
        options = FwOptions(epsilon=1e-15, max_iter=1000, sampling=SamplingPlan.fixed(10), check_interval=100,
                            stall_patience=1000)
        solution, _ = FWSolver(self.random_problem, options).solve(seed=5)
        direct = self.random_problem.data.objective(solution.alpha)

        self.assertAlmostEqual(solution.objective, direct, delta=1e-8 * (1.0 + abs(direct)))
        self.assertLessEqual(solution.l1_norm, self.random_problem.delta * (1.0 + 1e-10))

    def test_audit_gap(self):
        options = FwOptions(epsilon=1e-15, max_iter=100, audit_gap=10, trace_level=TraceLevel.ITERATION)
        solution, trace = FWSolver(self.random_problem, options).solve()
        gaps = [row for row in trace.rows if row.gap is not None]

        self.assertTrue(gaps)
        for row in gaps:
            self.assertEqual(row.k % 10, 0)
            self.assertGreaterEqual(row.gap, row.objective - self.f_star - 1e-9)

        self.assertEqual(solution.counters.dot_products, self.random_problem.p * solution.iterations)

    def test_stall_patience(self):
        problem = make_problem([[1.0, 0.0]], [1.0], 1.0)
        options = FwOptions(sampling=SamplingPlan.fixed(1), stall_patience=50)
        solution, _ = FWSolver(problem, options).solve()

        self.assertEqual(solution.alpha, {0: 1.0})
        self.assertEqual(solution.stop_reason, StopReason.STATIONARY)

    def test_stall_searches_all_coordinates(self):
        y = np.zeros(50)
        y[0] = 5.0
        problem = make_problem(np.eye(50), y, 1.0)

        for seed in range(5):
            solution, _ = FWSolver(problem, FwOptions(sampling=SamplingPlan.fixed(1))).solve(seed=seed)

            self.assertEqual(solution.alpha, {0: 1.0}, seed)
            self.assertEqual(solution.stop_reason, StopReason.STATIONARY)
            self.assertAlmostEqual(solution.objective, 8.0, places=12)
            self.assertGreaterEqual(solution.counters.dot_products, solution.iterations + 49)

    def test_randomized_stop_is_confirmed(self):
        rng = make_rng(21)
        X = rng.standard_normal((30, 8))
        y = X @ rng.standard_normal(8) + 0.1 * rng.standard_normal(30)
        problem = make_problem(X, y, 5.0 * float(np.sum(np.abs(least_squares_reference(X, y)))))

        for seed in range(5):
            options = FwOptions(epsilon=1e-6, sampling=SamplingPlan.fixed(2), trace_level=TraceLevel.ITERATION)
            solution, trace = FWSolver(problem, options).solve(seed=seed)
            costs = np.diff([row.dot_products for row in trace.rows])

            self.assertIn(solution.stop_reason, (StopReason.TOLERANCE, StopReason.STATIONARY), seed)
            self.assertEqual(costs[-1], 8)
            self.assertTrue(set(costs.tolist()) <= {2, 8})

    def test_warm_start(self):
        solver = FWSolver(self.identity_problem)
        state = solver.initial_state({0: 0.5, 1: -1.0}, self.ctr)

        np.testing.assert_array_equal(state.p_vec, [0.5, -1.0, 0.0])
        self.assertEqual(state.S, 1.25)
        self.assertEqual(state.F, 6.5)
        self.assertEqual(self.ctr.axpy_ops, 2)
        solver.audit(state, self.ctr)

        with self.assertRaises(ContractViolation):
            solver.initial_state({0: 3.0})

        with self.assertRaises(ContractViolation):
            solver.initial_state({3: 1.0})

    def test_audit_detects_drift(self):
        solver = FWSolver(self.identity_problem)
        state = solver.initial_state({0: 0.5})
        state.S += 1.0

        with self.assertRaises(StateAuditError):
            solver.audit(state, self.ctr)

    def test_invalid_options(self):
        with self.assertRaises(ContractViolation):
            FwOptions(epsilon=0.0)

        with self.assertRaises(ContractViolation):
            FwOptions(max_iter=0)

        with self.assertRaises(ContractViolation):
            FWSolver(self.identity_problem, FwOptions(sampling=SamplingPlan.fixed(4))).solve()

    def test_curvature_bound(self):
        self.assertEqual(curvature_bound(self.identity_problem), 8.0)

    def test_matches_oracle_on_tiny_instances(self):
        for seed in range(20):
            X, y, delta = tiny_instance(seed, vertex_optimum=seed % 2 == 0)
            problem = make_problem(X, y, delta)
            f_star = solve_constrained_reference(X, y, delta).objective

            options = FwOptions(epsilon=1e-8, stop_on_gap=True, max_iter=500000)
            solution, _ = FWSolver(problem, options).solve()
            self.assertIn(solution.stop_reason, (StopReason.TOLERANCE, StopReason.STATIONARY), seed)
            self.assertAlmostEqual(solution.objective, f_star, delta=1e-6 * abs(f_star), msg=seed)

            alpha = solution.dense(5)
            lam = float(np.max(np.abs(X.T @ (X @ alpha - y))))
            cd = CDSolver(CdProblem(problem.data, lam), CdOptions(epsilon=1e-12, max_epochs=100000)).solve_penalized()
            self.assertAlmostEqual(cd.objective, f_star, delta=1e-6 * abs(f_star), msg=seed)

    def test_sampled_iterations_cost_sample_size(self):
        train, _, _ = generate_synthetic(SyntheticSpec(m_train=200, m_test=1, p=2000, n_informative=32, seed=7))
        train, _ = standardize(train)
        problem = FwProblem(LassoProblem.from_dataset(train), 5.0)

        options = FwOptions(epsilon=1e-12, max_iter=300, sampling=SamplingPlan.fixed(40), stall_patience=1000,
                            trace_level=TraceLevel.ITERATION)
        solution, trace = FWSolver(problem, options).solve()
        costs = np.diff([row.dot_products for row in trace.rows])

        self.assertEqual(len(costs), solution.iterations)
        self.assertTrue(set(costs.tolist()) <= {40, 2000})
        self.assertGreaterEqual(np.count_nonzero(costs == 40), 0.9 * len(costs))

    def test_sampling_saves_dot_products(self):
        rng = make_rng(5)
        base = rng.standard_normal((50, 4))
        y = base @ np.array([1.0, -1.0, 0.5, 2.0]) + 0.1 * rng.standard_normal(50)
        delta = 0.5 * float(np.sum(np.abs(least_squares_reference(base, y))))
        problem = make_problem(np.tile(base, (1, 500)), y, delta)

        deterministic, _ = FWSolver(problem, FwOptions(epsilon=1e-15, max_iter=200)).solve()
        options = FwOptions(epsilon=1e-15, max_iter=200, sampling=SamplingPlan.fixed(40), trace_level=TraceLevel.ITERATION)
        randomized, trace = FWSolver(problem, options).solve()

        self.assertEqual(deterministic.iterations, 200)
        self.assertAlmostEqual(randomized.objective, deterministic.objective, delta=1e-4 * deterministic.objective)
        self.assertGreaterEqual(deterministic.counters.dot_products, 10 * randomized.counters.dot_products)
        self.assertTrue(np.all(np.diff([row.dot_products for row in trace.rows]) == 40))


if __name__ == '__main__':
    unittest.main()
