import logging

from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np
from scipy import stats

from .CDSolver import CDSolver, CdOptions
from .FWSolver import FWSolver, FwOptions, curvature_bound
from .LassoProblem import CdProblem, FwProblem, LassoProblem
from .Oracle import least_squares_reference, solve_constrained_reference
from .PathDriver import lambda_max
from .Sampling import (DEFAULT_SEED, SamplingPlan, child_seed, draw_subset, exact_miss_probability, make_rng,
                       size_for_active_hit, size_for_top_fraction)
from .SparseColumnMatrix import SparseColumnMatrix
from .TraceLevel import TraceLevel
from .FWLassoErrors import FWLassoError

logger = logging.getLogger(__name__)

SUITE_NAMES = ('sampling', 'appendix', 'all')

# (p, s, kappa) triples checked by exhaustive enumeration.
ENUMERATION_CASES = ((10, 3, 3), (12, 2, 5), (15, 4, 4), (16, 1, 8), (20, 3, 6), (8, 8, 1), (9, 2, 7))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ''


@dataclass(frozen=True)
class VerifySettings:
    """
    Sizes of the verification runs.

    Attributes:
        seed (int): Master seed of every random instance and sample.
        instances (int): Random problem instances per rate or threshold check.
        rate_seeds (int): Independent randomized runs averaged per instance.
        draws (int): Monte Carlo draws of the sampling checks.
        max_iter (int): Iterations of the deterministic rate check.
    """

    seed: int = DEFAULT_SEED
    instances: int = 20
    rate_seeds: int = 50
    draws: int = 100000
    max_iter: int = 2000


def random_instance(seed: int, m: int = 40, p: int = 50, informative: int = 5, noise_sd: float = 0.1,
                    delta_factor: float = 0.7) -> tuple[FwProblem, np.ndarray]:
    """
    Seeded Gaussian regression instance with radius ``delta_factor * ||alpha_LS||_1``.

    Returns:
        tuple[FwProblem, np.ndarray]: The constrained problem and the least-squares coefficients.
    """
    rng = make_rng(seed)
    X = rng.standard_normal((m, p))
    coef = np.zeros(p)
    coef[rng.choice(p, size=min(informative, p), replace=False)] = rng.uniform(0.5, 1.5, size=min(informative, p))
    y = X @ coef + noise_sd * rng.standard_normal(m)

    alpha_ls = least_squares_reference(X, y)
    data = LassoProblem.build(SparseColumnMatrix(X), y)

    return FwProblem(data, delta_factor * float(np.sum(np.abs(alpha_ls)))), alpha_ls


def check_sampling_sizes(settings: VerifySettings) -> CheckResult:
    top = size_for_top_fraction(0.98, 0.02)
    active = size_for_active_hit(0.99, 123, 10000)

    return CheckResult('sampling sizes', top == 194 and active == 372,
                       f"top-fraction rule {top} (expected 194), active-set rule {active} (expected 372)")


def check_exact_enumeration(settings: VerifySettings) -> CheckResult:
    worst = 0.0
    for p, s, kappa in ENUMERATION_CASES:
        active = set(range(s))
        total = 0
        misses = 0
        for subset in combinations(range(p), kappa):
            total += 1
            misses += active.isdisjoint(subset)

        worst = max(worst, abs(misses / total - exact_miss_probability(s, p, kappa)))

    return CheckResult('miss probability by enumeration', worst <= 1e-12,
                       f"{len(ENUMERATION_CASES)} cases, largest error {worst:.2e}")


def check_uniformity(settings: VerifySettings, p: int = 6, kappa: int = 3) -> CheckResult:
    rng = make_rng(child_seed(settings.seed, 1))
    draws = max(1000, settings.draws // 5)
    cells = {subset: position for position, subset in enumerate(combinations(range(p), kappa))}
    counts = np.zeros(len(cells))
    for _ in range(draws):
        counts[cells[tuple(int(j) for j in draw_subset(p, kappa, rng))]] += 1

    result = stats.chisquare(counts)

    return CheckResult('subset uniformity (chi-square)', result.pvalue >= 1e-3,
                       f"{draws} draws over {len(cells)} subsets, statistic {result.statistic:.2f}, "
                       f"p-value {result.pvalue:.3g}")


def check_masked_mean(settings: VerifySettings, p: int = 10, kappa: int = 3) -> CheckResult:
    """
    Masking a fixed vector with a uniform kappa-subset gives ``kappa/p`` times the vector on average.
    """
    rng = make_rng(child_seed(settings.seed, 2))
    v = np.arange(1, p + 1, dtype=np.float64) * np.where(np.arange(p) % 2 == 0, 1.0, -1.0)

    total = np.zeros(p)
    total_sq = np.zeros(p)
    for _ in range(settings.draws):
        sample = draw_subset(p, kappa, rng)
        total[sample] += v[sample]
        total_sq[sample] += v[sample] ** 2

    n = settings.draws
    mean = total / n
    variance = (total_sq - n * mean ** 2) / (n - 1)
    standard_error = np.sqrt(variance / n)
    z = np.abs(mean - kappa / p * v) / standard_error

    return CheckResult('masked gradient is unbiased', bool(np.all(z <= 3.0)),
                       f"{n} draws, largest deviation {np.max(z):.2f} standard errors")


def _rate_instances(settings: VerifySettings):
    for index in range(settings.instances):
        problem, _ = random_instance(child_seed(settings.seed, 100 + index))
        reference = solve_constrained_reference(problem.X, problem.y, problem.delta, tol=1e-10)
        yield problem, reference.objective


def check_deterministic_rate(settings: VerifySettings) -> CheckResult:
    worst = 0.0
    violations = 0
    for problem, f_star in _rate_instances(settings):
        bound = 4.0 * curvature_bound(problem)
        options = FwOptions(epsilon=1e-15, max_iter=settings.max_iter, trace_level=TraceLevel.ITERATION)
        _, trace = FWSolver(problem, options).solve()

        slack = 1e-9 * (1.0 + abs(f_star))
        previous = np.inf
        for row in trace.rows:
            if row.objective > previous + slack or row.nnz > row.k:
                violations += 1

            previous = row.objective
            if row.k >= 1:
                ratio = (row.objective - f_star) / (bound / (row.k + 2))
                worst = max(worst, ratio)
                if row.objective - f_star > bound / (row.k + 2) + slack:
                    violations += 1

    return CheckResult('deterministic rate bound', violations == 0,
                       f"{settings.instances} instances, {violations} violations, largest h_k / bound {worst:.3g}")


def check_stochastic_rate(settings: VerifySettings, kappa: int = 10, checkpoints: tuple = (10, 50, 200)) -> CheckResult:
    worst = 0.0
    violations = 0
    horizon = max(checkpoints)
    for index, (problem, f_star) in enumerate(_rate_instances(settings)):
        bound = 4.0 * curvature_bound(problem)
        gaps = np.zeros((settings.rate_seeds, len(checkpoints)))
        for run in range(settings.rate_seeds):
            options = FwOptions(epsilon=1e-15, max_iter=horizon, sampling=SamplingPlan.fixed(kappa),
                                trace_level=TraceLevel.ITERATION, stall_patience=horizon)
            _, trace = FWSolver(problem, options).solve(seed=child_seed(settings.seed, 1000 * index + run))
            objectives = trace.objectives()
            for column, k in enumerate(checkpoints):
                gaps[run, column] = objectives[min(k, len(objectives) - 1)] - f_star

        for column, k in enumerate(checkpoints):
            mean_gap = float(np.mean(gaps[:, column]))
            worst = max(worst, mean_gap / (bound / (k + 2)))
            violations += mean_gap > bound / (k + 2)

    return CheckResult('stochastic rate bound', violations == 0,
                       f"kappa={kappa}, {settings.rate_seeds} runs per instance, {violations} violations, "
                       f"largest mean h_k / bound {worst:.3g}")


def check_gap_dominance(settings: VerifySettings, iterations: int = 250) -> CheckResult:
    audited = 0
    violations = 0
    instances = max(1, min(settings.instances, 2))
    for index in range(instances):
        problem, _ = random_instance(child_seed(settings.seed, 200 + index))
        f_star = solve_constrained_reference(problem.X, problem.y, problem.delta, tol=1e-10).objective
        slack = 1e-9 * (1.0 + abs(f_star))
        for plan in (SamplingPlan.full(), SamplingPlan.fixed(10)):
            options = FwOptions(epsilon=1e-15, max_iter=iterations, sampling=plan, audit_gap=1,
                                trace_level=TraceLevel.ITERATION, stall_patience=iterations)
            _, trace = FWSolver(problem, options).solve(seed=child_seed(settings.seed, 300 + index))
            for row in trace.rows:
                if row.gap is None:
                    continue

                audited += 1
                violations += row.gap < row.objective - f_star - slack

    return CheckResult('duality gap bounds the primal gap', violations == 0 and audited > 0,
                       f"{audited} audited iterates, {violations} violations")


def check_recursion_fidelity(settings: VerifySettings, iterations: int = 1000) -> CheckResult:
    problem, _ = random_instance(child_seed(settings.seed, 400), delta_factor=0.5)
    options = FwOptions(epsilon=1e-15, max_iter=iterations, sampling=SamplingPlan.fixed(10), check_interval=100,
                        stall_patience=iterations)
    try:
        solution, _ = FWSolver(problem, options).solve(seed=child_seed(settings.seed, 401))
    except FWLassoError as e:
        return CheckResult('recursive objective matches direct', False, str(e))

    direct = problem.data.objective(solution.alpha)
    error = abs(solution.objective - direct)

    return CheckResult('recursive objective matches direct', error <= 1e-8 * (1.0 + abs(direct)),
                       f"{solution.iterations} iterations audited every 100, final error {error:.2e}")


def check_null_threshold(settings: VerifySettings) -> CheckResult:
    nonzero = 0
    for index in range(settings.instances):
        problem, _ = random_instance(child_seed(settings.seed, 500 + index), m=30, p=40)
        lam = 1.000001 * lambda_max(problem.data)
        solution = CDSolver(CdProblem(problem.data, lam), CdOptions(epsilon=1e-10)).solve_penalized()
        nonzero += solution.nnz > 0

    return CheckResult('zero solution above lambda_max', nonzero == 0,
                       f"{settings.instances} instances, {nonzero} with nonzero coefficients")


SUITES: dict[str, tuple[Callable[[VerifySettings], CheckResult], ...]] = {
    'sampling': (check_sampling_sizes, check_exact_enumeration, check_uniformity, check_masked_mean),
    'appendix': (check_masked_mean, check_deterministic_rate, check_stochastic_rate, check_gap_dominance,
                 check_recursion_fidelity, check_null_threshold),
}


def run_suite(name: str, settings: VerifySettings = VerifySettings()) -> list[CheckResult]:
    """
    Run a verification suite.

    Args:
        name (str): ``sampling``, ``appendix`` or ``all``.
        settings (VerifySettings, optional): Run sizes and seed.

    Returns:
        list[CheckResult]: One result per check; a check that raises is reported as failed.

    Raises:
        ValueError: If the suite name is unknown.
    """
    if name not in SUITE_NAMES:
        raise ValueError(f"Invalid suite: {name}")

    checks = []
    for suite in (('sampling', 'appendix') if name == 'all' else (name,)):
        checks.extend(check for check in SUITES[suite] if check not in checks)

    results = []
    for check in checks:
        try:
            result = check(settings)
        except FWLassoError as e:
            result = CheckResult(check.__name__.replace('check_', '').replace('_', ' '), False,
                                 f"{type(e).__name__}: {e}")

        logger.info("%s: %s (%s)", result.name, 'PASS' if result.passed else 'FAIL', result.detail)
        results.append(result)

    return results


def format_table(results: list[CheckResult]) -> str:
    """
    Render results as an aligned pass/fail table.
    """
    width = max([len('check')] + [len(result.name) for result in results])
    lines = [f"{'check':<{width}}  result  detail"]
    for result in results:
        lines.append(f"{result.name:<{width}}  {'PASS' if result.passed else 'FAIL':<6}  {result.detail}")

    passed = sum(result.passed for result in results)
    lines.append(f"{passed}/{len(results)} checks passed")

    return '\n'.join(lines) + '\n'
