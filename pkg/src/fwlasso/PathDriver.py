import csv
import json
import time
import logging

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import TextIO, Union

import numpy as np

from .CDOrder import CDOrder
from .CDSolver import CDSolver, CdOptions
from .Dataset import Dataset
from .FWSolver import FWSolver, FwOptions
from .LassoProblem import CdProblem, FwProblem, LassoProblem
from .Sampling import DEFAULT_SEED, child_seed
from .SolverType import SolverType
from .FWLassoErrors import ContractViolation, DegenerateProblemError, DimensionError, FWLassoError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

CSV_COLUMNS = ['index', 'param', 'nnz', 'l1_norm', 'objective', 'train_mse', 'test_mse',
               'iterations', 'dot_products', 'wall_time', 'stop_reason', 'seed', 'error']


@dataclass(frozen=True)
class GridSpec:
    """
    Geometric regularization grid.

    Attributes:
        points (int): Number of grid values, at least 2.
        ratio (float): Largest over smallest value, above 1.
    """

    points: int = 100
    ratio: float = 100.0

    def __post_init__(self) -> None:
        if self.points < 2:
            raise ContractViolation(f"A grid needs at least 2 points, got {self.points}")

        if not self.ratio > 1:
            raise ContractViolation(f"Grid ratio must exceed 1, got {self.ratio}")

    def to_dict(self) -> dict:
        return {'points': self.points, 'ratio': self.ratio, 'scale': 'log'}


@dataclass
class PathPoint:
    """
    Outcome of the solve at one grid value. ``error`` is set, and the metrics are empty, when the solve failed.

    ``train_mse`` is the training objective over m, ``0.5 * ||X alpha - y||^2 / m``, while ``test_mse`` is the
    plain mean squared error ``||X_test alpha - y_test||^2 / m_test``; the two differ by a factor of 2 on
    the same residuals.
    """

    index: int
    param: float
    seed: int
    alpha: dict = field(default_factory=dict)
    objective: Union[float, None] = None
    train_mse: Union[float, None] = None
    test_mse: Union[float, None] = None
    iterations: int = 0
    dot_products: int = 0
    wall_time: float = 0.0
    stop_reason: Union[str, None] = None
    error: Union[str, None] = None

    @property
    def nnz(self) -> int:
        return len(self.alpha)

    @property
    def l1_norm(self) -> float:
        return float(sum(abs(value) for value in self.alpha.values()))

    @property
    def failed(self) -> bool:
        return self.error is not None

    def to_record(self) -> list:
        return [self.index, repr(float(self.param)), self.nnz, repr(float(self.l1_norm)), _fmt(self.objective),
                _fmt(self.train_mse), _fmt(self.test_mse), self.iterations, self.dot_products,
                f"{self.wall_time:.6f}", self.stop_reason or '', self.seed, self.error or '']

    def to_dict(self) -> dict:
        return {
            'index': self.index,
            'param': self.param,
            'seed': self.seed,
            'nnz': self.nnz,
            'l1_norm': self.l1_norm,
            'objective': self.objective,
            'train_mse': self.train_mse,
            'test_mse': self.test_mse,
            'iterations': self.iterations,
            'dot_products': self.dot_products,
            'wall_time': self.wall_time,
            'stop_reason': self.stop_reason,
            'error': self.error,
            'alpha': {str(j): value for j, value in sorted(self.alpha.items())},
        }


def _fmt(value: Union[float, None]) -> str:
    return '' if value is None else repr(float(value))


@dataclass
class PathResult:
    """
    A regularization path: one :class:`PathPoint` per grid value, in grid order.

    Attributes:
        solver (SolverType): Solver family of the sweep.
        points (list[PathPoint]): Per-point records.
        parallel_cold (bool): Points were solved independently from zero starts.
        config (dict): Resolved run configuration embedded in serialized output.
    """

    solver: SolverType
    points: list[PathPoint] = field(default_factory=list)
    parallel_cold: bool = False
    config: dict = field(default_factory=dict)

    @property
    def partial(self) -> bool:
        return any(point.failed for point in self.points)

    @property
    def params(self) -> np.ndarray:
        return np.array([point.param for point in self.points])

    def _solved(self) -> list[PathPoint]:
        return [point for point in self.points if not point.failed]

    @property
    def mean_nnz(self) -> float:
        solved = self._solved()
        return float(np.mean([point.nnz for point in solved])) if solved else 0.0

    @property
    def total_time(self) -> float:
        return float(sum(point.wall_time for point in self.points))

    @property
    def total_iterations(self) -> int:
        return sum(point.iterations for point in self.points)

    @property
    def total_dot_products(self) -> int:
        return sum(point.dot_products for point in self.points)

    def aggregates(self) -> dict:
        return {
            'mean_nnz': self.mean_nnz,
            'total_time': self.total_time,
            'total_iterations': self.total_iterations,
            'total_dot_products': self.total_dot_products,
        }

    def best_index(self) -> Union[int, None]:
        """
        Position of the point with the smallest test MSE, or None without test data.
        """
        scored = [(point.test_mse, i) for i, point in enumerate(self.points) if point.test_mse is not None]

        return min(scored)[1] if scored else None

    def _header(self) -> dict:
        return {
            'schema': SCHEMA_VERSION,
            'solver': str(self.solver),
            'parallel_cold': self.parallel_cold,
            'partial': self.partial,
            'config': self.config,
        }

    def to_csv(self, text_stream: TextIO) -> None:
        """
        Write one row per grid point, preceded by ``#`` header lines with the schema and run config.
        """
        header = self._header()
        text_stream.write(f"# schema: {SCHEMA_VERSION}\n")
        text_stream.write(f"# run: {json.dumps({k: v for k, v in header.items() if k != 'schema'}, sort_keys=True)}\n")
        if self.parallel_cold:
            text_stream.write("# parallel-cold: grid points solved independently from zero, no warm starts\n")

        writer = csv.writer(text_stream, lineterminator='\n')
        writer.writerow(CSV_COLUMNS)
        for point in self.points:
            writer.writerow(point.to_record())

    def to_dict(self) -> dict:
        description = self._header()
        description['aggregates'] = self.aggregates()
        description['points'] = [point.to_dict() for point in self.points]

        return description

    def to_json(self, text_stream: TextIO) -> None:
        json.dump(self.to_dict(), text_stream, indent=2)
        text_stream.write('\n')


def lambda_max(problem: LassoProblem) -> float:
    """
    Smallest penalty whose penalized solution is exactly zero: ``||X^T y||_inf``.

    Raises:
        DegenerateProblemError: If ``X^T y`` is zero.
    """
    value = float(np.max(np.abs(problem.sigma), initial=0.0))
    if value == 0.0:
        raise DegenerateProblemError("X^T y is zero: every Lasso solution is the zero vector")

    return value


def build_grid(max_value: float, spec: GridSpec, descending: bool = False) -> np.ndarray:
    """
    Geometric grid from ``max_value / spec.ratio`` to ``max_value``, endpoints included.

    Args:
        max_value (float): Largest grid value, positive.
        spec (GridSpec): Number of points and ratio.
        descending (bool, optional): Return the values largest first (penalty grids). Defaults to False.

    Returns:
        np.ndarray: The grid.
    """
    if not max_value > 0:
        raise ContractViolation(f"Grid maximum must be positive, got {max_value}")

    grid = np.geomspace(max_value / spec.ratio, max_value, spec.points)

    return grid[::-1].copy() if descending else grid


def bootstrap_delta_max(problem: LassoProblem, eps_ref: float = 1e-8, ratio: float = 100.0,
                        max_epochs: int = 100000) -> float:
    """
    Largest radius of a constrained grid: ``||alpha_min||_1`` of a tight coordinate descent solve at
    ``lambda_max / ratio``.
    """
    lam_min = lambda_max(problem) / ratio
    solution = CDSolver(CdProblem(problem, lam_min), CdOptions(epsilon=eps_ref, max_epochs=max_epochs)).solve_penalized()
    logger.info("delta_max = %.6g from CD at lambda_min = %.6g (%d epochs)", solution.l1_norm, lam_min, solution.iterations)

    return solution.l1_norm


def _check_grid(grid: np.ndarray, solver: SolverType) -> None:
    if len(grid) == 0:
        raise ContractViolation("Grid must not be empty")

    if np.any(grid < 0) or not np.all(np.isfinite(grid)):
        raise ContractViolation("Grid values must be finite and non-negative")

    steps = np.diff(grid)
    if solver.is_constrained and np.any(steps <= 0):
        raise ContractViolation("FW grids must be strictly ascending in delta")

    if not solver.is_constrained and np.any(steps >= 0):
        raise ContractViolation("CD grids must be strictly descending in lambda")


class _PointSolver:
    """
    Solves single grid points of a path and measures them.
    """

    def __init__(self, problem: LassoProblem, solver: SolverType, options, test_set: Union[Dataset, None]) -> None:
        self.problem = problem
        self.solver = solver
        self.options = options
        self.test_set = test_set


    def solve(self, index: int, param: float, seed: int, warm_start: Union[dict, None]) -> PathPoint:
        point = PathPoint(index, float(param), seed)
        started = time.perf_counter()
        try:
            if self.solver is SolverType.FW:
                solution, _ = FWSolver(FwProblem(self.problem, float(param)), self.options).solve(warm_start, seed=seed)
            else:
                options = replace(self.options, seed=seed)
                if self.solver is SolverType.SCD:
                    options = replace(options, order=CDOrder.IID_UNIFORM)

                solution = CDSolver(CdProblem(self.problem, float(param)), options).solve_penalized(warm_start)
        except FWLassoError as e:
            point.wall_time = time.perf_counter() - started
            point.error = f"{type(e).__name__}: {e}"
            logger.error("Path point %d (%s=%g) failed: %s", index, self._param_name(), param, point.error)
            return point

        point.wall_time = time.perf_counter() - started
        point.alpha = solution.alpha
        point.objective = solution.objective
        point.train_mse = solution.objective / self.problem.m
        point.iterations = solution.iterations
        point.dot_products = solution.counters.dot_products
        point.stop_reason = str(solution.stop_reason)

        if self.test_set is not None:
            residual = self.test_set.X.matvec(solution.alpha) - self.test_set.y
            point.test_mse = float(residual @ residual) / self.test_set.m

        logger.info("Point %d: %s=%.6g nnz=%d iterations=%d dot products=%d",
                    index, self._param_name(), param, point.nnz, point.iterations, point.dot_products)

        return point


    def _param_name(self) -> str:
        return 'delta' if self.solver.is_constrained else 'lambda'


def run_path(problem: LassoProblem, solver: SolverType, grid: np.ndarray,
             options: Union[FwOptions, CdOptions, None] = None, test_set: Union[Dataset, None] = None,
             seed: int = DEFAULT_SEED, parallel_cold: bool = False, max_workers: Union[int, None] = None,
             config: Union[dict, None] = None) -> PathResult:
    """
    Solve the problem along a regularization grid.

    Point 0 starts from zero. Later points are warm-started from the previous solution: for FW the
    previous coefficients are scaled to l1 norm equal to the new radius (a zero solution stays
    zero); CD and SCD reuse it as is. Every point draws its randomness from the child seed
    ``child_seed(seed, index)``. A point whose solver fails is recorded with its error, the
    sweep goes on from the last good solution and the result is marked partial.

    Args:
        problem (LassoProblem): Shared problem data.
        solver (SolverType): FW (radius grid, ascending) or CD/SCD (penalty grid, descending).
        grid (np.ndarray): Grid values.
        options (Union[FwOptions, CdOptions, None], optional): Options of every point solve.
        test_set (Dataset, optional): Held-out data, already standardized like the training data.
        seed (int, optional): Master seed. Defaults to ``DEFAULT_SEED``.
        parallel_cold (bool, optional): Solve the points independently from zero starts on a thread
            pool instead of warm-starting them in sequence. Defaults to False.
        max_workers (int, optional): Thread pool size for ``parallel_cold``.
        config (dict, optional): Run configuration to embed in the result.

    Returns:
        PathResult: Per-point records and aggregates.

    Raises:
        ContractViolation: If the grid is not ordered for the solver family or options do not match it.
        DimensionError: If the test set has a different number of features.
    """
    grid = np.asarray(grid, dtype=np.float64)
    _check_grid(grid, solver)

    if options is None:
        options = FwOptions() if solver.is_constrained else CdOptions()

    if solver.is_constrained != isinstance(options, FwOptions):
        raise ContractViolation(f"{type(options).__name__} does not match solver {solver}")

    if test_set is not None and test_set.p != problem.p:
        raise DimensionError(f"Test set has {test_set.p} features, training data has {problem.p}")

    point_solver = _PointSolver(problem, solver, options, test_set)
    seeds = [child_seed(seed, index) for index in range(len(grid))]
    result = PathResult(solver, parallel_cold=parallel_cold, config=dict(config or {}))
    result.config.setdefault('child_seeds', seeds)

    if parallel_cold:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            result.points = list(executor.map(lambda i: point_solver.solve(i, grid[i], seeds[i], None), range(len(grid))))
    else:
        previous = dict()
        for index, param in enumerate(grid):
            point = point_solver.solve(index, param, seeds[index], _warm_start(previous, param, solver))
            result.points.append(point)
            if not point.failed:
                previous = point.alpha

    if result.partial:
        logger.warning("Path is partial: %d of %d points failed", sum(p.failed for p in result.points), len(grid))

    return result


def _warm_start(previous: dict, param: float, solver: SolverType) -> Union[dict, None]:
    if not previous:
        return None

    if not solver.is_constrained:
        return previous

    l1_norm = sum(abs(value) for value in previous.values())
    factor = param / l1_norm

    return {j: value * factor for j, value in previous.items()}


def relevant_features(path: PathResult, count: int = 10) -> list[int]:
    """
    Features with the largest mean absolute coefficient along the path, most relevant first.

    Features that are zero at every point are never returned.
    """
    totals = dict()
    solved = [point for point in path.points if not point.failed]
    for point in solved:
        for j, value in point.alpha.items():
            totals[j] = totals.get(j, 0.0) + abs(value)

    ranked = sorted(totals.items(), key=lambda item: (-item[1], item[0]))

    return [j for j, _ in ranked[:count]]


def feature_trajectories(path: PathResult, indices: list[int]) -> np.ndarray:
    """
    Coefficient values of the given features along the path, one row per grid point.
    """
    trajectories = np.zeros((len(path.points), len(indices)))
    for row, point in enumerate(path.points):
        for column, j in enumerate(indices):
            trajectories[row, column] = point.alpha.get(j, 0.0)

    return trajectories
