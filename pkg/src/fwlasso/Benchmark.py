import csv
import json
import logging

from dataclasses import dataclass, field
from typing import TextIO, Union

import numpy as np

from .CDSolver import CdOptions
from .Dataset import Dataset
from .FWSolver import FwOptions
from .LassoProblem import LassoProblem
from .PathDriver import GridSpec, PathResult, bootstrap_delta_max, build_grid, lambda_max, run_path
from .Sampling import DEFAULT_SEED, SamplingPlan, child_seed
from .SolverType import SolverType
from .FWLassoErrors import ContractViolation

logger = logging.getLogger(__name__)

METRICS = ('time', 'iterations', 'dot_products', 'active_features')

METRIC_LABELS = {
    'time': 'Time (s)',
    'iterations': 'Iterations',
    'dot_products': 'Dot products',
    'active_features': 'Active features',
}


@dataclass(frozen=True)
class BenchConfig:
    """
    What ``bench`` runs on a dataset.

    Attributes:
        solvers (tuple[SolverType, ...]): Solver families to compare.
        sample_fractions (tuple[float, ...]): One FW configuration per fraction of p sampled per iteration.
        grid (GridSpec): Path grid shared by every configuration.
        epsilon (float): Stopping tolerance of every solve.
        max_iter (int): Per-point FW iteration cap, also the CD epoch cap.
        repeats (int): Runs per configuration; the metrics are averaged.
        seed (int): Master seed; repeat r uses ``child_seed(seed, r)``.
    """

    solvers: tuple = (SolverType.FW, SolverType.CD)
    sample_fractions: tuple = (0.01, 0.02, 0.03)
    grid: GridSpec = field(default_factory=GridSpec)
    epsilon: float = 1e-3
    max_iter: int = 10000
    repeats: int = 1
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if not self.solvers:
            raise ContractViolation("bench needs at least one solver")

        if self.repeats < 1:
            raise ContractViolation(f"repeats must be at least 1, got {self.repeats}")

        if any(not 0.0 < fraction <= 1.0 for fraction in self.sample_fractions):
            raise ContractViolation("sample fractions must lie in (0, 1]")

    def to_dict(self) -> dict:
        return {
            'solvers': [str(solver) for solver in self.solvers],
            'sample_fractions': list(self.sample_fractions),
            'grid': self.grid.to_dict(),
            'epsilon': self.epsilon,
            'max_iter': self.max_iter,
            'repeats': self.repeats,
            'seed': self.seed,
        }


@dataclass
class BenchColumn:
    """
    Averaged path metrics of one solver configuration.
    """

    label: str
    solver: SolverType
    kappa: Union[int, None]
    time: float
    iterations: float
    dot_products: float
    active_features: float

    def to_dict(self) -> dict:
        return {
            'label': self.label,
            'solver': str(self.solver),
            'kappa': self.kappa,
            'time': self.time,
            'iterations': self.iterations,
            'dot_products': self.dot_products,
            'active_features': self.active_features,
        }


@dataclass
class BenchReport:
    """
    Per-configuration comparison table, with speed-ups relative to cyclic coordinate descent.
    """

    columns: list[BenchColumn]
    config: dict = field(default_factory=dict)

    def column(self, label: str) -> BenchColumn:
        for column in self.columns:
            if column.label == label:
                return column

        raise KeyError(label)

    def speedups(self) -> dict:
        """
        ``{label: {'time': x, 'dot_products': y}}`` relative to the CD column; empty without CD.
        """
        baseline = next((column for column in self.columns if column.solver is SolverType.CD), None)
        if baseline is None:
            return dict()

        ratios = dict()
        for column in self.columns:
            ratios[column.label] = {
                'time': baseline.time / column.time if column.time > 0 else None,
                'dot_products': baseline.dot_products / column.dot_products if column.dot_products > 0 else None,
            }

        return ratios

    def to_text(self) -> str:
        labels = [column.label for column in self.columns]
        width = max([12] + [len(label) + 2 for label in labels])
        lines = [f"{'':<18}" + ''.join(f"{label:>{width}}" for label in labels)]

        for metric in METRICS:
            cells = []
            for column in self.columns:
                value = getattr(column, metric)
                cells.append(f"{value:>{width}.2f}" if metric == 'time' else f"{value:>{width},.1f}")
            lines.append(f"{METRIC_LABELS[metric]:<18}" + ''.join(cells))

        lines.append(f"{'Sample size':<18}" + ''.join(f"{column.kappa if column.kappa else '-':>{width}}" for column in self.columns))

        speedups = self.speedups()
        if speedups:
            lines.append(f"{'Speed-up (time)':<18}" + ''.join(_ratio_cell(speedups[label]['time'], width) for label in labels))
            lines.append(f"{'Speed-up (dots)':<18}" + ''.join(_ratio_cell(speedups[label]['dot_products'], width) for label in labels))

        return '\n'.join(lines) + '\n'

    def to_csv(self, text_stream: TextIO) -> None:
        text_stream.write(f"# run: {json.dumps(self.config, sort_keys=True)}\n")
        writer = csv.writer(text_stream, lineterminator='\n')
        writer.writerow(['label', 'solver', 'kappa'] + list(METRICS))
        for column in self.columns:
            writer.writerow([column.label, str(column.solver), column.kappa if column.kappa else '']
                            + [repr(float(getattr(column, metric))) for metric in METRICS])

    def to_dict(self) -> dict:
        return {
            'schema': 1,
            'config': self.config,
            'columns': [column.to_dict() for column in self.columns],
            'speedups': self.speedups(),
        }

    def to_json(self, text_stream: TextIO) -> None:
        json.dump(self.to_dict(), text_stream, indent=2)
        text_stream.write('\n')


def _ratio_cell(value: Union[float, None], width: int) -> str:
    return f"{'-':>{width}}" if value is None else f"{value:>{width - 1}.2f}x"


def _average(label: str, solver: SolverType, kappa: Union[int, None], paths: list[PathResult]) -> BenchColumn:
    return BenchColumn(
        label, solver, kappa,
        time=float(np.mean([path.total_time for path in paths])),
        iterations=float(np.mean([path.total_iterations for path in paths])),
        dot_products=float(np.mean([path.total_dot_products for path in paths])),
        active_features=float(np.mean([path.mean_nnz for path in paths])),
    )


def bench(data: Union[Dataset, LassoProblem], config: Union[BenchConfig, None] = None) -> BenchReport:
    """
    Run full warm-started paths for every configured solver and tabulate their cost.

    FW runs once per sample fraction over a radius grid topped by :func:`bootstrap_delta_max`;
    CD and SCD run over the penalty grid topped by ``lambda_max``.

    Args:
        data (Union[Dataset, LassoProblem]): Standardized training data.
        config (BenchConfig, optional): What to run. Defaults to ``BenchConfig()``.

    Returns:
        BenchReport: One column per configuration.
    """
    config = BenchConfig() if config is None else config
    problem = data if isinstance(data, LassoProblem) else LassoProblem.from_dataset(data)
    p = problem.p

    lambda_grid = build_grid(lambda_max(problem), config.grid, descending=True)
    delta_grid = None
    if SolverType.FW in config.solvers:
        delta_grid = build_grid(bootstrap_delta_max(problem, ratio=config.grid.ratio), config.grid)

    repeat_seeds = [child_seed(config.seed, repeat) for repeat in range(config.repeats)]
    columns = []
    resolved = dict()
    for solver in config.solvers:
        if solver is SolverType.FW:
            for fraction in config.sample_fractions:
                plan = SamplingPlan.fraction_of_p(fraction, seed=config.seed)
                kappa = plan.resolve(p)
                options = FwOptions(epsilon=config.epsilon, max_iter=config.max_iter, sampling=plan)
                label = f"FW {fraction * 100:g}%"
                logger.info("Benchmarking %s (kappa=%d)", label, kappa)
                paths = [run_path(problem, solver, delta_grid, options, seed=seed) for seed in repeat_seeds]
                columns.append(_average(label, solver, kappa, paths))
                resolved[label] = {'kappa': kappa}
        else:
            options = CdOptions(epsilon=config.epsilon, max_epochs=config.max_iter)
            label = str(solver).upper()
            logger.info("Benchmarking %s", label)
            paths = [run_path(problem, solver, lambda_grid, options, seed=seed) for seed in repeat_seeds]
            columns.append(_average(label, solver, None, paths))

    report_config = config.to_dict()
    report_config.update({'p': p, 'm': problem.m, 'repeat_seeds': repeat_seeds, 'resolved': resolved})

    return BenchReport(columns, report_config)
