import sys
import json
import logging
import argparse

from contextlib import nullcontext
from dataclasses import asdict, dataclass, field
from typing import Union

from . import __version__
from .Benchmark import BenchConfig, bench
from .CDOrder import CDOrder
from .CDSolver import CDSolver, CdOptions
from .DataReader import SUPPORTED_FORMATS, load_dataset, serialize_libsvm
from .Dataset import Dataset, SyntheticSpec, apply_standardization, expand_product_features, generate_synthetic, standardize
from .FWSolver import FWSolver, FwOptions
from .LassoProblem import CdProblem, FwProblem, LassoProblem
from .PathDriver import GridSpec, bootstrap_delta_max, build_grid, lambda_max, run_path
from .Sampling import DEFAULT_SEED, SamplingPlan, random_seed
from .SolverType import SolverType
from .StandardizationMode import StandardizationMode
from .Solution import Trace
from .TraceLevel import TraceLevel
from .Verify import SUITE_NAMES, VerifySettings, format_table, run_suite
from .FWLassoErrors import ContractViolation, DataError, SolverError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SOLVER = 3

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


class UsageError(Exception):
    """
    Invalid command line.
    """


class _ArgumentParser(argparse.ArgumentParser):

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    """
    Everything needed to reproduce a run: the parsed flags plus the values resolved while running
    (seed, dimensions, sample sizes). Serialized into the header of every output.
    """

    subcommand: str
    seed: int
    options: dict = field(default_factory=dict)
    resolved: dict = field(default_factory=dict)

    @classmethod
    def from_namespace(cls, args: argparse.Namespace) -> 'RunConfig':
        options = {key: _plain(value) for key, value in sorted(vars(args).items())
                   if key not in ('subcommand', 'seed', 'log_level') and value is not None}

        return cls(args.subcommand, args.seed, options)

    def to_dict(self) -> dict:
        return {
            'fwlasso': __version__,
            'subcommand': self.subcommand,
            'seed': self.seed,
            'options': self.options,
            'resolved': self.resolved,
        }


def _plain(value):
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]

    if isinstance(value, (bool, int, float, str)):
        return value

    return str(value)


def _seed(text: str) -> int:
    if text == 'random':
        return random_seed()

    try:
        seed = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer or 'random', got '{text}'") from None

    if seed < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {seed}")

    return seed


def _float_list(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got '{text}'") from None


def _solver_list(text: str) -> list[SolverType]:
    try:
        return [SolverType.from_str(item) for item in text.split(',') if item.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument('--log-level', choices=LOG_LEVELS, default='WARNING', help="Logging level on stderr")
    common.add_argument('--seed', type=_seed, default=DEFAULT_SEED,
                        help=f"Master seed, or 'random' (default {DEFAULT_SEED})")
    common.add_argument('--out', help="Output file (default stdout)")

    data = _ArgumentParser(add_help=False)
    data.add_argument('--data', required=True, help="Training data file")
    data.add_argument('--format', choices=SUPPORTED_FORMATS, default='libsvm', dest='fmt')
    data.add_argument('--num-features', type=int, help="Explicit number of features")
    data.add_argument('--standardize', choices=('unit', 'center', 'none'), default='unit')
    data.add_argument('--test-data', help="Held-out data in the same format, for test MSE")
    data.add_argument('--product-degree', type=int, help="Expand the features into all products up to this degree")

    solver = _ArgumentParser(add_help=False)
    solver.add_argument('--solver', choices=('fw', 'cd', 'scd'), default='fw')
    radius = solver.add_mutually_exclusive_group()
    radius.add_argument('--delta', type=float, help="l1 radius (fw)")
    radius.add_argument('--lambda', type=float, dest='lam', help="l1 penalty (cd, scd)")
    solver.add_argument('--epsilon', type=float, default=1e-3)
    solver.add_argument('--max-iter', type=int, default=10000, help="FW iterations or CD epochs")
    sampling = solver.add_mutually_exclusive_group()
    sampling.add_argument('--sample-size', type=int)
    sampling.add_argument('--sample-frac', type=float)
    sampling.add_argument('--sample-confidence', type=float)
    target = solver.add_mutually_exclusive_group()
    target.add_argument('--sample-top', type=float, help="Top fraction q for --sample-confidence")
    target.add_argument('--active-est', type=int, help="Active-set size s for --sample-confidence")
    solver.add_argument('--audit-gap', type=int, default=0, help="Record the duality gap every N iterations")
    solver.add_argument('--stop-on-gap', action='store_true', help="Stop on the duality gap instead of the coefficient change")
    solver.add_argument('--check-interval', type=int, default=100, help="Audit cached quantities every N iterations")
    solver.add_argument('--out-format', choices=('csv', 'json'), default='csv')

    parser = _ArgumentParser(prog='fwlasso', description="Randomized Frank-Wolfe and coordinate descent for the Lasso")
    parser.add_argument('--version', action='version', version=f"fwlasso {__version__}")
    subparsers = parser.add_subparsers(dest='subcommand', required=True, parser_class=_ArgumentParser)

    solve = subparsers.add_parser('solve', parents=[common, data, solver], help="Solve at one delta or lambda")
    solve.add_argument('--trace-out', help="Write the per-iteration trace CSV here")

    path = subparsers.add_parser('path', parents=[common, data, solver], help="Warm-started regularization path")
    path.add_argument('--grid-points', type=int, default=100)
    path.add_argument('--grid-ratio', type=float, default=100.0)
    path.add_argument('--parallel-cold', action='store_true', help="Solve grid points independently from zero starts")
    path.add_argument('--workers', type=int, help="Threads for --parallel-cold")

    synth = subparsers.add_parser('synth', parents=[common], help="Write a synthetic sparse regression dataset")
    synth.add_argument('--p', type=int, default=10000)
    synth.add_argument('--m', type=int, default=200, help="Training rows")
    synth.add_argument('--m-test', type=int, help="Test rows (default: --m)")
    synth.add_argument('--informative', type=int, default=32)
    synth.add_argument('--noise', type=float, default=1.0)
    synth.add_argument('--test-out', help="Write the test rows here")

    bench_parser = subparsers.add_parser('bench', parents=[common, data], help="Compare solvers over full paths")
    bench_parser.add_argument('--solvers', type=_solver_list, default=[SolverType.FW, SolverType.CD])
    bench_parser.add_argument('--sample-fracs', type=_float_list, default=[0.01, 0.02, 0.03])
    bench_parser.add_argument('--grid-points', type=int, default=100)
    bench_parser.add_argument('--grid-ratio', type=float, default=100.0)
    bench_parser.add_argument('--epsilon', type=float, default=1e-3)
    bench_parser.add_argument('--max-iter', type=int, default=10000)
    bench_parser.add_argument('--repeats', type=int, default=1)
    bench_parser.add_argument('--out-format', choices=('csv', 'json', 'text'), default='csv')

    verify = subparsers.add_parser('verify', parents=[common], help="Run the verification suites")
    verify.add_argument('--suite', choices=SUITE_NAMES, default='all')
    verify.add_argument('--instances', type=int, default=20)
    verify.add_argument('--rate-seeds', type=int, default=50)
    verify.add_argument('--draws', type=int, default=100000)

    return parser


def sampling_plan(args: argparse.Namespace) -> SamplingPlan:
    """
    Translate the sampling flags into a plan. No sampling flag means the full search.
    """
    if (args.sample_top is not None or args.active_est is not None) and args.sample_confidence is None:
        raise UsageError("--sample-top and --active-est require --sample-confidence")

    if args.sample_size is not None:
        return SamplingPlan.fixed(args.sample_size, seed=args.seed)

    if args.sample_frac is not None:
        return SamplingPlan.fraction_of_p(args.sample_frac, seed=args.seed)

    if args.sample_confidence is not None:
        if args.sample_top is not None:
            return SamplingPlan.confidence_top(args.sample_confidence, args.sample_top, seed=args.seed)

        return SamplingPlan.confidence_active(args.sample_confidence, args.active_est, seed=args.seed)

    return SamplingPlan.full(seed=args.seed)


def _output(path: Union[str, None]):
    if path is None or path == '-':
        return nullcontext(sys.stdout)

    return open(path, 'w', newline='')


def _load(args: argparse.Namespace, config: RunConfig) -> tuple[Dataset, Union[Dataset, None]]:
    train = load_dataset(args.data, args.fmt, args.num_features)
    test = load_dataset(args.test_data, args.fmt, args.num_features or train.p) if args.test_data else None

    if args.product_degree:
        train = expand_product_features(train, args.product_degree)
        test = expand_product_features(test, args.product_degree) if test is not None else None

    train, report = standardize(train, StandardizationMode.from_str(args.standardize))
    if test is not None:
        test = apply_standardization(test, report)

    config.resolved.update({'m': train.m, 'p': train.p, 'nnz': train.X.nnz, 'standardization': report.to_dict()})

    return train, test


def _write_header(stream, config: RunConfig) -> None:
    stream.write(f"# run: {json.dumps(config.to_dict(), sort_keys=True)}\n")


def _fw_options(args: argparse.Namespace, trace_level: TraceLevel = TraceLevel.SUMMARY) -> FwOptions:
    return FwOptions(epsilon=args.epsilon, max_iter=args.max_iter, sampling=sampling_plan(args),
                     check_interval=args.check_interval, trace_level=trace_level, audit_gap=args.audit_gap,
                     stop_on_gap=args.stop_on_gap)


def _cd_options(args: argparse.Namespace, solver: SolverType, trace_level: TraceLevel = TraceLevel.SUMMARY) -> CdOptions:
    order = CDOrder.IID_UNIFORM if solver is SolverType.SCD else CDOrder.CYCLIC
    return CdOptions(epsilon=args.epsilon, max_epochs=args.max_iter, order=order, seed=args.seed,
                     check_interval=args.check_interval, trace_level=trace_level)


def _check_solver_flags(args: argparse.Namespace, solver: SolverType) -> None:
    if solver.is_constrained:
        if args.lam is not None:
            raise UsageError("--lambda only applies to --solver cd or scd")

        sampling_plan(args)
        return

    for flag, value in (('--sample-size', args.sample_size), ('--sample-frac', args.sample_frac),
                        ('--sample-confidence', args.sample_confidence), ('--delta', args.delta)):
        if value is not None:
            raise UsageError(f"{flag} only applies to --solver fw")


def run_solve(args: argparse.Namespace, config: RunConfig) -> int:
    solver = SolverType.from_str(args.solver)
    _check_solver_flags(args, solver)
    if solver.is_constrained and args.delta is None:
        raise UsageError("--solver fw needs --delta")

    if not solver.is_constrained and args.lam is None:
        raise UsageError(f"--solver {solver} needs --lambda")

    train, _ = _load(args, config)
    problem = LassoProblem.from_dataset(train)
    trace_level = TraceLevel.ITERATION if args.trace_out else TraceLevel.SUMMARY
    trace = Trace()

    if solver.is_constrained:
        options = _fw_options(args, trace_level)
        config.resolved['sampling'] = options.sampling.to_dict(problem.p)
        solution, trace = FWSolver(FwProblem(problem, args.delta), options).solve()
    else:
        solution = CDSolver(CdProblem(problem, args.lam), _cd_options(args, solver, trace_level)).solve_penalized(trace=trace)

    names = train.feature_names
    with _output(args.out) as stream:
        if args.out_format == 'json':
            json.dump({'schema': 1, 'config': config.to_dict(), 'solution': solution.to_dict()}, stream, indent=2)
            stream.write('\n')
        else:
            _write_header(stream, config)
            summary = {key: value for key, value in solution.to_dict().items() if key != 'alpha'}
            stream.write(f"# solution: {json.dumps(summary, sort_keys=True)}\n")
            stream.write("index,feature,coefficient\n")
            for j, value in sorted(solution.alpha.items()):
                stream.write(f"{j},{names[j] if names else j + 1},{value!r}\n")

    if args.trace_out:
        with open(args.trace_out, 'w', newline='') as stream:
            trace.to_csv(stream)

    return EXIT_OK


def run_path_command(args: argparse.Namespace, config: RunConfig) -> int:
    solver = SolverType.from_str(args.solver)
    _check_solver_flags(args, solver)
    grid_spec = GridSpec(args.grid_points, args.grid_ratio)

    train, test = _load(args, config)
    problem = LassoProblem.from_dataset(train)

    if solver.is_constrained:
        options = _fw_options(args)
        top = args.delta if args.delta is not None else bootstrap_delta_max(problem, ratio=grid_spec.ratio)
        grid = build_grid(top, grid_spec)
        config.resolved['sampling'] = options.sampling.to_dict(problem.p)
        config.resolved['delta_max'] = top
    else:
        options = _cd_options(args, solver)
        top = args.lam if args.lam is not None else lambda_max(problem)
        grid = build_grid(top, grid_spec, descending=True)
        config.resolved['lambda_max'] = top

    result = run_path(problem, solver, grid, options, test_set=test, seed=args.seed,
                      parallel_cold=args.parallel_cold, max_workers=args.workers, config=config.to_dict())

    with _output(args.out) as stream:
        if args.out_format == 'json':
            result.to_json(stream)
        else:
            result.to_csv(stream)

    if result.partial:
        logger.error("Path finished with failed points")
        return EXIT_SOLVER

    return EXIT_OK


def run_synth(args: argparse.Namespace, config: RunConfig) -> int:
    spec = SyntheticSpec(m_train=args.m, m_test=args.m_test or args.m, p=args.p, n_informative=args.informative,
                         noise_sd=args.noise, seed=args.seed)
    train, test, _ = generate_synthetic(spec)
    config.resolved['synthetic'] = asdict(spec)

    with _output(args.out) as stream:
        _write_header(stream, config)
        serialize_libsvm(train, stream)

    if args.test_out:
        with open(args.test_out, 'w') as stream:
            _write_header(stream, config)
            serialize_libsvm(test, stream)

    return EXIT_OK


def run_bench(args: argparse.Namespace, config: RunConfig) -> int:
    train, _ = _load(args, config)
    bench_config = BenchConfig(solvers=tuple(args.solvers), sample_fractions=tuple(args.sample_fracs),
                               grid=GridSpec(args.grid_points, args.grid_ratio), epsilon=args.epsilon,
                               max_iter=args.max_iter, repeats=args.repeats, seed=args.seed)
    report = bench(train, bench_config)
    report.config['run'] = config.to_dict()

    with _output(args.out) as stream:
        if args.out_format == 'json':
            report.to_json(stream)
        elif args.out_format == 'text':
            stream.write(report.to_text())
        else:
            report.to_csv(stream)

    return EXIT_OK


def run_verify(args: argparse.Namespace, config: RunConfig) -> int:
    settings = VerifySettings(seed=args.seed, instances=args.instances, rate_seeds=args.rate_seeds, draws=args.draws)
    config.resolved['settings'] = asdict(settings)
    results = run_suite(args.suite, settings)

    with _output(args.out) as stream:
        _write_header(stream, config)
        stream.write(format_table(results))

    return EXIT_OK if all(result.passed for result in results) else EXIT_SOLVER


COMMANDS = {
    'solve': run_solve,
    'path': run_path_command,
    'synth': run_synth,
    'bench': run_bench,
    'verify': run_verify,
}


def main(argv: Union[list[str], None] = None) -> int:
    """
    Command-line entry point.

    Returns:
        int: 0 on success, 1 on a usage error, 2 on a data error, 3 on a solver failure.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return EXIT_OK if e.code in (None, 0) else EXIT_USAGE

    logging.basicConfig(level=getattr(logging, args.log_level), stream=sys.stderr,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")

    config = RunConfig.from_namespace(args)
    try:
        return COMMANDS[args.subcommand](args, config)
    except (DataError, OSError) as e:
        print(f"fwlasso: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except SolverError as e:
        print(f"fwlasso: solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except (UsageError, ContractViolation, ValueError) as e:
        print(f"fwlasso: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
