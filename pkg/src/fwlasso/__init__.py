from .OpCounter import OpCounter
from .SparseColumnMatrix import SparseColumnMatrix
from .Dataset import Dataset, StandardizationReport, SyntheticSpec, standardize, apply_standardization, \
    generate_synthetic, train_test_split, expand_product_features
from .DataReader import DataReader, parse_libsvm, serialize_libsvm, parse_csv, load_dataset, write_libsvm
from .Sampling import DEFAULT_SEED, SamplingPlan, draw_subset, size_for_top_fraction, size_for_active_hit, \
    exact_miss_probability, child_seed, make_rng
from .LassoProblem import LassoProblem, FwProblem, CdProblem
from .Solution import Solution, Trace, TraceRow
from .FWSolver import FWSolver, FwOptions, FwState, curvature_bound
from .CDSolver import CDSolver, CdOptions, CdState, soft_threshold
from .Oracle import OracleResult, project_l1_ball, solve_constrained_reference, solve_penalized_reference, \
    least_squares_reference
from .PathDriver import GridSpec, PathPoint, PathResult, lambda_max, build_grid, bootstrap_delta_max, run_path, \
    relevant_features, feature_trajectories
from .Benchmark import BenchConfig, BenchReport, bench
from .Verify import CheckResult, VerifySettings, run_suite, format_table
from .StandardizationMode import StandardizationMode
from .SamplingMode import SamplingMode
from .SolverType import SolverType
from .CDOrder import CDOrder
from .StopReason import StopReason
from .TraceLevel import TraceLevel
from .FWLassoErrors import FWLassoError, DataError, DataParseError, DimensionError, EmptyDatasetError, \
    ContractViolation, SolverError, NumericError, StateAuditError, DegenerateProblemError, OracleFailure

__version__ = "1.0.0"
__all__ = ["OpCounter", "SparseColumnMatrix", "Dataset", "StandardizationReport", "SyntheticSpec", "standardize",
           "apply_standardization", "generate_synthetic", "train_test_split", "expand_product_features",
           "DataReader", "parse_libsvm", "serialize_libsvm", "parse_csv", "load_dataset", "write_libsvm",
           "DEFAULT_SEED", "SamplingPlan", "draw_subset", "size_for_top_fraction", "size_for_active_hit",
           "exact_miss_probability", "child_seed", "make_rng", "LassoProblem", "FwProblem", "CdProblem",
           "Solution", "Trace", "TraceRow", "FWSolver", "FwOptions", "FwState", "curvature_bound",
           "CDSolver", "CdOptions", "CdState", "soft_threshold", "OracleResult", "project_l1_ball",
           "solve_constrained_reference", "solve_penalized_reference", "least_squares_reference",
           "GridSpec", "PathPoint", "PathResult", "lambda_max", "build_grid", "bootstrap_delta_max", "run_path",
           "relevant_features", "feature_trajectories", "BenchConfig", "BenchReport", "bench",
           "CheckResult", "VerifySettings", "run_suite", "format_table",
           "StandardizationMode", "SamplingMode", "SolverType", "CDOrder", "StopReason", "TraceLevel",
           "FWLassoError", "DataError", "DataParseError", "DimensionError", "EmptyDatasetError",
           "ContractViolation", "SolverError", "NumericError", "StateAuditError", "DegenerateProblemError",
           "OracleFailure"]
