import logging

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Union

import numpy as np

from .SparseColumnMatrix import SparseColumnMatrix
from .StandardizationMode import StandardizationMode
from .Sampling import make_rng
from .DataValidator import is_response_valid
from .FWLassoErrors import ContractViolation, DataError, DimensionError, EmptyDatasetError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Dataset:
    """
    A regression dataset: design matrix X (m x p) and response y (length m).

    Instances are immutable and safe to share between threads.

    Attributes:
        X (SparseColumnMatrix): The design matrix, stored by columns.
        y (np.ndarray): Read-only response vector of length m.
        feature_names (list[str], optional): One name per column.
    """

    X: SparseColumnMatrix
    y: np.ndarray
    feature_names: Union[list[str], None] = None

    def __post_init__(self) -> None:
        y = np.array(self.y, dtype=np.float64)
        if self.X.m == 0:
            raise EmptyDatasetError("Dataset has no rows")

        if not is_response_valid(y, self.X.m):
            raise DimensionError(f"Response must be a finite vector of length {self.X.m}, got shape {y.shape}")

        if self.feature_names is not None and len(self.feature_names) != self.X.p:
            raise DimensionError(f"Expected {self.X.p} feature names, got {len(self.feature_names)}")

        y.flags.writeable = False
        object.__setattr__(self, 'y', y)

    @property
    def m(self) -> int:
        return self.X.m

    @property
    def p(self) -> int:
        return self.X.p

    def __repr__(self) -> str:
        return f"Dataset(m={self.m}, p={self.p}, nnz={self.X.nnz})"


@dataclass(frozen=True)
class StandardizationReport:
    """
    What :func:`standardize` did, so that held-out data can be transformed the same way.

    Attributes:
        y_mean (float): Mean removed from the response (0 for mode ``none``).
        column_means (np.ndarray): Means removed from the columns (zeros unless columns were centered).
        column_norms (np.ndarray): Norms of the (centered) columns before scaling.
        mode (StandardizationMode): The mode applied.
        zero_columns (np.ndarray): Indices of columns with zero norm, left unscaled.
    """

    y_mean: float
    column_means: np.ndarray
    column_norms: np.ndarray
    mode: StandardizationMode
    zero_columns: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def to_dict(self) -> dict:
        return {
            'mode': str(self.mode),
            'y_mean': self.y_mean,
            'zero_columns': [int(j) for j in self.zero_columns],
        }


@dataclass(frozen=True)
class SyntheticSpec:
    """
    Parameters of a synthetic sparse linear model.

    Attributes:
        m_train (int): Training rows.
        m_test (int): Test rows.
        p (int): Number of features.
        n_informative (int): Number of nonzero true coefficients.
        noise_sd (float): Standard deviation of the additive Gaussian noise.
        coef_scale (float): Magnitude scale of the true coefficients.
        seed (int): Seed of the generator.
    """

    m_train: int = 200
    m_test: int = 200
    p: int = 10000
    n_informative: int = 32
    noise_sd: float = 1.0
    coef_scale: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.m_train < 1 or self.m_test < 1:
            raise ContractViolation("m_train and m_test must be at least 1")

        if self.p < 1 or not 0 <= self.n_informative <= self.p:
            raise ContractViolation(f"n_informative must lie in [0, p], got {self.n_informative} for p={self.p}")

        if self.noise_sd < 0 or self.coef_scale <= 0:
            raise ContractViolation("noise_sd must be >= 0 and coef_scale > 0")


def _column_norms(X: SparseColumnMatrix) -> np.ndarray:
    return np.sqrt(X.col_norms_sq())


def standardize(ds: Dataset, mode: StandardizationMode = StandardizationMode.UNIT_NORM_COLUMNS) -> tuple[Dataset, StandardizationReport]:
    """
    Standardize a dataset.

    ``UNIT_NORM_COLUMNS`` scales every nonzero column to unit norm and keeps the matrix sparse.
    ``CENTER_AND_UNIT_NORM`` also removes column means; each column is expanded to a dense m-vector
    while it is centered, and the result generally stores m entries per column (m x p memory).
    The response is centered in every mode except ``NONE``. Zero columns are flagged, never divided by.

    Args:
        ds (Dataset): The dataset to transform.
        mode (StandardizationMode, optional): Defaults to ``UNIT_NORM_COLUMNS``.

    Returns:
        tuple[Dataset, StandardizationReport]: The transformed dataset and what was done.
    """
    p = ds.p

    if mode is StandardizationMode.NONE:
        norms = _column_norms(ds.X)
        report = StandardizationReport(0.0, np.zeros(p), norms, mode, np.flatnonzero(norms == 0))
        return ds, report

    y_mean = float(np.mean(ds.y))
    y = ds.y - y_mean

    if mode is StandardizationMode.UNIT_NORM_COLUMNS:
        means = np.zeros(p)
        norms = _column_norms(ds.X)
        zero_columns = np.flatnonzero(norms == 0)
        X = ds.X.scale_columns(_inverse_norms(norms))
    else:
        means = np.asarray(ds.X.csc.mean(axis=0)).ravel()
        norms = np.zeros(p)
        columns = []
        for j in range(p):
            dense_column = np.zeros(ds.m)
            rows, values = ds.X.column(j)
            dense_column[rows] = values
            dense_column -= means[j]
            norms[j] = np.linalg.norm(dense_column)
            if norms[j] > 0:
                dense_column /= norms[j]

            nonzero_rows = np.flatnonzero(dense_column)
            columns.append((nonzero_rows, dense_column[nonzero_rows]))

        zero_columns = np.flatnonzero(norms == 0)
        X = SparseColumnMatrix.from_columns(ds.m, columns)

    if len(zero_columns):
        logger.warning("%d zero column(s) left unscaled by standardization", len(zero_columns))

    report = StandardizationReport(y_mean, means, norms, mode, zero_columns)

    return Dataset(X, y, ds.feature_names), report


def _inverse_norms(norms: np.ndarray) -> np.ndarray:
    factors = np.ones_like(norms)
    nonzero = norms > 0
    factors[nonzero] = 1.0 / norms[nonzero]

    return factors


def apply_standardization(ds: Dataset, report: StandardizationReport) -> Dataset:
    """
    Transform held-out data with the statistics of a training standardization.

    Args:
        ds (Dataset): Held-out dataset with the same number of columns as the training data.
        report (StandardizationReport): Report returned by :func:`standardize` on the training data.

    Returns:
        Dataset: The transformed dataset.

    Raises:
        DimensionError: If the number of columns differs.
    """
    if ds.p != len(report.column_norms):
        raise DimensionError(f"Held-out data has {ds.p} columns, training data had {len(report.column_norms)}")

    if report.mode is StandardizationMode.NONE:
        return ds

    factors = _inverse_norms(report.column_norms)
    if report.mode is StandardizationMode.UNIT_NORM_COLUMNS:
        X = ds.X.scale_columns(factors)
    else:
        dense = (ds.X.to_dense() - report.column_means) * factors
        X = SparseColumnMatrix(dense)

    return Dataset(X, ds.y - report.y_mean, ds.feature_names)


def generate_synthetic(spec: SyntheticSpec) -> tuple[Dataset, Dataset, np.ndarray]:
    """
    Draw a train and a test set from the same sparse linear model.

    The design is dense standard Gaussian; ``n_informative`` coefficients, chosen uniformly, are
    nonzero with magnitudes uniform in ``coef_scale * [0.5, 1.5]`` and random signs; the response
    gets i.i.d. Gaussian noise of standard deviation ``noise_sd``. The stream comes from a PCG64
    generator seeded with ``spec.seed``, so identical specs give bit-identical output.

    Args:
        spec (SyntheticSpec): The model parameters.

    Returns:
        tuple[Dataset, Dataset, np.ndarray]: Train set, test set and the true coefficients.
    """
    rng = make_rng(spec.seed)
    m = spec.m_train + spec.m_test

    X = rng.standard_normal((m, spec.p))
    true_coef = np.zeros(spec.p)
    informative = rng.choice(spec.p, size=spec.n_informative, replace=False)
    magnitudes = spec.coef_scale * rng.uniform(0.5, 1.5, size=spec.n_informative)
    signs = rng.choice(np.array([-1.0, 1.0]), size=spec.n_informative)
    true_coef[informative] = signs * magnitudes

    y = X @ true_coef
    if spec.noise_sd > 0:
        y = y + spec.noise_sd * rng.standard_normal(m)

    train = Dataset(SparseColumnMatrix(X[:spec.m_train]), y[:spec.m_train])
    test = Dataset(SparseColumnMatrix(X[spec.m_train:]), y[spec.m_train:])
    logger.info("Generated synthetic data: p=%d, %d informative, %d train / %d test rows",
                spec.p, spec.n_informative, spec.m_train, spec.m_test)

    return train, test, true_coef


def train_test_split(ds: Dataset, test_fraction: float = 0.25, seed: int = 0) -> tuple[Dataset, Dataset]:
    """
    Split the rows of a dataset at random.

    Args:
        ds (Dataset): The dataset to split.
        test_fraction (float, optional): Share of rows sent to the test part. Defaults to 0.25.
        seed (int, optional): Seed of the permutation. Defaults to 0.

    Returns:
        tuple[Dataset, Dataset]: Train and test parts, both non-empty.

    Raises:
        DataError: If either part would be empty.
    """
    n_test = int(round(test_fraction * ds.m))
    if not 0 < n_test < ds.m:
        raise DataError(f"Cannot split {ds.m} rows with test fraction {test_fraction}")

    order = make_rng(seed).permutation(ds.m)
    test_rows, train_rows = np.sort(order[:n_test]), np.sort(order[n_test:])

    train = Dataset(ds.X.select_rows(train_rows), ds.y[train_rows], ds.feature_names)
    test = Dataset(ds.X.select_rows(test_rows), ds.y[test_rows], ds.feature_names)

    return train, test


def expand_product_features(ds: Dataset, degree: int, include_bias: bool = True) -> Dataset:
    """
    Replace the features by every monomial of total degree at most ``degree``.

    With n input features there are ``C(n + degree, degree)`` monomials including the bias column
    (27 features at degree 5 give 201,376 columns). The input is expanded densely, so this is meant
    for datasets with few original features.

    Args:
        ds (Dataset): The dataset to expand.
        degree (int): Maximum total degree, at least 1.
        include_bias (bool, optional): Keep the degree-0 column of ones. Defaults to True.

    Returns:
        Dataset: Dataset with one column per monomial, named like ``x3*x7``.
    """
    if degree < 1:
        raise ContractViolation(f"degree must be at least 1, got {degree}")

    dense = ds.X.to_dense()
    names = ds.feature_names or [f"x{j + 1}" for j in range(ds.p)]

    columns = []
    expanded_names = []
    for d in range(0 if include_bias else 1, degree + 1):
        for combo in combinations_with_replacement(range(ds.p), d):
            values = np.prod(dense[:, list(combo)], axis=1) if d else np.ones(ds.m)
            rows = np.flatnonzero(values)
            columns.append((rows, values[rows]))
            expanded_names.append('*'.join(names[j] for j in combo) if d else '1')

    logger.info("Expanded %d features into %d product features (degree %d)", ds.p, len(columns), degree)

    return Dataset(SparseColumnMatrix.from_columns(ds.m, columns), ds.y, expanded_names)
