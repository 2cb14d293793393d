from dataclasses import dataclass, field

import numpy as np

from .Dataset import Dataset
from .OpCounter import OpCounter
from .SparseColumnMatrix import SparseColumnMatrix
from .DataValidator import is_response_valid
from .FWLassoErrors import ContractViolation, DimensionError


@dataclass(frozen=True)
class LassoProblem:
    """
    Least-squares data shared by every solver: X, y and the quantities precomputed once per dataset.

    Instances are immutable and may be shared by concurrent solves.

    Attributes:
        X (SparseColumnMatrix): The design matrix.
        y (np.ndarray): Response, length m.
        sigma (np.ndarray): ``sigma_i = z_i^T y``, length p.
        col_norms_sq (np.ndarray): ``||z_i||^2``, length p.
        yty (float): ``y^T y``.
        setup_counters (OpCounter): Cost of the precomputation (2p dot products).
    """

    X: SparseColumnMatrix
    y: np.ndarray
    sigma: np.ndarray
    col_norms_sq: np.ndarray
    yty: float
    setup_counters: OpCounter = field(default_factory=OpCounter, compare=False)

    def __post_init__(self) -> None:
        if not is_response_valid(np.asarray(self.y), self.X.m):
            raise DimensionError(f"Response must be a finite vector of length {self.X.m}")

        if self.sigma.shape != (self.X.p,) or self.col_norms_sq.shape != (self.X.p,):
            raise DimensionError(f"sigma and col_norms_sq must have length p={self.X.p}")

    @classmethod
    def build(cls, X: SparseColumnMatrix, y: np.ndarray) -> 'LassoProblem':
        """
        Precompute ``sigma``, the column norms and ``y^T y``.

        Args:
            X (SparseColumnMatrix): The design matrix.
            y (np.ndarray): Response, length m.

        Returns:
            LassoProblem: The shared problem data.
        """
        y = np.array(y, dtype=np.float64)
        if not is_response_valid(y, X.m):
            raise DimensionError(f"Response must be a finite vector of length {X.m}, got shape {y.shape}")

        y.flags.writeable = False
        ctr = OpCounter()
        sigma = X.rmatvec(y, ctr)
        col_norms_sq = X.col_norms_sq(ctr)
        for array in (sigma, col_norms_sq):
            array.flags.writeable = False

        return cls(X, y, sigma, col_norms_sq, float(y @ y), ctr)

    @classmethod
    def from_dataset(cls, ds: Dataset) -> 'LassoProblem':
        return cls.build(ds.X, ds.y)

    @property
    def m(self) -> int:
        return self.X.m

    @property
    def p(self) -> int:
        return self.X.p

    def objective(self, alpha) -> float:
        """
        Direct ``0.5 * ||X alpha - y||^2`` (not counted; used for audits and reporting).
        """
        residual = self.X.matvec(alpha) - self.y

        return 0.5 * float(residual @ residual)

    def __repr__(self) -> str:
        return f"LassoProblem(m={self.m}, p={self.p})"


@dataclass(frozen=True)
class FwProblem:
    """
    The constrained Lasso ``min 0.5 * ||X alpha - y||^2  s.t.  ||alpha||_1 <= delta``.
    """

    data: LassoProblem
    delta: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise ContractViolation(f"delta must be a finite positive radius, got {self.delta}")

    @property
    def X(self) -> SparseColumnMatrix:
        return self.data.X

    @property
    def y(self) -> np.ndarray:
        return self.data.y

    @property
    def sigma(self) -> np.ndarray:
        return self.data.sigma

    @property
    def col_norms_sq(self) -> np.ndarray:
        return self.data.col_norms_sq

    @property
    def yty(self) -> float:
        return self.data.yty

    @property
    def p(self) -> int:
        return self.data.p

    @property
    def m(self) -> int:
        return self.data.m


@dataclass(frozen=True)
class CdProblem:
    """
    The penalized Lasso ``min 0.5 * ||X alpha - y||^2 + lam * ||alpha||_1``.
    """

    data: LassoProblem
    lam: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.lam) and self.lam >= 0):
            raise ContractViolation(f"lambda must be finite and non-negative, got {self.lam}")

    @property
    def X(self) -> SparseColumnMatrix:
        return self.data.X

    @property
    def y(self) -> np.ndarray:
        return self.data.y

    @property
    def sigma(self) -> np.ndarray:
        return self.data.sigma

    @property
    def col_norms_sq(self) -> np.ndarray:
        return self.data.col_norms_sq

    @property
    def p(self) -> int:
        return self.data.p

    @property
    def m(self) -> int:
        return self.data.m
