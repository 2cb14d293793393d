import math

from typing import Iterable, Union

import numpy as np
from scipy import sparse

from .OpCounter import OpCounter
from .FWLassoErrors import ContractViolation, DimensionError
from .DataValidator import is_column_valid, is_csc_valid, is_dimension_valid


class SparseColumnMatrix:
    """
    An m x p design matrix stored column by column.

    Every hot operation of the solvers touches a single predictor column ``z_j`` at a time, so the
    matrix keeps a compressed-column (CSC) layout where a column is a sorted row-index array and a
    value array. Kernels that a solver requests are reported to the caller's :class:`OpCounter`.

    The matrix is immutable after construction and may be shared between concurrent solves.

    Attributes:
        compensated (bool): Debug switch; when True dot products use exactly rounded summation.
    """

    def __init__(self, matrix: Union[sparse.spmatrix, np.ndarray], compensated: bool = False) -> None:
        """
        Initialize the matrix from any scipy sparse matrix or dense array.

        Explicit zeros and duplicate entries are removed and row indices are sorted.

        Args:
            matrix (Union[sparse.spmatrix, np.ndarray]): The m x p matrix.
            compensated (bool, optional): Enable compensated summation in ``col_dot_dense``. Defaults to False.

        Raises:
            DimensionError: If the matrix is not two dimensional or holds non-finite values.
        """
        if sparse.issparse(matrix):
            csc = sparse.csc_matrix(matrix, dtype=np.float64, copy=True)
        else:
            dense = np.asarray(matrix, dtype=np.float64)
            if dense.ndim != 2:
                raise DimensionError(f"Design matrix must be two dimensional, got shape {dense.shape}")

            csc = sparse.csc_matrix(dense)

        csc.sum_duplicates()
        csc.eliminate_zeros()
        csc.sort_indices()

        m, p = csc.shape
        if not (is_dimension_valid(m) and is_dimension_valid(p)):
            raise DimensionError(f"Invalid design matrix shape: {csc.shape}")

        if not is_csc_valid(csc.indptr, csc.indices, csc.data, m, p):
            raise DimensionError("Design matrix holds non-finite values or malformed columns")

        for array in (csc.data, csc.indices, csc.indptr):
            array.flags.writeable = False

        self._csc = csc
        # The CSR view of X^T shares the CSC arrays and serves batched column kernels.
        self._transposed = sparse.csr_matrix((csc.data, csc.indices, csc.indptr), shape=(p, m))
        self.compensated = compensated


    @classmethod
    def from_columns(cls, m: int, columns: Iterable[tuple]) -> 'SparseColumnMatrix':
        """
        Build a matrix from per-column ``(rows, values)`` pairs.

        Args:
            m (int): Number of rows.
            columns (Iterable[tuple]): For each column, a sorted row-index sequence and a value sequence.

        Returns:
            SparseColumnMatrix: The assembled matrix.

        Raises:
            DimensionError: If a column is invalid for m rows.
        """
        indptr = [0]
        indices = []
        data = []
        for j, (rows, values) in enumerate(columns):
            rows = np.asarray(rows, dtype=np.int64)
            values = np.asarray(values, dtype=np.float64)
            if not is_column_valid(rows, values, m):
                raise DimensionError(f"Invalid column {j} for a matrix with {m} rows")

            indices.append(rows)
            data.append(values)
            indptr.append(indptr[-1] + len(rows))

        p = len(indptr) - 1
        csc = sparse.csc_matrix(
            (np.concatenate(data) if data else np.zeros(0),
             np.concatenate(indices) if indices else np.zeros(0, dtype=np.int64),
             np.asarray(indptr)),
            shape=(m, p))

        return cls(csc)


    @classmethod
    def from_rows(cls, rows: list[tuple], p: int) -> 'SparseColumnMatrix':
        """
        Build a matrix from per-row ``(column_indices, values)`` pairs, as produced by row-oriented readers.

        Args:
            rows (list[tuple]): 0-based column indices and values of every row.
            p (int): Number of columns.

        Returns:
            SparseColumnMatrix: The assembled matrix.
        """
        row_ids = []
        col_ids = []
        values = []
        for i, (cols, vals) in enumerate(rows):
            row_ids.extend([i] * len(cols))
            col_ids.extend(cols)
            values.extend(vals)

        coo = sparse.coo_matrix((np.asarray(values, dtype=np.float64),
                                 (np.asarray(row_ids, dtype=np.int64), np.asarray(col_ids, dtype=np.int64))),
                                shape=(len(rows), p))
        return cls(coo)


    @property
    def m(self) -> int:
        return self._csc.shape[0]

    @property
    def p(self) -> int:
        return self._csc.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._csc.shape

    @property
    def nnz(self) -> int:
        return self._csc.nnz

    @property
    def csc(self) -> sparse.csc_matrix:
        """
        The underlying read-only CSC matrix.
        """
        return self._csc


    def _check_column(self, j: int) -> None:
        if not 0 <= j < self.p:
            raise ContractViolation(f"Column index {j} out of range for p={self.p}")


    def _check_vector(self, v: np.ndarray, length: int, name: str) -> None:
        if v.shape != (length,):
            raise ContractViolation(f"{name} must have length {length}, got shape {v.shape}")


    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """
        Get the stored entries of column j.

        Args:
            j (int): Column index.

        Returns:
            tuple[np.ndarray, np.ndarray]: Read-only row indices and values.

        Raises:
            ContractViolation: If the index is out of range.
        """
        self._check_column(j)
        start, end = self._csc.indptr[j], self._csc.indptr[j + 1]

        return self._csc.indices[start:end], self._csc.data[start:end]


    def column_nnz(self) -> np.ndarray:
        """
        Number of stored entries of every column.
        """
        return np.diff(self._csc.indptr)


    def col_dot_dense(self, j: int, v: np.ndarray, ctr: OpCounter) -> float:
        """
        Compute ``z_j^T v`` over the stored entries of column j.

        Args:
            j (int): Column index.
            v (np.ndarray): Dense vector of length m.
            ctr (OpCounter): Ledger receiving one dot product.

        Returns:
            float: The inner product.

        Raises:
            ContractViolation: If j or the length of v is out of range.
        """
        rows, values = self.column(j)
        self._check_vector(v, self.m, "v")
        ctr.add_dot_products()

        return self._dot(rows, values, v)


    def _dot(self, rows: np.ndarray, values: np.ndarray, v: np.ndarray) -> float:
        if self.compensated:
            return math.fsum(values * v[rows])

        return float(np.dot(values, v[rows]))


    def cols_dot_dense(self, cols: Union[np.ndarray, None], v: np.ndarray, ctr: OpCounter) -> np.ndarray:
        """
        Batched ``z_j^T v`` for a set of columns, one dot product counted per column.

        Args:
            cols (Union[np.ndarray, None]): Column indices, or None for every column.
            v (np.ndarray): Dense vector of length m.
            ctr (OpCounter): Ledger receiving ``len(cols)`` dot products.

        Returns:
            np.ndarray: The inner products, in the order of ``cols``.
        """
        self._check_vector(v, self.m, "v")

        if cols is None:
            ctr.add_dot_products(self.p)
            return self._transposed @ v

        cols = np.asarray(cols, dtype=np.int64)
        if len(cols) and (cols.min() < 0 or cols.max() >= self.p):
            raise ContractViolation(f"Column indices out of range for p={self.p}")

        ctr.add_dot_products(len(cols))
        if self.compensated:
            return np.array([self._dot(*self.column(j), v) for j in cols])

        return self._transposed[cols] @ v


    def col_axpy(self, j: int, scale: float, v: np.ndarray, ctr: OpCounter) -> None:
        """
        In-place ``v += scale * z_j`` touching only the stored rows of column j.

        Args:
            j (int): Column index.
            scale (float): Multiplier of the column.
            v (np.ndarray): Dense vector of length m, updated in place.
            ctr (OpCounter): Ledger receiving one axpy.
        """
        rows, values = self.column(j)
        self._check_vector(v, self.m, "v")
        ctr.add_axpy()

        if scale != 0.0:
            v[rows] += scale * values


    def col_norms_sq(self, ctr: Union[OpCounter, None] = None) -> np.ndarray:
        """
        Squared Euclidean norm of every column, counted as p dot products.

        Args:
            ctr (OpCounter, optional): Ledger to charge. Defaults to None.

        Returns:
            np.ndarray: Vector of length p.
        """
        squares = self._csc.copy()
        squares.data = squares.data ** 2
        if ctr is not None:
            ctr.add_dot_products(self.p)

        return np.asarray(squares.sum(axis=0)).ravel()


    def rmatvec(self, v: np.ndarray, ctr: Union[OpCounter, None] = None) -> np.ndarray:
        """
        Compute ``X^T v``, counted as p dot products.
        """
        return self.cols_dot_dense(None, v, OpCounter() if ctr is None else ctr)


    def full_gradient(self, p_vec: np.ndarray, sigma: np.ndarray, ctr: OpCounter) -> np.ndarray:
        """
        Full least-squares gradient ``-sigma_i + z_i^T X alpha`` from the cached ``X alpha``.

        Costs p dot products.

        Args:
            p_vec (np.ndarray): Cached product X alpha, length m.
            sigma (np.ndarray): Precomputed ``z_i^T y``, length p.
            ctr (OpCounter): Ledger receiving p dot products.

        Returns:
            np.ndarray: Gradient of ``0.5 * ||X alpha - y||^2``, length p.
        """
        self._check_vector(sigma, self.p, "sigma")

        return self.cols_dot_dense(None, p_vec, ctr) - sigma


    def matvec(self, alpha: Union[dict, np.ndarray]) -> np.ndarray:
        """
        Compute ``X alpha`` directly from a sparse coefficient map or a dense vector (not counted).

        Args:
            alpha (Union[dict, np.ndarray]): Coefficients, either ``{index: value}`` or length p.

        Returns:
            np.ndarray: Vector of length m.
        """
        if isinstance(alpha, dict):
            result = np.zeros(self.m)
            for j, value in alpha.items():
                rows, values = self.column(j)
                result[rows] += value * values

            return result

        alpha = np.asarray(alpha, dtype=np.float64)
        self._check_vector(alpha, self.p, "alpha")

        return self._csc @ alpha


    def scale_columns(self, factors: np.ndarray) -> 'SparseColumnMatrix':
        """
        Return a new matrix whose column j is multiplied by ``factors[j]``.
        """
        factors = np.asarray(factors, dtype=np.float64)
        self._check_vector(factors, self.p, "factors")

        return SparseColumnMatrix(self._csc @ sparse.diags(factors), compensated=self.compensated)


    def select_rows(self, rows: np.ndarray) -> 'SparseColumnMatrix':
        """
        Return the sub-matrix made of the given rows, in the given order.
        """
        return SparseColumnMatrix(self._csc[np.asarray(rows, dtype=np.int64), :], compensated=self.compensated)


    def to_dense(self) -> np.ndarray:
        """
        Expand the matrix into a dense array. Intended for small instances and reference solvers.
        """
        return self._csc.toarray()


    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseColumnMatrix):
            return NotImplemented

        return (self.shape == other.shape
                and np.array_equal(self._csc.indptr, other._csc.indptr)
                and np.array_equal(self._csc.indices, other._csc.indices)
                and np.array_equal(self._csc.data, other._csc.data))

    __hash__ = None

    def __repr__(self) -> str:
        return f"SparseColumnMatrix(m={self.m}, p={self.p}, nnz={self.nnz})"
