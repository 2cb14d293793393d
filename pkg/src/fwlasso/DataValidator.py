import numpy as np

# Largest number of rows or columns accepted in a design matrix (int32 index arrays).
MAX_DIMENSION = np.iinfo(np.int32).max


def is_dimension_valid(count: int) -> bool:
    """
    Check if a row or column count is valid.

    Args:
        count (int): The number of rows or columns.

    Returns:
        bool: True if the count is valid, False otherwise.
    """
    return 0 <= count <= MAX_DIMENSION


def is_column_valid(rows: np.ndarray, values: np.ndarray, m: int) -> bool:
    """
    Check if a stored column is valid.

    Row indices must be strictly increasing and lie in [0, m), the index and value arrays must
    have equal lengths, and no stored value may be zero or non-finite.

    Args:
        rows (np.ndarray): Row indices of the stored entries.
        values (np.ndarray): Values of the stored entries.
        m (int): Number of rows of the matrix.

    Returns:
        bool: True if the column is valid, False otherwise.
    """
    if len(rows) != len(values):
        return False

    if len(rows) == 0:
        return True

    if rows[0] < 0 or rows[-1] >= m:
        return False

    if np.any(np.diff(rows) <= 0):
        return False

    return bool(np.all(values != 0) and np.all(np.isfinite(values)))


def is_csc_valid(indptr: np.ndarray, indices: np.ndarray, data: np.ndarray, m: int, p: int) -> bool:
    """
    Check if compressed-column arrays describe a valid m x p matrix.

    Args:
        indptr (np.ndarray): Column pointer array of length p + 1.
        indices (np.ndarray): Row indices of all stored entries.
        data (np.ndarray): Values of all stored entries.
        m (int): Number of rows.
        p (int): Number of columns.

    Returns:
        bool: True if the arrays are valid, False otherwise.
    """
    if not (is_dimension_valid(m) and is_dimension_valid(p)):
        return False

    if len(indptr) != p + 1 or indptr[0] != 0 or indptr[-1] != len(indices):
        return False

    if len(indices) != len(data):
        return False

    counts = np.diff(indptr)
    if np.any(counts < 0):
        return False

    if len(indices) == 0:
        return True

    if indices.min() < 0 or indices.max() >= m:
        return False

    if not (np.all(data != 0) and np.all(np.isfinite(data))):
        return False

    # Within a column row indices increase strictly; the first entry of a column is exempt.
    continues_column = np.ones(len(indices), dtype=bool)
    continues_column[indptr[:-1][counts > 0]] = False

    return bool(np.all(np.diff(indices)[continues_column[1:]] > 0))


def is_response_valid(y: np.ndarray, m: int) -> bool:
    """
    Check if a response vector matches the number of rows and is finite.
    """
    return y.ndim == 1 and len(y) == m and bool(np.all(np.isfinite(y)))


def is_libsvm_row_valid(feature_indices: list) -> bool:
    """
    Check if the 1-based feature indices of a LIBSVM line are strictly increasing.

    Args:
        feature_indices (list): Indices in the order they appear on the line.

    Returns:
        bool: True if the indices are valid, False otherwise.
    """
    previous = 0
    for index in feature_indices:
        if index <= previous:
            return False

        previous = index

    return True
