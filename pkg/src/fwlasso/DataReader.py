import csv
import math
import logging

from typing import TextIO, Union

import numpy as np

from .Dataset import Dataset
from .SparseColumnMatrix import SparseColumnMatrix
from .DataValidator import is_libsvm_row_valid
from .FWLassoErrors import DataError, DataParseError, DimensionError, EmptyDatasetError

logger = logging.getLogger(__name__)

# Emit a progress message every this many parsed rows.
PROGRESS_EVERY = 10000

SUPPORTED_FORMATS = ('libsvm', 'csv')


def _parse_feature(token: str, line_number: int) -> tuple[int, float]:
    parts = token.split(':')
    if len(parts) != 2:
        raise DataParseError(f"malformed feature token '{token}'", line_number)

    try:
        index = int(parts[0])
        value = float(parts[1])
    except ValueError:
        raise DataParseError(f"malformed feature token '{token}'", line_number) from None

    if index < 1:
        raise DataParseError(f"feature index must be 1-based, got {index}", line_number)

    if not math.isfinite(value):
        raise DataParseError(f"non-finite feature value '{token}'", line_number)

    return index, value


def parse_libsvm(text_stream: TextIO, num_features: Union[int, None] = None) -> Dataset:
    """
    Parse LIBSVM / SVMLight regression data.

    Each nonempty line reads ``<label> <idx>:<val> ...`` with 1-based, strictly increasing indices.
    ``#`` comments are stripped, ``qid:`` tokens are ignored and explicit zero values are not stored.

    Args:
        text_stream (TextIO): Any iterable of text lines.
        num_features (int, optional): Explicit p; may exceed the largest index present. Defaults to None.

    Returns:
        Dataset: The parsed dataset; p is the largest index seen unless ``num_features`` is given.

    Raises:
        DataParseError: On a malformed token or non-increasing indices (with the line number).
        DimensionError: If an index exceeds ``num_features``.
        EmptyDatasetError: If the stream holds no data line.
    """
    labels = []
    rows = []
    max_index = 0

    for line_number, line in enumerate(text_stream, start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue

        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise DataParseError(f"malformed label '{tokens[0]}'", line_number) from None

        if not math.isfinite(label):
            raise DataParseError(f"non-finite label '{tokens[0]}'", line_number)

        features = [_parse_feature(token, line_number) for token in tokens[1:] if not token.startswith('qid:')]
        indices = [index for index, _ in features]
        if not is_libsvm_row_valid(indices):
            raise DataParseError("feature indices must be strictly increasing", line_number)

        if indices:
            max_index = max(max_index, indices[-1])
            if num_features is not None and indices[-1] > num_features:
                raise DimensionError(f"line {line_number}: feature index {indices[-1]} exceeds num_features={num_features}")

        labels.append(label)
        rows.append(([index - 1 for index, value in features if value != 0.0],
                     [value for _, value in features if value != 0.0]))

        if len(rows) % PROGRESS_EVERY == 0:
            logger.info("--- read %d rows", len(rows))

    if not rows:
        raise EmptyDatasetError("no data lines found")

    p = max_index if num_features is None else num_features
    logger.info("Finished. %d rows, %d features.", len(rows), p)

    return Dataset(SparseColumnMatrix.from_rows(rows, p), np.asarray(labels))


def serialize_libsvm(ds: Dataset, text_stream: TextIO) -> None:
    """
    Write a dataset in LIBSVM format with exact (``repr``) float formatting.

    Args:
        ds (Dataset): The dataset to write.
        text_stream (TextIO): Destination stream.
    """
    by_rows = ds.X.csc.tocsr()
    by_rows.sort_indices()
    for i in range(ds.m):
        start, end = by_rows.indptr[i], by_rows.indptr[i + 1]
        tokens = [repr(float(ds.y[i]))]
        tokens.extend(f"{j + 1}:{float(v)!r}" for j, v in zip(by_rows.indices[start:end], by_rows.data[start:end]))
        text_stream.write(' '.join(tokens) + '\n')


def parse_csv(text_stream: TextIO) -> Dataset:
    """
    Parse a CSV file whose header names the columns and whose last column is the response.

    Args:
        text_stream (TextIO): Text stream with a header row.

    Returns:
        Dataset: The parsed dataset with feature names taken from the header.

    Raises:
        DataParseError: On a malformed or short row.
        EmptyDatasetError: If there is no data row.
    """
    reader = csv.reader(text_stream)
    header = next(reader, None)
    if header is None or len(header) < 2:
        raise EmptyDatasetError("CSV input needs a header with at least one feature and the response")

    p = len(header) - 1
    labels = []
    rows = []
    for line_number, record in enumerate(reader, start=2):
        if not record or all(not field.strip() for field in record):
            continue

        if len(record) != p + 1:
            raise DataParseError(f"expected {p + 1} fields, got {len(record)}", line_number)

        try:
            values = [float(field) for field in record]
        except ValueError:
            raise DataParseError("non-numeric field", line_number) from None

        if not all(math.isfinite(value) for value in values):
            raise DataParseError("non-finite field", line_number)

        nonzero = [j for j in range(p) if values[j] != 0.0]
        rows.append((nonzero, [values[j] for j in nonzero]))
        labels.append(values[-1])

    if not rows:
        raise EmptyDatasetError("no data rows found")

    return Dataset(SparseColumnMatrix.from_rows(rows, p), np.asarray(labels), [name.strip() for name in header[:-1]])


class DataReader:
    """
    Reads a regression dataset from a local file.

    Attributes:
        data_path (str): Path of the file.
        fmt (str): ``libsvm`` or ``csv``.
        num_features (int, optional): Explicit p for LIBSVM files.
        dataset (Dataset): The parsed dataset.
    """

    def __init__(self, data_path: str, fmt: str = 'libsvm', num_features: Union[int, None] = None) -> None:
        """
        Initialize the reader and parse the file.

        Args:
            data_path (str): Path of the file.
            fmt (str, optional): ``libsvm`` or ``csv``. Defaults to ``libsvm``.
            num_features (int, optional): Explicit p for LIBSVM files. Defaults to None.

        Raises:
            DataError: If the format is unknown or the content is invalid.
            OSError: If the file cannot be opened.
        """
        if fmt not in SUPPORTED_FORMATS:
            raise DataError(f"Unsupported data format: {fmt}")

        self.data_path = data_path
        self.fmt = fmt
        self.num_features = num_features
        self.dataset = self._read_data()


    def _read_data(self) -> Dataset:
        logger.info("Reading %s data from %s", self.fmt, self.data_path)
        with open(self.data_path, 'r', newline='' if self.fmt == 'csv' else None) as file:
            if self.fmt == 'csv':
                dataset = parse_csv(file)
            else:
                dataset = parse_libsvm(file, self.num_features)

        if self.num_features is not None and dataset.p != self.num_features:
            raise DimensionError(f"{self.data_path} has {dataset.p} features, expected {self.num_features}")

        logger.info("Loaded %s: m=%d, p=%d, nnz=%d", self.data_path, dataset.m, dataset.p, dataset.X.nnz)

        return dataset


def load_dataset(data_path: str, fmt: str = 'libsvm', num_features: Union[int, None] = None) -> Dataset:
    """
    Read a dataset from a local file.
    """
    return DataReader(data_path, fmt, num_features).dataset


def write_libsvm(ds: Dataset, data_path: str) -> None:
    """
    Write a dataset to a local LIBSVM file.
    """
    with open(data_path, 'w') as file:
        serialize_libsvm(ds, file)
