import unittest

import numpy as np
from math import inf
from fwlasso import DataValidator


class TestDataValidation(unittest.TestCase):
    def setUp(self):
        self.valid_dimensions = [0, 1, 2, 10000, DataValidator.MAX_DIMENSION]
        self.invalid_dimensions = [-inf, -1, DataValidator.MAX_DIMENSION + 1, inf]

        self.valid_columns = [
            ([], []),
            ([0], [1.5]),
            ([0, 2, 4], [1.0, -2.0, 3.0]),
        ]

        self.invalid_columns = [
            ([0, 1], [1.0]),
            ([2, 1], [1.0, 2.0]),
            ([1, 1], [1.0, 2.0]),
            ([-1], [1.0]),
            ([5], [1.0]),
            ([0], [0.0]),
            ([0], [np.nan]),
            ([0], [np.inf]),
        ]

        self.valid_libsvm_rows = [[], [1], [1, 2, 3], [4, 10, 4000]]
        self.invalid_libsvm_rows = [[0], [2, 2], [3, 1], [1, 5, 4]]

    def test_dimension_valid(self):
        for count in self.valid_dimensions:
            self.assertTrue(DataValidator.is_dimension_valid(count))

    def test_dimension_invalid(self):
        for count in self.invalid_dimensions:
            self.assertFalse(DataValidator.is_dimension_valid(count))

    def test_column_valid(self):
        for rows, values in self.valid_columns:
            self.assertTrue(DataValidator.is_column_valid(np.array(rows, dtype=int), np.array(values), 5))

    def test_column_invalid(self):
        for rows, values in self.invalid_columns:
            self.assertFalse(DataValidator.is_column_valid(np.array(rows, dtype=int), np.array(values), 5))

    def test_csc_valid(self):
        indptr = np.array([0, 2, 2, 3])
        indices = np.array([0, 3, 1])
        data = np.array([1.0, 2.0, 3.0])

        self.assertTrue(DataValidator.is_csc_valid(indptr, indices, data, 4, 3))

    def test_csc_invalid(self):
        data = np.array([1.0, 2.0, 3.0])
        cases = [
            (np.array([0, 2, 2]), np.array([0, 3, 1])),
            (np.array([0, 2, 2, 4]), np.array([0, 3, 1])),
            (np.array([0, 2, 2, 3]), np.array([3, 0, 1])),
            (np.array([0, 2, 2, 3]), np.array([0, 4, 1])),
        ]

        for indptr, indices in cases:
            self.assertFalse(DataValidator.is_csc_valid(indptr, indices, data, 4, 3))

        self.assertFalse(DataValidator.is_csc_valid(np.array([0, 1]), np.array([0]), np.array([0.0]), 4, 1))

    def test_csc_new_column_may_restart_rows(self):
        indptr = np.array([0, 2, 4])
        indices = np.array([2, 3, 0, 1])

        self.assertTrue(DataValidator.is_csc_valid(indptr, indices, np.ones(4), 4, 2))

    def test_response(self):
        self.assertTrue(DataValidator.is_response_valid(np.zeros(3), 3))
        self.assertFalse(DataValidator.is_response_valid(np.zeros(2), 3))
        self.assertFalse(DataValidator.is_response_valid(np.array([0.0, np.nan, 1.0]), 3))
        self.assertFalse(DataValidator.is_response_valid(np.zeros((3, 1)), 3))

    def test_libsvm_row_valid(self):
        for row in self.valid_libsvm_rows:
            self.assertTrue(DataValidator.is_libsvm_row_valid(row))

    def test_libsvm_row_invalid(self):
        for row in self.invalid_libsvm_rows:
            self.assertFalse(DataValidator.is_libsvm_row_valid(row))


if __name__ == '__main__':
    unittest.main()
