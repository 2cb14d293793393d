import unittest

import numpy as np
from fwlasso import Dataset, SparseColumnMatrix, SyntheticSpec, StandardizationMode, standardize, \
    apply_standardization, generate_synthetic, train_test_split, expand_product_features, \
    ContractViolation, DataError, DimensionError, EmptyDatasetError


class TestDataset(unittest.TestCase):
    def setUp(self):
        self.X = np.array([[3.0, 0.0, 1.0],
                           [4.0, 0.0, 0.0],
                           [0.0, 0.0, 2.0]])
        self.ds = Dataset(SparseColumnMatrix(self.X), np.array([1.0, 2.0, 6.0]))

    def test_invalid(self):
        with self.assertRaises(DimensionError):
            Dataset(SparseColumnMatrix(self.X), np.array([1.0, 2.0]))

        with self.assertRaises(DimensionError):
            Dataset(SparseColumnMatrix(self.X), np.array([1.0, np.inf, 2.0]))

        with self.assertRaises(DimensionError):
            Dataset(SparseColumnMatrix(self.X), np.zeros(3), ['a'])

        with self.assertRaises(EmptyDatasetError):
            Dataset(SparseColumnMatrix(np.zeros((0, 2))), np.zeros(0))

    def test_unit_norm(self):
        standardized, report = standardize(self.ds, StandardizationMode.UNIT_NORM_COLUMNS)
        dense = standardized.X.to_dense()

        np.testing.assert_allclose(dense[:, 0], [0.6, 0.8, 0.0])
        self.assertAlmostEqual(float(np.linalg.norm(dense[:, 2])), 1.0)
        np.testing.assert_array_equal(dense[:, 1], [0.0, 0.0, 0.0])
        np.testing.assert_array_equal(report.zero_columns, [1])
        self.assertAlmostEqual(report.y_mean, 3.0)
        np.testing.assert_allclose(standardized.y, [-2.0, -1.0, 3.0])

    def test_none(self):
        standardized, report = standardize(self.ds, StandardizationMode.NONE)

        self.assertIs(standardized, self.ds)
        np.testing.assert_allclose(report.column_norms, [5.0, 0.0, np.sqrt(5.0)])
        self.assertEqual(report.y_mean, 0.0)

    def test_center(self):
        standardized, report = standardize(self.ds, StandardizationMode.CENTER_AND_UNIT_NORM)
        dense = standardized.X.to_dense()

        np.testing.assert_allclose(dense.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(np.linalg.norm(dense[:, [0, 2]], axis=0), 1.0)
        np.testing.assert_array_equal(report.zero_columns, [1])
        np.testing.assert_allclose(report.column_means, [7.0 / 3.0, 0.0, 1.0])

    def test_apply_standardization(self):
        for mode in StandardizationMode:
            standardized, report = standardize(self.ds, mode)
            again = apply_standardization(self.ds, report)

            np.testing.assert_allclose(again.X.to_dense(), standardized.X.to_dense(), atol=1e-12)
            np.testing.assert_allclose(again.y, standardized.y, atol=1e-12)

        with self.assertRaises(DimensionError):
            apply_standardization(Dataset(SparseColumnMatrix(np.eye(2)), np.zeros(2)), report)

    def test_synthetic(self):
        train, test, coef = generate_synthetic(SyntheticSpec(m_train=200, m_test=50, p=10000, n_informative=32, seed=7))

        self.assertEqual(np.count_nonzero(coef), 32)
        self.assertEqual((train.m, train.p), (200, 10000))
        self.assertEqual((test.m, test.p), (50, 10000))

    def test_synthetic_noiseless(self):
        train, _, coef = generate_synthetic(SyntheticSpec(m_train=20, m_test=5, p=1, n_informative=1, noise_sd=0.0, seed=3))

        np.testing.assert_allclose(train.y, coef[0] * train.X.to_dense()[:, 0], rtol=1e-15)

    def test_synthetic_deterministic(self):
        spec = SyntheticSpec(m_train=50, m_test=10, p=200, n_informative=10, seed=1)
        first, _, _ = generate_synthetic(spec)
        second, _, _ = generate_synthetic(spec)

        np.testing.assert_array_equal(first.y, second.y)
        self.assertEqual(first.X, second.X)

    def test_synthetic_invalid(self):
        with self.assertRaises(ContractViolation):
            SyntheticSpec(p=5, n_informative=6)

        with self.assertRaises(ContractViolation):
            SyntheticSpec(m_train=0)

    def test_train_test_split(self):
        ds = Dataset(SparseColumnMatrix(np.arange(1.0, 21.0).reshape(10, 2)), np.arange(10.0))
        train, test = train_test_split(ds, 0.3, seed=4)

        self.assertEqual((train.m, test.m), (7, 3))
        self.assertEqual(sorted(np.concatenate([train.y, test.y])), list(np.arange(10.0)))

        with self.assertRaises(DataError):
            train_test_split(ds, 0.0)

    def test_product_features(self):
        ds = Dataset(SparseColumnMatrix(np.array([[1.0, 2.0], [3.0, 0.0]])), np.zeros(2), ['a', 'b'])
        expanded = expand_product_features(ds, 2)

        self.assertEqual(expanded.feature_names, ['1', 'a', 'b', 'a*a', 'a*b', 'b*b'])
        np.testing.assert_array_equal(expanded.X.to_dense(), [[1.0, 1.0, 2.0, 1.0, 2.0, 4.0],
                                                              [1.0, 3.0, 0.0, 9.0, 0.0, 0.0]])

        self.assertEqual(expand_product_features(ds, 1, include_bias=False).p, 2)

        with self.assertRaises(ContractViolation):
            expand_product_features(ds, 0)


if __name__ == '__main__':
    unittest.main()
