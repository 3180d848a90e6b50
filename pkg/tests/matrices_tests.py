import unittest

import numpy as np

import scalesep._api as api
import scalesep._data as data
import scalesep.matrices as matrices


OMEGA = np.array([[0, 1], [-1, 0]])


def cofactor_det(A):
    if len(A) == 1:
        return A[0, 0]
    return sum((-1) ** j * A[0, j] * cofactor_det(np.delete(A[1:], j, axis=1)) for j in range(len(A)))


class TestSymmetrizeValidate(unittest.TestCase):
    def test_symmetric_unchanged(self):
        V = matrices.symmetrize_validate([[0.5, 0], [0, 0.5]])
        np.testing.assert_array_equal(V.entries, [[0.5, 0], [0, 0.5]])
        self.assertEqual(V.dim, 2)

    def test_near_symmetric_averaged(self):
        V = matrices.symmetrize_validate([[1, 0.2 + 1e-12], [0.2, 1]])
        self.assertEqual(V.entries[0, 1], V.entries[1, 0])
        self.assertAlmostEqual(V.entries[0, 1], 0.2 + 5e-13, places=15)

    def test_asymmetric(self):
        with self.assertRaises(api.AsymmetryError):
            matrices.symmetrize_validate([[1, 0.3], [0.1, 1]])

    def test_odd_dimension(self):
        with self.assertRaises(api.DimensionError):
            matrices.symmetrize_validate(np.eye(3))

    def test_not_square(self):
        with self.assertRaises(api.DimensionError):
            matrices.symmetrize_validate(np.zeros((2, 4)))

    def test_dimension_cap(self):
        with self.assertRaises(api.DimensionError):
            matrices.symmetrize_validate(np.eye(matrices.MAX_DIM + 2))

    def test_not_finite(self):
        for bad in (np.nan, np.inf, -np.inf):
            with self.assertRaises(api.DomainError):
                matrices.symmetrize_validate([[bad, 0], [0, 0.5]])
            with self.assertRaises(api.DomainError):
                matrices.hermitian_validate([[0.5, bad], [bad, 0.5]])
            with self.assertRaises(api.DomainError):
                data.DispersionMatrix([[0.5, 0], [0, bad]])
        with self.assertRaises(api.DomainError):
            data.DispersionMatrix(np.eye(2), [0, np.nan])

    def test_scale_free(self):
        raw = np.array([[1, 0.2 + 1e-12], [0.2, 1]])
        for scale in (1e-6, 1, 1e6):
            matrices.symmetrize_validate(scale * raw)

    def test_not_hermitian(self):
        with self.assertRaises(api.AsymmetryError):
            matrices.hermitian_validate([[1, 0.5j], [0.5j, 1]])


class TestEigenvalues(unittest.TestCase):
    def test_vacuum(self):
        C = data.HermitianMatrix(np.diag([0.5, 0.5]) + 0.5j * OMEGA)
        np.testing.assert_allclose(matrices.hermitian_eigenvalues(C), [0, 1], atol=1e-15)

    def test_identity(self):
        C = data.HermitianMatrix(np.eye(4))
        np.testing.assert_allclose(matrices.hermitian_eigenvalues(C), [1, 1, 1, 1])
        self.assertEqual(matrices.min_eigenvalue(C), 1)

    def test_product_is_determinant(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            dim = 2 * rng.integers(1, 5)
            A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            C = data.HermitianMatrix(A + A.conj().T)
            eigenvalues = matrices.hermitian_eigenvalues(C)
            scale = max(1, np.max(np.abs(eigenvalues))) ** dim
            self.assertAlmostEqual(np.prod(eigenvalues), matrices.determinant(C), delta=1e-9 * scale)


class TestDeterminant(unittest.TestCase):
    def test_examples(self):
        self.assertAlmostEqual(matrices.determinant(data.HermitianMatrix(np.eye(4))), 1)
        self.assertAlmostEqual(matrices.determinant(data.HermitianMatrix(np.diag([0.5, 0.5]) + 0.5j * OMEGA)), 0)
        self.assertAlmostEqual(matrices.determinant(data.HermitianMatrix(np.diag([1, 1]) + 0.5j * OMEGA)), 0.75)

    def test_cofactor_expansion(self):
        rng = np.random.default_rng(1)
        for dim in (2, 4, 6):
            for _ in range(20):
                A = rng.uniform(-1, 1, size=(dim, dim))
                A = A + A.T
                expected = cofactor_det(A)
                self.assertAlmostEqual(matrices.determinant(data.HermitianMatrix(A)), expected,
                                       delta=1e-12 * max(1, abs(expected)))

    def test_returns_real(self):
        self.assertIsInstance(matrices.determinant(data.HermitianMatrix(np.eye(2))), float)


class TestLeadingPrincipalMinors(unittest.TestCase):
    def test_examples(self):
        np.testing.assert_allclose(matrices.leading_principal_minors(data.HermitianMatrix(np.eye(4))), [1, 1, 1, 1])

        sigma = np.kron(np.eye(2), OMEGA)
        vacuum = data.HermitianMatrix(np.eye(4) / 2 + 0.5j * sigma)
        np.testing.assert_allclose(matrices.leading_principal_minors(vacuum), [0.5, 0, 0, 0], atol=1e-15)

        thermal = data.HermitianMatrix(np.eye(4) + 0.5j * sigma)
        np.testing.assert_allclose(matrices.leading_principal_minors(thermal), [1, 0.75, 0.75, 0.5625])

    def test_agree_with_eigenvalues(self):
        rng = np.random.default_rng(2)
        checked = 0
        for _ in range(1000):
            dim = 2 * rng.integers(1, 5)
            A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            C = data.HermitianMatrix(A @ A.conj().T - rng.uniform(0, 1) * dim * np.eye(dim))
            eigenvalues = matrices.hermitian_eigenvalues(C)
            minors = matrices.leading_principal_minors(C)
            if np.min(np.abs(eigenvalues)) < 1e-6 or np.min(np.abs(minors)) < 1e-9:
                continue
            checked += 1
            self.assertEqual(eigenvalues[0] > 0, all(m > 0 for m in minors))
        self.assertGreater(checked, 800)


if __name__ == "__main__":
    unittest.main()
