import unittest

import numpy as np

import scalesep._api as api
import scalesep._data as data
import scalesep.gaussian as gaussian
import scalesep.matrices as matrices
import scalesep.uncertainty as uncertainty


class TestBuildUncertainty(unittest.TestCase):
    def test_vacuum(self):
        C = uncertainty.build_uncertainty(uncertainty.vacuum(1))
        np.testing.assert_array_equal(C.entries, [[0.5, 0.5j], [-0.5j, 0.5]])

    def test_thermal_determinant(self):
        C = uncertainty.build_uncertainty(data.DispersionMatrix(np.eye(4)))
        self.assertAlmostEqual(matrices.determinant(C), 0.5625)

    def test_pure_gaussian(self):
        C = uncertainty.build_uncertainty(gaussian.pure_covariance((0.5, 0.5, 0.4)))
        self.assertAlmostEqual(matrices.determinant(C), 0, delta=1e-10)
        self.assertAlmostEqual(matrices.min_eigenvalue(C), 0, delta=1e-10)

    def test_linear(self):
        rng = np.random.default_rng(0)
        sigma = uncertainty.symplectic_form(2).matrix
        for _ in range(20):
            V1 = uncertainty.random_physical_state(2, rng.integers(2 ** 32))
            V2 = uncertainty.random_physical_state(2, rng.integers(2 ** 32))
            a, b = rng.uniform(0, 2, size=2)
            combined = data.DispersionMatrix(a * V1.matrix + b * V2.matrix)
            C = uncertainty.build_uncertainty(combined)
            np.testing.assert_allclose(C.entries - 0.5j * sigma, a * V1.matrix + b * V2.matrix)

    def test_raw_arrays_validated(self):
        with self.assertRaises(api.AsymmetryError):
            uncertainty.build_uncertainty([[1, 0.3], [0.1, 1]])


class TestSymplecticForm(unittest.TestCase):
    def test_properties(self):
        for n in (1, 2, 3):
            sigma = uncertainty.symplectic_form(n).matrix
            np.testing.assert_array_equal(sigma.T, -sigma)
            np.testing.assert_array_equal(sigma @ sigma, -np.eye(2 * n))

    def test_interleaved(self):
        sigma = uncertainty.symplectic_form(2).matrix
        self.assertEqual(sigma[0, 1], 1)
        self.assertEqual(sigma[2, 3], 1)
        self.assertEqual(sigma[0, 3], 0)


class TestRsCheck(unittest.TestCase):
    def test_vacuum(self):
        report = uncertainty.rs_check(uncertainty.vacuum(1))
        self.assertTrue(report.physical)
        self.assertAlmostEqual(report.min_eig, 0)
        self.assertAlmostEqual(report.det_c, 0)

    def test_squeezed_below_vacuum(self):
        report = uncertainty.rs_check(data.DispersionMatrix(np.diag([0.1, 0.1])))
        self.assertFalse(report.physical)
        self.assertAlmostEqual(report.min_eig, -0.4)

    def test_pure_gaussian(self):
        report = uncertainty.rs_check(gaussian.pure_covariance((0.5, 0.5, 0.4)))
        self.assertTrue(report.physical)
        self.assertAlmostEqual(report.det_c, 0, delta=1e-10)

    def test_block_minors(self):
        report = uncertainty.rs_check(uncertainty.thermal([1, 2]))
        np.testing.assert_allclose(report.block_minors, [1, 4])

    def test_invariant_under_symplectic(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            n = rng.integers(1, 4)
            V = uncertainty.random_physical_state(n, rng.integers(2 ** 32), max_squeezing=0.5)
            T = uncertainty.random_symplectic(n, rng.integers(2 ** 32), max_squeezing=0.5)
            before = uncertainty.rs_check(V)
            after = uncertainty.rs_check(uncertainty.apply_symplectic(V, T))
            self.assertEqual(before.physical, after.physical)
            moved = uncertainty.apply_symplectic(V, T)
            scale = max(1, np.max(np.abs(moved.matrix))) ** moved.dim
            self.assertAlmostEqual(after.det_c, before.det_c, delta=1e-10 * scale)


class TestDetVBound(unittest.TestCase):
    def test_vacuum_equality(self):
        for n in (1, 2, 3):
            bound = uncertainty.det_v_bound(uncertainty.vacuum(n))
            self.assertTrue(bound.holds)
            self.assertEqual(bound.bound, 4.0 ** -n)
            self.assertAlmostEqual(bound.det_v, bound.bound, delta=1e-10)

    def test_thermal(self):
        bound = uncertainty.det_v_bound(data.DispersionMatrix(np.eye(4)))
        self.assertAlmostEqual(bound.det_v, 1)
        self.assertEqual(bound.bound, 1 / 16)
        self.assertTrue(bound.holds)

    def test_pure_gaussian_equality(self):
        bound = uncertainty.det_v_bound(gaussian.pure_covariance((0.5, 0.5, 0.4)))
        self.assertAlmostEqual(bound.det_v, 1 / 16, delta=1e-10)
        self.assertTrue(bound.holds)

    def test_unphysical(self):
        with self.assertRaises(api.PreconditionError):
            uncertainty.det_v_bound(data.DispersionMatrix(np.diag([0.1, 0.1])))

    def test_strongly_squeezed(self):
        V = uncertainty.apply_symplectic(uncertainty.vacuum(1), uncertainty.squeezer(3.5))
        bound = uncertainty.det_v_bound(V)
        self.assertAlmostEqual(bound.det_v, 0.25, delta=1e-9)
        self.assertTrue(bound.holds)

    def test_slack_does_not_grow_with_entries(self):
        # Within a loose tolerance of physical, entries near 274, det V a quarter of the bound
        V = data.DispersionMatrix(np.diag([np.exp(-7) / 4, np.exp(7) / 4]))
        tol = data.Tolerance(rel=1e-3)
        self.assertTrue(uncertainty.rs_check(V, tol).physical)
        bound = uncertainty.det_v_bound(V, tol)
        self.assertAlmostEqual(bound.det_v, 1 / 16, delta=1e-9)
        self.assertFalse(bound.holds)

    def test_random_physical_states(self):
        rng = np.random.default_rng(2)
        for n in (1, 2, 3):
            for _ in range(1000):
                V = uncertainty.random_physical_state(n, rng.integers(2 ** 32))
                self.assertTrue(uncertainty.det_v_bound(V).holds)


class TestSingleModeChecks(unittest.TestCase):
    def test_vacuum(self):
        report = uncertainty.single_mode_checks(0.5, 0.5, 0)
        self.assertTrue(report.heisenberg)
        self.assertTrue(report.rs)

    def test_correlated(self):
        report = uncertainty.single_mode_checks(1.0, 1.0, 0.9)
        self.assertTrue(report.heisenberg)
        self.assertFalse(report.rs)

    def test_too_narrow(self):
        report = uncertainty.single_mode_checks(0.2, 0.2, 0)
        self.assertFalse(report.heisenberg)
        self.assertFalse(report.rs)

    def test_means_ignored(self):
        self.assertEqual(uncertainty.single_mode_checks(1.0, 1.0, 0.9, c1=3.0, c2=-1.0),
                         uncertainty.single_mode_checks(1.0, 1.0, 0.9))

    def test_negative_variance(self):
        with self.assertRaises(api.PreconditionError):
            uncertainty.single_mode_checks(-0.5, 0.5, 0)

    def test_heisenberg_not_invariant(self):
        V = data.DispersionMatrix(np.diag([2, 0.2]))
        rotated = uncertainty.apply_symplectic(V, uncertainty.rotation(np.pi / 4)).matrix
        self.assertAlmostEqual(rotated[0, 0] * rotated[1, 1], 1.21)
        self.assertAlmostEqual(rotated[0, 0] * rotated[1, 1] - rotated[0, 1] ** 2, 0.4)


class TestApplySymplectic(unittest.TestCase):
    def test_identity(self):
        V = uncertainty.random_physical_state(2, 3)
        same = uncertainty.apply_symplectic(V, data.SymplecticTransform(np.eye(4)))
        np.testing.assert_array_equal(same.matrix, V.matrix)
        np.testing.assert_array_equal(same.mean, V.mean)

    def test_quarter_rotation(self):
        V = data.DispersionMatrix(np.diag([2.0, 0.3]))
        rotated = uncertainty.apply_symplectic(V, uncertainty.rotation(np.pi / 2))
        np.testing.assert_allclose(rotated.matrix, np.diag([0.3, 2.0]), atol=1e-15)

    def test_shift(self):
        T = uncertainty.embed(data.SymplecticTransform(np.eye(2), [1.0, -2.0]), 2, 2)
        V = uncertainty.apply_symplectic(uncertainty.vacuum(2), T)
        np.testing.assert_array_equal(V.mean, [0, 0, 1, -2])

    def test_not_symplectic(self):
        with self.assertRaises(api.SymplecticError):
            data.SymplecticTransform(np.diag([2.0, 2.0]))

    def test_dimension_mismatch(self):
        with self.assertRaises(api.DimensionError):
            uncertainty.apply_symplectic(uncertainty.vacuum(2), uncertainty.rotation(0.3))


class TestRandomSymplectic(unittest.TestCase):
    def test_deterministic(self):
        a = uncertainty.random_symplectic(1, 42)
        b = uncertainty.random_symplectic(1, 42)
        np.testing.assert_array_equal(a.S, b.S)
        np.testing.assert_array_equal(a.shift, b.shift)

    def test_symplectic(self):
        for n in (1, 2, 3):
            sigma = uncertainty.symplectic_form(n).matrix
            for seed in range(10):
                S = uncertainty.random_symplectic(n, seed).S
                np.testing.assert_allclose(S.T @ sigma @ S, sigma, atol=1e-10 * np.max(np.abs(S)) ** 2)
                self.assertAlmostEqual(abs(np.linalg.det(S)), 1, delta=1e-9)

    def test_composition(self):
        first = uncertainty.random_symplectic(2, 1)
        second = uncertainty.random_symplectic(2, 2)
        composed = uncertainty.compose(first, second)
        V = uncertainty.random_physical_state(2, 3)
        np.testing.assert_allclose(uncertainty.apply_symplectic(V, composed).matrix,
                                   uncertainty.apply_symplectic(uncertainty.apply_symplectic(V, first), second).matrix,
                                   rtol=1e-10, atol=1e-10)

    def test_no_modes(self):
        with self.assertRaises(api.DimensionError):
            uncertainty.random_symplectic(0, 1)


class TestStates(unittest.TestCase):
    def test_direct_sum(self):
        V = uncertainty.direct_sum(uncertainty.thermal([1]), gaussian.pure_covariance((0.5, 0.5, 0.4)))
        self.assertEqual(V.n_modes, 3)
        np.testing.assert_array_equal(V.block(1), np.eye(2))
        np.testing.assert_array_equal(V.block(1, 2), np.zeros((2, 2)))
        np.testing.assert_allclose(V.block(3, 3)[0, 0], 0.25)

    def test_thermal_physical(self):
        self.assertTrue(uncertainty.rs_check(uncertainty.thermal([0.5, 3])).physical)
        self.assertFalse(uncertainty.rs_check(uncertainty.thermal([0.4, 3])).physical)


if __name__ == "__main__":
    unittest.main()
