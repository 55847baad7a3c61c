import unittest

import numpy as np
import numpy.testing as npt
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import DimMismatch, FractionalPowerOfIndefinite, NegativePowerOfSingular, NonFinite
from matcore import (
    PsdVerdict,
    SymMatrix,
    check_psd,
    difference_report,
    gen_loewner_pair,
    gram_power,
    loewner_ge,
    matrix_power,
    random_orthogonal,
    random_pd,
    random_psd,
    random_symmetric,
    relative_error,
    spectral_decompose,
)


class SymMatrixTests(unittest.TestCase):
    def test_input_is_averaged_with_its_transpose(self):
        m = SymMatrix([[1.0, 2.0], [4.0, 5.0]])
        npt.assert_array_equal(m.entries, [[1.0, 3.0], [3.0, 5.0]])
        self.assertEqual(m.raw_asymmetry, 2.0)

    def test_entries_are_read_only(self):
        m = SymMatrix.identity(2)
        with self.assertRaises(ValueError):
            m.entries[0, 0] = 5.0
        copy = m.to_array()
        copy[0, 0] = 5.0
        self.assertEqual(m.entries[0, 0], 1.0)

    def test_rejects_non_square_and_non_finite(self):
        with self.assertRaises(DimMismatch):
            SymMatrix(np.ones((2, 3)))
        with self.assertRaises(NonFinite):
            SymMatrix([[1.0, np.nan], [np.nan, 1.0]])

    def test_arithmetic_requires_same_dimension(self):
        with self.assertRaises(DimMismatch):
            SymMatrix.identity(2) + SymMatrix.identity(3)
        npt.assert_array_equal((2 * SymMatrix.identity(2) - SymMatrix.ones(2)).entries, [[1, -1], [-1, 1]])


class SpectralDecompositionTests(unittest.TestCase):
    def test_identity(self):
        npt.assert_allclose(spectral_decompose(SymMatrix.identity(3)).eigenvalues, [1.0, 1.0, 1.0])

    def test_diagonal_eigenvectors_are_signed_identity(self):
        decomposition = spectral_decompose(SymMatrix.diag([1.0, 2.0]))
        npt.assert_allclose(decomposition.eigenvalues, [1.0, 2.0])
        npt.assert_allclose(np.abs(decomposition.eigenvectors), np.eye(2))

    def test_random_reconstruction(self):
        m = random_symmetric(np.random.default_rng(3), 6)
        decomposition = spectral_decompose(m)
        self.assertLessEqual(np.max(np.abs(decomposition.reconstruct() - m.entries)), 1e-12 * 6)
        self.assertIs(spectral_decompose(m), decomposition)

    @given(seed=st.integers(0, 10 ** 6), dim=st.integers(1, 8))
    @settings(deadline=None, max_examples=50)
    def test_orthonormal_eigenvectors_and_frobenius_reconstruction(self, seed, dim):
        rng = np.random.default_rng(seed)
        q = random_orthogonal(rng, dim)
        m = SymMatrix((q * rng.uniform(-5.0, 5.0, size=dim)) @ q.T)
        decomposition = spectral_decompose(m)
        v = decomposition.eigenvectors
        self.assertLessEqual(np.max(np.abs(v.T @ v - np.eye(dim))), 1e-12)
        error = np.linalg.norm(decomposition.reconstruct() - m.entries)
        self.assertLessEqual(error, 1e-12 * max(1.0, np.linalg.norm(m.entries)))


class MatrixPowerTests(unittest.TestCase):
    def test_examples(self):
        npt.assert_allclose(matrix_power(SymMatrix.identity(2), 0.5).entries, np.eye(2))
        npt.assert_allclose(matrix_power(SymMatrix.diag([1.0, 4.0]), 0.5).entries, np.diag([1.0, 2.0]))
        npt.assert_allclose(matrix_power(SymMatrix.diag([1.0, 2.0]), 2.5).entries,
                            np.diag([1.0, 2.0 ** 2.5]), rtol=1e-14)

    def test_zero_exponent_is_identity_even_for_singular(self):
        npt.assert_array_equal(matrix_power(SymMatrix.zeros(2), 0.0).entries, np.eye(2))

    def test_negative_power_of_singular(self):
        with self.assertRaises(NegativePowerOfSingular):
            matrix_power(SymMatrix.diag([1.0, 0.0]), -0.5)

    def test_fractional_power_of_indefinite(self):
        with self.assertRaises(FractionalPowerOfIndefinite):
            matrix_power(SymMatrix.diag([1.0, -1.0]), 0.5)

    def test_integer_power_of_indefinite(self):
        npt.assert_allclose(matrix_power(SymMatrix.diag([2.0, -1.0]), 3).entries, np.diag([8.0, -1.0]))

    def test_tiny_negative_eigenvalues_are_clamped(self):
        m = SymMatrix.diag([1.0, -1e-14])
        npt.assert_allclose(matrix_power(m, 0.5).entries, np.diag([1.0, 0.0]))

    @given(seed=st.integers(0, 10 ** 6), alpha=st.floats(-2.0, 2.0), beta=st.floats(-2.0, 2.0))
    @settings(deadline=None, max_examples=50)
    def test_power_law(self, seed, alpha, beta):
        a = random_pd(np.random.default_rng(seed), 4, 0.5, 3.0)
        product = matrix_power(a, alpha).entries @ matrix_power(a, beta).entries
        self.assertLessEqual(relative_error(product, matrix_power(a, alpha + beta)), 1e-9)

    def test_gram_power_matches_power_of_product(self):
        rng = np.random.default_rng(11)
        f = (random_orthogonal(rng, 4) * [2.0, 1.5, 1.0, 0.5]) @ random_orthogonal(rng, 4).T
        for alpha in (0.25, 0.5, 1.0, 1.7):
            expected = matrix_power(SymMatrix(f @ f.T), alpha)
            self.assertLessEqual(relative_error(gram_power(f, alpha), expected), 1e-10)

    def test_gram_power_of_rank_deficient_factor(self):
        f = np.array([[1.0, 0.0], [1.0, 0.0]])
        npt.assert_allclose(gram_power(f, 0.5).entries, np.ones((2, 2)) / np.sqrt(2.0), atol=1e-12)


class PsdTests(unittest.TestCase):
    def test_verdicts(self):
        self.assertIs(check_psd(SymMatrix.identity(2)).verdict, PsdVerdict.POSITIVE_DEFINITE)
        ones = check_psd(SymMatrix.ones(2))
        self.assertIs(ones.verdict, PsdVerdict.POSITIVE_SEMIDEFINITE)
        self.assertAlmostEqual(ones.min_eigenvalue, 0.0, delta=1e-12)
        self.assertIs(check_psd(SymMatrix.diag([1.0, -1.0])).verdict, PsdVerdict.INDEFINITE)

    def test_tolerance_scales_with_norm(self):
        report = check_psd(SymMatrix.diag([100.0, 1.0]), tol_scale=1e-10)
        self.assertAlmostEqual(report.tolerance_used, 1e-8)
        self.assertEqual(report.scale, 100.0)
        small = check_psd(SymMatrix.diag([0.1, 0.2]), tol_scale=1e-10)
        self.assertAlmostEqual(small.tolerance_used, 1e-10)

    def test_loewner_examples(self):
        a = SymMatrix.diag([3.0, 1.0])
        reflexive = loewner_ge(a, a)
        self.assertIs(reflexive.verdict, PsdVerdict.POSITIVE_SEMIDEFINITE)
        self.assertEqual(reflexive.min_eigenvalue, 0.0)
        report = loewner_ge(SymMatrix.diag([2.0, 2.0]), SymMatrix.ones(2))
        self.assertTrue(report.is_psd)
        npt.assert_allclose(spectral_decompose(SymMatrix.diag([2.0, 2.0]) - SymMatrix.ones(2)).eigenvalues,
                            [0.0, 2.0], atol=1e-14)

    def test_adding_a_gram_matrix(self):
        rng = np.random.default_rng(5)
        b = random_symmetric(rng, 4)
        c = rng.standard_normal((4, 4))
        self.assertTrue(loewner_ge(SymMatrix(b.entries + c.T @ c), b).is_psd)

    def test_difference_report_uses_larger_side(self):
        report = difference_report(SymMatrix.diag([50.0, 2.0]), SymMatrix.diag([1.0, 1.0]))
        self.assertEqual(report.scale, 50.0)
        self.assertAlmostEqual(report.normalized_min, 1.0 / 50.0)

    @given(seed=st.integers(0, 10 ** 6), dim=st.integers(2, 6),
           verdict=st.sampled_from(list(PsdVerdict)))
    @settings(deadline=None, max_examples=60)
    def test_verdict_survives_orthogonal_conjugation(self, seed, dim, verdict):
        rng = np.random.default_rng(seed)
        eigenvalues = rng.uniform(0.1, 3.0, size=dim)
        if verdict is PsdVerdict.POSITIVE_SEMIDEFINITE:
            eigenvalues[0] = 0.0
        elif verdict is PsdVerdict.INDEFINITE:
            eigenvalues[0] = -rng.uniform(0.1, 3.0)
        q = random_orthogonal(rng, dim)
        conjugated = SymMatrix((q * eigenvalues) @ q.T)
        self.assertEqual(check_psd(SymMatrix.diag(eigenvalues)).verdict, verdict)
        self.assertEqual(check_psd(conjugated).verdict, verdict)


class GeneratorTests(unittest.TestCase):
    def test_pairs_are_ordered_for_a_seed_sweep(self):
        for seed in range(100):
            a, b = gen_loewner_pair(seed, 3)
            self.assertIs(check_psd(a).verdict, PsdVerdict.POSITIVE_DEFINITE)
            self.assertTrue(loewner_ge(a, b).is_psd, f"seed {seed}")

    def test_pairs_are_deterministic(self):
        a1, b1 = gen_loewner_pair(42, 4)
        a2, b2 = gen_loewner_pair(42, 4)
        npt.assert_array_equal(a1.entries, a2.entries)
        npt.assert_array_equal(b1.entries, b2.entries)

    def test_random_pd_eigenvalue_range(self):
        eigenvalues = spectral_decompose(random_pd(np.random.default_rng(0), 5, 1.0, 3.0)).eigenvalues
        self.assertGreaterEqual(eigenvalues[0], 1.0 - 1e-12)
        self.assertLessEqual(eigenvalues[-1], 3.0 + 1e-12)

    def test_random_psd_rank(self):
        m = random_psd(np.random.default_rng(0), 4, rank=2)
        eigenvalues = spectral_decompose(m).eigenvalues
        npt.assert_allclose(eigenvalues[:2], [0.0, 0.0], atol=1e-12)
        self.assertTrue(check_psd(m).is_psd)


if __name__ == '__main__':
    unittest.main()
