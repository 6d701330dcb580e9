import unittest

import numpy as np

from src.exceptions import NotPositiveDefiniteError, ZeroVectorError
from src.linalg.dense_linalg import SymMatrix, jacobi_eigs
from src.models.direction import (GammaCase, GammaParams, blend_weights, build_B, compute_direction, cos_theta,
                                  select_gamma, steepest_direction)

EPS = np.finfo(float).eps


def random_spectrum(rng, n):
    """Eigenvalues of both signs with magnitudes spanning 1e-12..1e12."""
    signs = rng.choice([-1.0, 1.0], size=n)
    return np.sort(signs * 10.0 ** rng.uniform(-12, 12, size=n))


def blended_spectrum(lam, p):
    gamma, weight, _ = blend_weights(lam[0], lam[-1], p)
    blended = gamma + weight * lam
    # one rounding each in gamma, weight, the product and the sum
    floor = 8 * EPS * (gamma + weight * np.abs(lam))
    return blended, floor


class TestGammaParams(unittest.TestCase):

    def test_validation(self):
        with self.assertRaises(ValueError):
            GammaParams(delta=0.0)
        with self.assertRaises(ValueError):
            GammaParams(delta=1.0)
        with self.assertRaises(ValueError):
            GammaParams(cap=0.5)
        with self.assertRaises(ValueError):
            GammaParams(cap=np.inf)

    def test_settings_defaults(self):
        p = GammaParams.from_settings()
        self.assertEqual(p.delta, 1e-8)
        self.assertEqual(p.cap, 1e12)


class TestSelectGamma(unittest.TestCase):

    def setUp(self):
        self.p = GammaParams(delta=1e-8, cap=1e12)

    def test_newton_regime(self):
        self.assertEqual(select_gamma(2.0, 4.0, self.p), (0.0, GammaCase.ZERO))

    def test_max_ab(self):
        gamma, case = select_gamma(-1.0, 1.0, self.p)
        self.assertIs(case, GammaCase.MAX_AB)
        self.assertAlmostEqual(gamma, 0.500000005, places=15)
        self.assertAlmostEqual((2 * gamma - 1) / 1e-8, 1.0, delta=1e-7)

    def test_condition_bound(self):
        gamma, case = select_gamma(0.5, 1e13, self.p)
        self.assertIs(case, GammaCase.B)
        self.assertAlmostEqual(gamma, 9.5e12 / (1e12 - 1 + 9.5e12), places=12)
        self.assertAlmostEqual(gamma, 0.904762, places=6)
        cond = (gamma + (1 - gamma) * 1e13) / (gamma + (1 - gamma) * 0.5)
        self.assertAlmostEqual(cond / 1e12, 1.0, delta=1e-6)

    def test_lower_bound(self):
        gamma, case = select_gamma(5e-9, 100.0, self.p)
        self.assertIs(case, GammaCase.A)
        self.assertAlmostEqual(gamma, (1e-8 - 5e-9) / (1 - 5e-9), delta=1e-22)

    def test_rejects_inverted_interval(self):
        with self.assertRaises(ValueError):
            select_gamma(2.0, 1.0, self.p)

    def test_continuous_across_case_boundaries(self):
        step = 1e-13
        for lo, hi in ((1e-8, 1.0), (1e-3, 1e9), (1e-8, 1e4)):
            below, _ = select_gamma(lo * (1 - step), hi, self.p)
            above, _ = select_gamma(lo * (1 + step), hi, self.p)
            self.assertAlmostEqual(below, above, delta=1e-9)
        for lo in (1e-6, 1.0, 5.0):
            hi = lo * self.p.cap
            below, _ = select_gamma(lo, hi * (1 - step), self.p)
            above, _ = select_gamma(lo, hi * (1 + step), self.p)
            self.assertAlmostEqual(below, above, delta=1e-9)

    def test_weight_is_exact_complement(self):
        gamma, weight, case = blend_weights(-1.0, 1.0, self.p)
        self.assertIs(case, GammaCase.MAX_AB)
        self.assertEqual(weight, (1 - 1e-8) / 2)
        self.assertAlmostEqual(gamma + weight, 1.0, delta=2 * EPS)
        self.assertEqual(blend_weights(2.0, 4.0, self.p), (0.0, 1.0, GammaCase.ZERO))

    def test_weight_keeps_digits_for_large_negative_curvature(self):
        for lam_min in (-1e10, -1e12):
            gamma, weight, _ = blend_weights(lam_min, 1.0, self.p)
            self.assertAlmostEqual(weight / ((1 - 1e-8) / (1 - lam_min)), 1.0, delta=4 * EPS)
            self.assertAlmostEqual(gamma + weight * lam_min, self.p.delta, delta=1e-14)

    def test_spectrum_bounds_on_random_spectra(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            n = int(rng.integers(1, 16))
            lam = random_spectrum(rng, n)
            gamma, _ = select_gamma(lam[0], lam[-1], self.p)
            self.assertTrue(0.0 <= gamma <= 1.0)
            blended, floor = blended_spectrum(lam, self.p)
            lo, hi = int(np.argmin(blended)), int(np.argmax(blended))
            self.assertGreater(blended[lo], 0.0, msg=lam)
            self.assertGreaterEqual(blended[lo], self.p.delta * (1 - 1e-9) - floor[lo], msg=lam)
            self.assertLessEqual(blended[hi] - floor[hi], self.p.cap * (1 + 1e-9) * (blended[lo] + floor[lo]),
                                 msg=lam)

    def test_spectrum_bounds_on_dense_matrices(self):
        p = GammaParams(delta=1e-2, cap=1e4)
        rng = np.random.default_rng(12)
        cases = set()
        for _ in range(500):
            n = int(rng.integers(2, 16))
            signs = np.ones(n) if rng.random() < 0.5 else rng.choice([-1.0, 1.0], size=n)
            lam = signs * 10.0 ** rng.uniform(-3, 3, size=n)
            q, _ = np.linalg.qr(rng.standard_normal((n, n)))
            h = SymMatrix(q @ np.diag(lam) @ q.T)
            values = jacobi_eigs(h)[0]
            gamma, weight, case = blend_weights(values[0], values[-1], p)
            cases.add(case)
            blended = np.linalg.eigvalsh(build_B(h, gamma, weight).entries)
            self.assertGreaterEqual(blended[0], p.delta * (1 - 1e-8))
            self.assertLessEqual(blended[-1] / blended[0], p.cap * (1 + 1e-8))
        self.assertEqual(cases, {GammaCase.ZERO, GammaCase.A, GammaCase.B, GammaCase.MAX_AB})


class TestBuildB(unittest.TestCase):

    def test_endpoints(self):
        h = SymMatrix(np.array([[2.0, 1.0], [1.0, -3.0]]))
        np.testing.assert_array_equal(build_B(h, 0.0).entries, h.entries)
        np.testing.assert_array_equal(build_B(h, 1.0).entries, np.eye(2))

    def test_blend_of_indefinite_diagonal(self):
        b = build_B(SymMatrix.diag([-1.0, 1.0]), (1 + 1e-8) / 2)
        np.testing.assert_allclose(np.diag(b.entries), [1e-8, 1.0], rtol=1e-7)

    def test_rejects_gamma_outside_unit_interval(self):
        with self.assertRaises(ValueError):
            build_B(SymMatrix.identity(2), 1.5)


class TestCosTheta(unittest.TestCase):

    def test_examples(self):
        self.assertAlmostEqual(cos_theta([1.0, 2.0], [-1.0, -2.0]), 1.0)
        self.assertAlmostEqual(cos_theta([1.0, 0.0], [0.0, 1.0]), 0.0)
        self.assertAlmostEqual(cos_theta([1.0, 0.0], [-1.0, -1.0]), 1 / np.sqrt(2.0))

    def test_zero_vector(self):
        with self.assertRaises(ZeroVectorError):
            cos_theta([0.0, 0.0], [1.0, 0.0])


class TestComputeDirection(unittest.TestCase):

    def setUp(self):
        self.p = GammaParams()

    def test_identity_hessian(self):
        info = compute_direction([3.0, -4.0], SymMatrix.identity(2), self.p, (1.0, 1.0))
        self.assertEqual(info.gamma, 0.0)
        np.testing.assert_allclose(info.d, [-3.0, 4.0])
        self.assertAlmostEqual(info.cos_theta, 1.0)
        self.assertFalse(info.fallback_used)

    def test_indefinite_hessian(self):
        info = compute_direction([1.0, 1.0], SymMatrix.diag([-1.0, 1.0]), self.p, (-1.0, 1.0))
        np.testing.assert_allclose(info.d, [-1e8, -1.0], rtol=1e-6)
        self.assertGreater(info.cos_theta, 0.0)

    def test_newton_step(self):
        info = compute_direction([2.0, 4.0], SymMatrix.diag([2.0, 4.0]), self.p, (2.0, 4.0))
        self.assertEqual(info.gamma, 0.0)
        np.testing.assert_allclose(info.d, [-1.0, -1.0])

    def test_wrong_eigenvalues_propagate(self):
        # an interior eigenvalue reported as the minimum leaves B_k indefinite
        with self.assertRaises(NotPositiveDefiniteError):
            compute_direction([1.0, 1.0, 1.0], SymMatrix.diag([-2.0, 0.5, 1.0]), self.p, (0.5, 1.0))

    def test_direction_quality_on_random_diagonals(self):
        rng = np.random.default_rng(8)
        for _ in range(500):
            n = int(rng.integers(1, 16))
            lam = random_spectrum(rng, n)
            h = SymMatrix.diag(rng.permutation(lam))
            g = rng.standard_normal(n)
            info = compute_direction(g, h, self.p, (lam[0], lam[-1]))
            self.assertLess(g @ info.d, 0.0)
            self.assertGreaterEqual(info.cos_theta, (1 - 1e-6) / self.p.cap)

    def test_direction_quality_on_rotated_matrices(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            n = int(rng.integers(2, 16))
            lam = np.sort(rng.choice([-1.0, 1.0], size=n) * 10.0 ** rng.uniform(-4, 4, size=n))
            q, _ = np.linalg.qr(rng.standard_normal((n, n)))
            h = SymMatrix(q @ np.diag(lam) @ q.T)
            values = jacobi_eigs(h)[0]
            g = rng.standard_normal(n)
            info = compute_direction(g, h, self.p, (values[0], values[-1]))
            self.assertLess(g @ info.d, 0.0)
            self.assertGreaterEqual(info.cos_theta, (1 - 1e-6) / self.p.cap)

    def test_steepest(self):
        info = steepest_direction([1.0, -2.0], rung=3)
        np.testing.assert_array_equal(info.d, [-1.0, 2.0])
        self.assertEqual(info.gamma, 1.0)
        self.assertIs(info.gamma_case, GammaCase.STEEPEST)
        self.assertTrue(info.fallback_used)


if __name__ == '__main__':
    unittest.main()
