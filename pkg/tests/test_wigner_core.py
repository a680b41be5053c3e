#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Wigner 函数与闭式卷积测试
Wigner Core Tests
"""

import itertools
import math
import os
import sys
import unittest

import numpy as np

# 添加项目路径
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.errors import CapabilityError, DomainError
from src.wigner_core import (PhotonMixture, QuadraturePoint, RadialPolyGaussian, apply_loss,
                             convolve, evaluate, fock_pair_overlap, fock_wigner, is_nonnegative,
                             mixture_wigner, radial_profile)
from tests.oracles import displacement_element, grid_convolution, wigner_transform

IMPERFECT = PhotonMixture.from_dict({0: 0.25, 1: 0.73, 2: 0.02})
ORIGIN = QuadraturePoint(0.0, 0.0)


class TestFockWigner(unittest.TestCase):
    """Fock 态与混合态 Wigner 函数"""

    def test_origin_values(self):
        """原点值为 (-1)^n/π"""
        self.assertAlmostEqual(evaluate(fock_wigner(0), ORIGIN), 1.0 / math.pi, places=14)
        self.assertAlmostEqual(evaluate(fock_wigner(1), ORIGIN), -1.0 / math.pi, places=14)

    def test_single_photon_zero_ring(self):
        """单光子 Wigner 函数在 s = 1/2 处为零"""
        pt = QuadraturePoint(math.sqrt(0.5), 0.0)
        self.assertAlmostEqual(evaluate(fock_wigner(1), pt), 0.0, places=14)

    def test_direct_formula(self):
        self.assertAlmostEqual(evaluate(fock_wigner(0), QuadraturePoint(1.0, 0.0)),
                               math.exp(-1.0) / math.pi, places=14)
        self.assertAlmostEqual(evaluate(fock_wigner(1), QuadraturePoint(2.0, 0.0)),
                               7.0 * math.exp(-4.0) / math.pi, places=14)

    def test_matches_wigner_transform(self):
        """与波函数数值 Wigner 变换一致"""
        for n, (x, p) in itertools.product(range(4), [(0.0, 0.0), (0.3, -0.4), (1.1, 0.7)]):
            with self.subTest(n=n, x=x, p=p):
                self.assertAlmostEqual(evaluate(fock_wigner(n), QuadraturePoint(x, p)),
                                       wigner_transform(n, x, p), places=9)

    def test_radial_symmetry(self):
        f = mixture_wigner(IMPERFECT)
        s = 1.3
        values = [evaluate(f, QuadraturePoint(math.sqrt(s) * math.cos(t), math.sqrt(s) * math.sin(t)))
                  for t in np.linspace(0.0, 2.0 * math.pi, 7)]
        for value in values:
            self.assertAlmostEqual(value, values[0], places=14)

    def test_mixture_origin(self):
        self.assertAlmostEqual(evaluate(mixture_wigner(IMPERFECT), ORIGIN), -0.46 / math.pi, places=14)
        half = PhotonMixture.from_dict({0: 0.5, 1: 0.5})
        self.assertAlmostEqual(evaluate(mixture_wigner(half), ORIGIN), 0.0, places=14)

    def test_singleton_mixture(self):
        self.assertEqual(mixture_wigner(PhotonMixture.fock(0)), fock_wigner(0))

    def test_normalization(self):
        """任意混合态 Wigner 函数积分为1"""
        mixtures = [PhotonMixture.fock(n) for n in range(9)] + [
            IMPERFECT, PhotonMixture.from_dict({0: 0.1, 3: 0.4, 8: 0.5})]
        for mix in mixtures:
            with self.subTest(mix=mix):
                self.assertAlmostEqual(mixture_wigner(mix).integral(), 1.0, delta=1e-10)

    def test_capability_limit(self):
        fock_wigner(8)
        with self.assertRaises(CapabilityError):
            fock_wigner(9)

    def test_invalid_mixture(self):
        with self.assertRaises(DomainError):
            PhotonMixture.from_dict({0: 0.5, 1: 0.4})
        with self.assertRaises(DomainError):
            PhotonMixture.from_dict({0: 1.2, 1: -0.2})
        with self.assertRaises(DomainError):
            PhotonMixture(())


class TestLoss(unittest.TestCase):
    """损耗信道"""

    def test_examples(self):
        self.assertEqual(apply_loss(PhotonMixture.fock(1), 0.0).as_dict(), {1: 1.0})
        half = apply_loss(PhotonMixture.fock(1), 0.5).as_dict()
        self.assertAlmostEqual(half[0], 0.5, places=14)
        self.assertAlmostEqual(half[1], 0.5, places=14)
        two = apply_loss(PhotonMixture.fock(2), 0.25).as_dict()
        for n, expected in {0: 0.0625, 1: 0.375, 2: 0.5625}.items():
            self.assertAlmostEqual(two[n], expected, places=14)

    def test_full_loss_is_vacuum(self):
        self.assertEqual(apply_loss(IMPERFECT, 1.0).as_dict(), {0: 1.0})

    def test_composition(self):
        """两次损耗等价于一次总损耗"""
        for a, b in [(0.1, 0.2), (0.3, 0.5), (0.45, 0.05)]:
            twice = apply_loss(apply_loss(IMPERFECT, a), b)
            once = apply_loss(IMPERFECT, 1.0 - (1.0 - a) * (1.0 - b))
            for n in range(3):
                self.assertAlmostEqual(twice.probability(n), once.probability(n), delta=1e-12)

    def test_out_of_range(self):
        for loss in (-0.1, 1.5):
            with self.assertRaises(DomainError):
                apply_loss(IMPERFECT, loss)


class TestConvolution(unittest.TestCase):
    """闭式卷积"""

    def test_vacuum_pair(self):
        k = convolve(fock_wigner(0), fock_wigner(0))
        self.assertAlmostEqual(k.lam, 0.5, places=14)
        self.assertAlmostEqual(evaluate(k, ORIGIN), 1.0 / (2.0 * math.pi), places=14)

    def test_single_photon_pair_origin(self):
        k = convolve(fock_wigner(1), fock_wigner(1))
        self.assertAlmostEqual(evaluate(k, ORIGIN), 1.0 / (2.0 * math.pi), places=13)

    def test_mass_is_product(self):
        a = mixture_wigner(IMPERFECT).scaled(2.0)
        b = fock_wigner(2).scaled(0.5)
        self.assertAlmostEqual(convolve(a, b).integral(), a.integral() * b.integral(), delta=1e-9)
        c = RadialPolyGaussian(0.7, (0.3, -0.2, 0.05))
        self.assertAlmostEqual(convolve(c, b).integral(), c.integral() * b.integral(), delta=1e-9)

    def test_nonnegative_for_states(self):
        """两个量子态 Wigner 函数的卷积逐点非负"""
        mixtures = [PhotonMixture.fock(n) for n in range(4)] + [IMPERFECT,
                                                               apply_loss(IMPERFECT, 0.4)]
        s = np.linspace(0.0, 100.0, 2001)
        for m1, m2 in itertools.product(mixtures, repeat=2):
            k = convolve(mixture_wigner(m1), mixture_wigner(m2))
            self.assertTrue(is_nonnegative(k))
            self.assertGreaterEqual(float(k.at_s(s).min()), -1e-12)

    def test_matches_grid_convolution(self):
        """闭式卷积与网格卷积在 [-4,4]² 上一致"""
        states = {'0': fock_wigner(0), '1': fock_wigner(1), '2': fock_wigner(2),
                  'mix': mixture_wigner(IMPERFECT)}
        pairs = [('0', '0'), ('0', '1'), ('1', '1'), ('1', '2'), ('2', '2'), ('mix', 'mix'),
                 ('0', 'mix')]
        for left, right in pairs:
            with self.subTest(pair=(left, right)):
                axis, grid = grid_convolution(states[left], states[right])
                inside = np.abs(axis) <= 4.0 + 1e-9
                gx, gp = np.meshgrid(axis[inside], axis[inside], indexing='ij')
                exact = convolve(states[left], states[right]).at_s(gx * gx + gp * gp)
                err = np.max(np.abs(exact - grid[np.ix_(inside, inside)]))
                self.assertLess(err, 1e-6)

    def test_near_delta_identity(self):
        """与近似 δ 函数卷积几乎不变"""
        lam = 1e4
        delta = RadialPolyGaussian(lam, (lam / math.pi,))
        f = mixture_wigner(IMPERFECT)
        s = np.linspace(0.0, 9.0, 200)
        diff = np.abs(convolve(f, delta).at_s(s) - f.at_s(s))
        self.assertLess(float(diff.max()), 1e-3)

    def test_purity_identity(self):
        """原点值·2π = Σ p_n²"""
        mixtures = [IMPERFECT, PhotonMixture.from_dict({0: 0.3, 2: 0.3, 4: 0.4}),
                    apply_loss(PhotonMixture.fock(3), 0.2)]
        for mix in mixtures:
            w = mixture_wigner(mix)
            expected = sum(p * p for _, p in mix.weights)
            self.assertAlmostEqual(evaluate(convolve(w, w), ORIGIN) * 2.0 * math.pi, expected,
                                   places=11)

    def test_degree_cap(self):
        with self.assertRaises(CapabilityError):
            convolve(fock_wigner(5), fock_wigner(4))


class TestFockPairOverlap(unittest.TestCase):
    """纯 Fock 对卷积核与位移矩阵元"""

    def test_matches_convolution(self):
        s = np.linspace(0.0, 12.0, 41)
        for m, n in itertools.product(range(4), repeat=2):
            with self.subTest(m=m, n=n):
                exact = convolve(fock_wigner(m), fock_wigner(n)).at_s(s)
                np.testing.assert_allclose(fock_pair_overlap(m, n, s), exact, atol=1e-12)

    def test_matches_truncated_displacement(self):
        """与截断 Fock 空间中的位移算符矩阵元一致"""
        for m, n, alpha in [(0, 0, 0.5), (1, 0, 0.8 + 0.3j), (1, 1, 1.0), (2, 1, 0.6j)]:
            s = 2.0 * abs(alpha) ** 2
            element = displacement_element(m, n, alpha)
            expected = abs(element) ** 2 / (2.0 * math.pi)
            self.assertAlmostEqual(float(fock_pair_overlap(m, n, s)), expected, places=10)


class TestRadialProfile(unittest.TestCase):
    """径向剖面"""

    def test_vacuum_origin(self):
        self.assertEqual(radial_profile(fock_wigner(0), [0.0]), [(0.0, 1.0 / math.pi)])

    def test_zero_polynomial(self):
        zero = RadialPolyGaussian(1.0, (0.0, 0.0))
        self.assertEqual([v for _, v in radial_profile(zero, [0.0, 0.5, 2.0])], [0.0, 0.0, 0.0])

    def test_negative_radius(self):
        with self.assertRaises(DomainError):
            radial_profile(fock_wigner(0), [0.1, -0.2])

    def test_large_s_is_finite(self):
        value = float(fock_wigner(8).at_s(100.0))
        self.assertTrue(math.isfinite(value))


def run_tests():
    """运行所有测试"""
    loader = unittest.TestLoader()
    suite = unittest.TestSuite()
    for case in (TestFockWigner, TestLoss, TestConvolution, TestFockPairOverlap, TestRadialProfile):
        suite.addTests(loader.loadTestsFromTestCase(case))
    result = unittest.TextTestRunner(verbosity=2).run(suite)
    return result.wasSuccessful()


if __name__ == "__main__":
    success = run_tests()
    sys.exit(0 if success else 1)
