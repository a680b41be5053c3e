#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
参数扫描测试
Sweep Tests
"""

import os
import sys
import unittest
from unittest.mock import patch

import numpy as np

# 添加项目路径
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.errors import DomainError, UnsupportedDirectionError
from src.montecarlo import RunConfig
from src.sweep import (SweepSpec, config_along, locate_crossing, ratio_along, run_sweep,
                       sweep_rows_as_dicts)
from src.wigner_core import PhotonMixture

IMPERFECT = PhotonMixture.from_dict({0: 0.25, 1: 0.73, 2: 0.02})
SINGLE = PhotonMixture.fock(1)


def template(**kwargs) -> RunConfig:
    values = dict(v=0.34, r=0.2, probe_mixture=IMPERFECT, ancilla_mixture=IMPERFECT,
                  n_events=168917, seed=20240101)
    values.update(kwargs)
    return RunConfig(**values)


class TestSweepSpec(unittest.TestCase):
    """扫描规格"""

    def test_invalid(self):
        with self.assertRaises(DomainError):
            SweepSpec('temperature', (1.0,), template())
        with self.assertRaises(DomainError):
            SweepSpec('prior_variance', (), template())
        with self.assertRaises(DomainError):
            SweepSpec('prior_variance', (0.3, -0.1), template())
        with self.assertRaises(DomainError):
            SweepSpec('loss', (1.2,), template())

    def test_config_along(self):
        base = template()
        self.assertEqual(config_along('prior_variance', base, 0.8).v, 0.8)
        self.assertEqual(config_along('selection_radius', base, 0.7).r, 0.7)
        lossy = config_along('loss', base, 0.3)
        self.assertEqual((lossy.probe_loss, lossy.ancilla_loss), (0.3, 0.3))


class TestQuadratureSweeps(unittest.TestCase):
    """求积扫描：经典极限被打破的区域"""

    def test_prior_variance_sweep(self):
        spec = SweepSpec('prior_variance', (0.13, 0.34, 0.8, 1.2), template())
        rows = run_sweep(spec)
        self.assertEqual([row.value for row in rows], [0.13, 0.34, 0.8, 1.2])
        below = [row.quadrature.ratio < 1.0 for row in rows]
        self.assertEqual(below, [True, True, True, False])

    def test_prior_variance_crossing(self):
        crossing = locate_crossing('prior_variance', template(), 0.5, 1.2)
        self.assertAlmostEqual(crossing, 0.9, delta=0.1)

    def test_selection_radius_crossing(self):
        crossing = locate_crossing('selection_radius', template(), 0.3, 1.2)
        self.assertAlmostEqual(crossing, 0.7, delta=0.1)

    def test_no_sign_change(self):
        with self.assertRaises(DomainError):
            locate_crossing('prior_variance', template(), 0.1, 0.3)

    def test_loss_threshold(self):
        """理想单光子两臂加损耗：0.4 仍可打破经典极限，0.6 不能"""
        base = template(probe_mixture=SINGLE, ancilla_mixture=SINGLE, r=0.2)
        grid = np.linspace(0.05, 0.9, 18)

        def best_ratio(loss):
            lossy = config_along('loss', base, loss)
            return min(ratio_along('prior_variance', lossy, v) for v in grid)

        self.assertLess(best_ratio(0.4), 1.0)
        self.assertGreaterEqual(best_ratio(0.6), 1.0)

    def test_parallel_rows_keep_order(self):
        spec = SweepSpec('selection_radius', (1.0, 0.2, 0.7), template())
        serial = run_sweep(spec)
        parallel = run_sweep(spec, workers=2)
        self.assertEqual([r.value for r in parallel], [1.0, 0.2, 0.7])
        for a, b in zip(serial, parallel):
            self.assertEqual(a.quadrature.v_prime, b.quadrature.v_prime)

    def test_rows_as_dicts(self):
        rows = sweep_rows_as_dicts(run_sweep(SweepSpec('loss', (0.0, 0.2), template())))
        self.assertEqual(rows[1]['probe_loss'], 0.2)
        for row in rows:
            self.assertAlmostEqual(row['ratio'], row['v_prime'] / row['v_prime_c'], delta=1e-12)
            self.assertNotIn('mc_v_prime', row)


class TestMonteCarloColumns(unittest.TestCase):
    """蒙特卡罗列"""

    def test_mc_agrees_with_quadrature(self):
        spec = SweepSpec('prior_variance', (0.34, 0.8), template(r=1.0))
        for row in run_sweep(spec, mc=40000):
            diff = abs(row.montecarlo.v_prime - row.quadrature.v_prime)
            self.assertLess(diff, 3 * row.montecarlo.v_prime_stderr)
            self.assertEqual(row.montecarlo.config['n_events'], 40000)

    def test_retargeted_columns(self):
        spec = SweepSpec('prior_variance', (0.8, 0.6), template(r=1.0))
        rows = run_sweep(spec, mc=80000, retarget_from=1.2)
        for row in rows:
            self.assertEqual(row.montecarlo.config['v'], row.value)
            diff = abs(row.montecarlo.v_prime - row.quadrature.v_prime)
            self.assertLess(diff, 3 * row.montecarlo.v_prime_stderr)

    def test_rows_above_source_have_no_mc(self):
        """高于重定向源的取值只有求积列"""
        spec = SweepSpec('prior_variance', (0.8, 1.5), template(r=1.0))
        with self.assertLogs('DispEst.Sweep', level='WARNING'):
            rows = run_sweep(spec, mc=2000, retarget_from=1.2)
        self.assertIsNotNone(rows[0].montecarlo)
        self.assertIsNone(rows[1].montecarlo)
        self.assertIsNone(rows[1].agrees)
        self.assertNotIn('mc_v_prime', sweep_rows_as_dicts(rows)[1])

    def test_retarget_checked_before_rows(self):
        """方向不可行时在计算任何行之前报错"""
        with patch('src.sweep.quadrature_report') as quadrature:
            with self.assertRaises(UnsupportedDirectionError):
                run_sweep(SweepSpec('prior_variance', (1.3, 1.5), template()), mc=1000,
                          retarget_from=1.2)
            with self.assertRaises(DomainError):
                run_sweep(SweepSpec('selection_radius', (0.5,), template()), mc=1000,
                          retarget_from=1.2)
            quadrature.assert_not_called()


if __name__ == "__main__":
    unittest.main(verbosity=2)
