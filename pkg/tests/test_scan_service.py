# tests/test_scan_service.py
import math
import os
import sys
import unittest
from unittest.mock import patch

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np

from models import BellLikeState, DecayPoint, ScanGrid
from services.cache_service import get_cache
from services.error_handling import DomainError, UnknownFigureError
from services.numerics_config import get_numerics_config, reload_numerics_config
from services.qslt_service import memoryless_ad_oracle
from services.scan_service import FIGURE_IDS, ScanService, axis_grid, bisect


class TestScanHelpers(unittest.TestCase):
    """Test cases for bisection and sweep axes"""

    def test_bisect(self):
        """Test that the bracket shrinks around the threshold"""
        lo, hi, iterations = bisect(lambda x: x > 0.3, 0.0, 1.0, 1e-6)
        self.assertLessEqual(hi - lo, 1e-6)
        self.assertLessEqual(lo, 0.3)
        self.assertGreaterEqual(hi, 0.3)
        self.assertEqual(iterations, 20)

    def test_axis_grid(self):
        """Test decay, unit and time axes"""
        self.assertEqual(axis_grid('decay', 4), [0.25, 0.5, 0.75, 1.0])
        self.assertEqual(axis_grid('unit', 3), [0.0, 0.5, 1.0])
        self.assertEqual(axis_grid('time', 3, 5.0), [0.0, 2.5, 5.0])
        with self.assertRaises(ValueError):
            axis_grid('log', 3)


class TestScanService(unittest.TestCase):
    """Test cases for grid scans, critical searches and figure datasets"""

    def setUp(self):
        """Reset configuration and cache"""
        reload_numerics_config()
        get_cache().clear()
        self.service = ScanService(workers=1)

    def tearDown(self):
        """Restore default numerics settings"""
        reload_numerics_config()

    def test_pure_result_is_cached(self):
        """Test that a repeated query is served from the cache"""
        first = self.service.pure_result('pd', 0.5, 0.6, 0.4)
        second = self.service.pure_result('pd', 0.5, 0.6, 0.4)
        self.assertIs(first, second)
        self.assertEqual(get_cache().hits, 1)

    def test_cache_disabled(self):
        """Test that use_cache=False bypasses the cache"""
        service = ScanService(workers=1, use_cache=False)
        service.pure_result('pd', 0.5, 0.6, 0.4)
        self.assertEqual(get_cache().size(), 0)

    def test_run_grid(self):
        """Test row order and values of a phase-damping grid"""
        rows = self.service.run_grid(ScanGrid('pd', (0.0, 0.5), (0.4,), (0.3, 0.6)))
        self.assertEqual(len(rows), 4)
        self.assertEqual(rows[0].columns, ['mu', 'c', 'endpoint', 'value', 'stationary'])
        self.assertEqual([(r['mu'], r['endpoint']) for r in rows], [(0.0, 0.3), (0.0, 0.6), (0.5, 0.3), (0.5, 0.6)])
        for row in rows:
            self.assertAlmostEqual(row['value'], 0.4, delta=1e-6)
            self.assertFalse(row['stationary'])

    def test_run_grid_threaded_matches_serial(self):
        """Test that worker threads do not change the rows"""
        grid = ScanGrid('depol', (0.0, 1.0), (0.3, 0.7), (0.5,))
        serial = [r.values for r in ScanService(workers=1, use_cache=False).run_grid(grid)]
        threaded = [r.values for r in ScanService(workers=3, use_cache=False).run_grid(grid)]
        self.assertEqual(serial, threaded)

    def test_find_c_c_memoryless(self):
        """Test the crossover concurrence at mu = 0, P_tau = 1/2 against its closed form"""
        eps = get_numerics_config().get_crossover_eps()
        beta = (1.0 - eps) / (1.0 + 0.5 * eps)
        expected = 2.0 * beta * math.sqrt(1.0 - beta * beta)
        result = self.service.find_c_c(0.0, 0.5)
        self.assertTrue(result.exists)
        self.assertAlmostEqual(result.value, expected, delta=2e-5)
        self.assertLessEqual(result.bracket[1] - result.bracket[0], get_numerics_config().get_bisection_tol())
        self.assertEqual(result.value, result.bracket[1])

    def test_find_c_c_nearly_independent_of_mu(self):
        """Test that the crossover concurrence barely moves with mu"""
        values = [self.service.find_c_c(mu, 0.5).value for mu in (0.0, 0.3, 0.6, 1.0)]
        self.assertTrue(all(v is not None for v in values))
        self.assertLess(max(values) - min(values), 1e-3)

    def test_find_c_c_scales_with_crossover_eps(self):
        """Test that a looser crossover margin moves C_c out as sqrt(eps)"""
        tight = self.service.find_c_c(0.0, 0.5).value
        reload_numerics_config({'crossover_eps': 1e-5})
        loose = ScanService(workers=1).find_c_c(0.0, 0.5).value
        self.assertAlmostEqual(loose / tight, 10.0, delta=0.2)

    def test_find_c_c_domain(self):
        """Test that P_tau outside (0, 1) raises DomainError"""
        with self.assertRaises(DomainError):
            self.service.find_c_c(0.5, 1.0)
        with self.assertRaises(DomainError):
            self.service.find_c_c(1.5, 0.5)

    def test_find_p_tau_c_domain(self):
        """Test that C must lie in (0, 1) and mu in (0, 1]"""
        with self.assertRaises(DomainError):
            self.service.find_p_tau_c(0.5, 0.0)
        with self.assertRaises(DomainError):
            self.service.find_p_tau_c(0.0, 0.5)
        with self.assertRaises(DomainError):
            self.service.find_p_tau_c(1.0, 0.5)

    def _fake_curve(self, threshold):
        def curve(family, mu, alpha, endpoints):
            if mu == 0.0:
                return [0.9 for _ in endpoints]
            return [0.5 if p > threshold else 1.0 for p in endpoints]
        return curve

    def test_find_p_tau_c_bracketing(self):
        """Test coarse bracketing then bisection on a synthetic gain"""
        threshold = 0.4237
        with patch.object(self.service, 'curve', side_effect=self._fake_curve(threshold)), \
                patch.object(self.service, '_correlation_gain',
                             side_effect=lambda mu, alpha, p: -0.4 if p > threshold else 0.1):
            result = self.service.find_p_tau_c(0.5, 1.0)
        self.assertTrue(result.exists)
        self.assertAlmostEqual(result.bracket[0], threshold, delta=1e-6)
        self.assertGreater(result.value, threshold)
        self.assertLessEqual(result.value - threshold, get_numerics_config().get_bisection_tol())
        self.assertGreater(result.iterations, 0)

    def test_find_p_tau_c_no_speedup_near_one(self):
        """Test exists=false when memory does not help just below P = 1"""
        with patch.object(self.service, 'curve', side_effect=self._fake_curve(2.0)):
            result = self.service.find_p_tau_c(0.5, 1.0)
        self.assertFalse(result.exists)
        self.assertIsNone(result.value)
        self.assertIsNone(result.bracket)

    def test_find_p_tau_c_below_grid(self):
        """Test that a speedup down to the grid bottom returns the bottom point"""
        with patch.object(self.service, 'curve', side_effect=self._fake_curve(-1.0)):
            result = self.service.find_p_tau_c(0.5, 1.0)
        self.assertTrue(result.exists)
        self.assertEqual(result.value, 0.01)
        self.assertEqual(result.bracket, (0.01, 0.01))

    def test_find_p_tau_c_absent_for_weak_entanglement(self):
        """Test that no P_tau_c exists at C = 0.02 and 0.04 with full memory"""
        for c in (0.02, 0.04):
            self.assertFalse(self.service.find_p_tau_c(c, 1.0).exists)
        self.assertTrue(self.service.find_p_tau_c(0.08, 1.0).exists)

    def test_find_p_tau_c_decreases_with_concurrence(self):
        """Test that stronger entanglement widens the sped-up region"""
        values = [self.service.find_p_tau_c(c, 1.0).value for c in (0.2, 0.4, 0.6, 0.8)]
        self.assertTrue(all(v is not None for v in values))
        for higher, lower in zip(values, values[1:]):
            self.assertGreater(higher, lower)
        self.assertLess(self.service.find_p_tau_c(0.7, 1.0).value, self.service.find_p_tau_c(0.3, 1.0).value)

    def test_find_p_tau_c_gain_threshold(self):
        """Test that the gain at the returned edge sits at the threshold"""
        threshold = get_numerics_config().get_gain_threshold()
        result = self.service.find_p_tau_c(0.5, 1.0)
        alpha = BellLikeState.from_concurrence(0.5).alpha
        self.assertTrue(result.exists)
        self.assertLess(result.bracket[0], result.bracket[1])
        self.assertLess(self.service._correlation_gain(1.0, alpha, result.bracket[1]), -threshold)
        self.assertGreaterEqual(self.service._correlation_gain(1.0, alpha, result.bracket[0]), -threshold)

    def test_find_mu_critical(self):
        """Test the smallest mu giving a depolarizing speedup at C = 0.5, p = 0.5"""
        eps = get_numerics_config().get_speedup_eps()
        result = self.service.find_mu_critical(0.5, 0.5)
        self.assertTrue(result.exists)
        self.assertLessEqual(result.bracket[1] - result.bracket[0], get_numerics_config().get_bisection_tol())
        alpha = BellLikeState.from_concurrence(0.5).alpha
        self.assertLess(self.service.ratio('depol', result.value, alpha, 0.5), 1.0 - eps)
        if result.bracket[0] < result.bracket[1]:
            self.assertGreaterEqual(self.service.ratio('depol', result.bracket[0], alpha, 0.5), 1.0 - eps)

    def test_find_mu_critical_exists_for_every_concurrence(self):
        """Test that full memory always brings a speedup, so mu_critical exists"""
        for c in (0.2, 0.5, 0.8):
            result = self.service.find_mu_critical(c, 0.5)
            self.assertTrue(result.exists)
            self.assertLessEqual(result.value, 1.0)

    def test_find_mu_critical_domain(self):
        """Test that C and p_tau must lie in (0, 1)"""
        with self.assertRaises(DomainError):
            self.service.find_mu_critical(0.0, 0.5)
        with self.assertRaises(DomainError):
            self.service.find_mu_critical(0.5, 0.0)

    def test_unknown_figure(self):
        """Test that an unknown id raises UnknownFigureError"""
        with self.assertRaises(UnknownFigureError):
            self.service.figure_dataset('fig9')
        self.assertEqual(len(FIGURE_IDS), 7)

    def test_fig4_schema_and_start(self):
        """Test fig4 columns, the tau = 0 value and the stationary mu = 1 column"""
        rows = self.service.figure_dataset('fig4', points=3)
        self.assertEqual(rows[0].columns, ['tau', 'mu_0', 'mu_0.3', 'mu_0.6', 'mu_1'])
        self.assertEqual([r['tau'] for r in rows], [0.0, 2.5, 5.0])
        self.assertAlmostEqual(rows[0]['mu_0'], 1.0, delta=1e-4)
        self.assertTrue(all(r['mu_1'] == 0.0 for r in rows))

    def test_fig1a_excited_state(self):
        """Test ratio 1 for |11> at P_tau >= 1/2 and a stationary last row"""
        rows = self.service.figure_dataset('fig1a', points=4)
        self.assertEqual(rows[0].columns, ['p_tau', 'mu_0', 'mu_0.3', 'mu_0.6', 'mu_1'])
        for row in rows[1:3]:
            for column in ('mu_0', 'mu_0.3', 'mu_0.6', 'mu_1'):
                self.assertAlmostEqual(row[column], 1.0, delta=1e-6)
        self.assertEqual(rows[-1]['p_tau'], 1.0)
        self.assertIsNone(rows[-1]['mu_0'])

    def test_fig2_p_tau_c_curve(self):
        """Test fig2 columns and a P_tau_c that falls with C"""
        service = ScanService(workers=1, figures={'mu_values': [0.0, 1.0]})
        rows = service.figure_dataset('fig2', points=5)
        self.assertEqual(rows[0].columns, ['c', 'mu_1'])
        self.assertEqual([r['c'] for r in rows], [0.25, 0.5, 0.75])
        values = [r['mu_1'] for r in rows]
        self.assertTrue(all(v is not None for v in values))
        self.assertGreater(values[0], values[1])
        self.assertGreater(values[1], values[2])

    def test_fig3_amplitude_damping_sweep(self):
        """Test fig3 at C = 0 and the memoryless column against its closed form"""
        rows = self.service.figure_dataset('fig3', points=5)
        self.assertEqual(rows[0].columns, ['c', 'mu_0', 'mu_0.3', 'mu_0.6', 'mu_1'])
        for column in ('mu_0', 'mu_0.3', 'mu_0.6', 'mu_1'):
            self.assertAlmostEqual(rows[0][column], 1.0, delta=1e-6)
        for row in rows:
            oracle = memoryless_ad_oracle(BellLikeState.from_concurrence(row['c']), DecayPoint(0.5))
            self.assertAlmostEqual(row['mu_0'], oracle, delta=1e-6)

    def test_fig5a_full_memory_and_interior_minimum(self):
        """Test sqrt(1 - C^2) at mu = 1 and a ratio minimum inside (0, 1) for mu < 1"""
        rows = self.service.figure_dataset('fig5a', points=5)
        for row in rows[1:-1]:
            self.assertAlmostEqual(row['mu_1'], math.sqrt(1.0 - row['c'] ** 2), delta=1e-6)
        c_values = [float(c) for c in np.linspace(0.01, 0.99, 50)]
        for mu in (0.0, 0.3, 0.6):
            ratios = [self.service.ratio('depol', mu, BellLikeState.from_concurrence(c).alpha, 0.5)
                      for c in c_values]
            self.assertLess(min(ratios[1:-1]), min(ratios[0], ratios[-1]))

    def test_fig5b_columns_from_config(self):
        """Test that fig5b columns follow the figures configuration"""
        service = ScanService(workers=1, figures={'fig5b_c_values': [0.5]})
        rows = service.figure_dataset('fig5b', points=3)
        self.assertEqual(rows[0].columns, ['mu', 'c_0.5'])
        self.assertEqual([r['mu'] for r in rows], [0.0, 0.5, 1.0])
        self.assertAlmostEqual(rows[-1]['c_0.5'], math.sqrt(0.75), delta=1e-6)


if __name__ == '__main__':
    unittest.main()
