# tests/test_models.py
import math
import os
import sys
import unittest

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from models import (BellLikeState, ChannelFamily, ChannelSpec, CriticalResult, DecayPoint, DensityMatrix,
                    KrausSet, MixedBoundQuery, QsltResult, ScanGrid, ScanRow, column_label, rows_columns)
from services.error_handling import ContractError, DomainError, UnknownFamilyError
from services.numerics_config import reload_numerics_config


class TestChannelFamily(unittest.TestCase):
    """Test cases for ChannelFamily parsing"""

    def test_parse_is_case_insensitive(self):
        """Test parsing of a padded upper-case id"""
        self.assertIs(ChannelFamily.parse(' AD '), ChannelFamily.AD)
        self.assertIs(ChannelFamily.parse(ChannelFamily.PD), ChannelFamily.PD)

    def test_parse_unknown_family(self):
        """Test that an unknown id raises UnknownFamilyError"""
        with self.assertRaises(UnknownFamilyError):
            ChannelFamily.parse('bitflip')


class TestBellLikeState(unittest.TestCase):
    """Test cases for BellLikeState"""

    def test_beta_and_concurrence(self):
        """Test beta = sqrt(1 - alpha^2) and C = 2 alpha beta"""
        state = BellLikeState(0.6)
        self.assertAlmostEqual(state.beta, 0.8, places=12)
        self.assertAlmostEqual(state.concurrence, 0.96, places=12)

    def test_alpha_out_of_range(self):
        """Test that alpha outside [0, 1] raises DomainError"""
        with self.assertRaises(DomainError):
            BellLikeState(1.2)
        with self.assertRaises(DomainError):
            BellLikeState(float('nan'))

    def test_from_concurrence(self):
        """Test the C -> alpha map on the alpha <= sqrt(2)/2 branch"""
        self.assertAlmostEqual(BellLikeState.from_concurrence(0.96).alpha, 0.6, places=12)
        self.assertAlmostEqual(BellLikeState.from_concurrence(1.0).alpha, math.sqrt(0.5), places=12)
        self.assertEqual(BellLikeState.from_concurrence(0.0).alpha, 0.0)

    def test_from_concurrence_round_trip(self):
        """Test that the concurrence of the returned state is the input"""
        for c in (0.05, 0.4, 0.77):
            self.assertAlmostEqual(BellLikeState.from_concurrence(c).concurrence, c, places=12)

    def test_from_concurrence_out_of_range(self):
        """Test that C > 1 raises DomainError"""
        with self.assertRaises(DomainError):
            BellLikeState.from_concurrence(1.5)


class TestDensityMatrix(unittest.TestCase):
    """Test cases for DensityMatrix validation"""

    def setUp(self):
        """Reset numerics configuration"""
        reload_numerics_config()

    def test_valid_matrix(self):
        """Test trace, purity and eigenvalues of the maximally mixed state"""
        rho = DensityMatrix(np.eye(4) / 4)
        self.assertAlmostEqual(rho.trace(), 1.0)
        self.assertAlmostEqual(rho.purity(), 0.25)
        self.assertAlmostEqual(rho.min_eigenvalue(), 0.25)
        self.assertFalse(rho.is_pure())

    def test_matrix_is_read_only(self):
        """Test that the stored array cannot be modified"""
        rho = DensityMatrix(np.eye(4) / 4)
        with self.assertRaises(ValueError):
            rho.m[0, 0] = 1.0

    def test_non_hermitian_rejected(self):
        """Test that a non-Hermitian matrix raises ContractError"""
        m = np.eye(4) / 4
        m[0, 1] = 0.1
        with self.assertRaises(ContractError):
            DensityMatrix(m)

    def test_wrong_trace_rejected(self):
        """Test that trace != 1 raises ContractError"""
        with self.assertRaises(ContractError):
            DensityMatrix(np.eye(4) / 2)

    def test_negative_eigenvalue_rejected(self):
        """Test positivity check and its opt-out"""
        m = np.diag([1.5, -0.5, 0.0, 0.0])
        with self.assertRaises(ContractError):
            DensityMatrix(m)
        rho = DensityMatrix(m, check_positivity=False)
        self.assertAlmostEqual(rho.min_eigenvalue(), -0.5)


class TestParameters(unittest.TestCase):
    """Test cases for decay points, channel specs and queries"""

    def setUp(self):
        """Reset numerics configuration"""
        reload_numerics_config()

    def test_decay_point_domain(self):
        """Test that 0 and values above 1 are rejected"""
        self.assertEqual(DecayPoint(1.0).value, 1.0)
        with self.assertRaises(DomainError):
            DecayPoint(0.0)
        with self.assertRaises(DomainError):
            DecayPoint(1.01)

    def test_decay_point_at_time(self):
        """Test u = exp(-rate t)"""
        self.assertEqual(DecayPoint.at_time(0.5, 0.0).value, 1.0)
        self.assertAlmostEqual(DecayPoint.at_time(2.0, math.log(2.0) / 2.0).value, 0.5, places=12)

    def test_channel_spec_default_rates(self):
        """Test Gamma = 1 for ad and gamma = 1/2 for pd and depol"""
        self.assertEqual(ChannelSpec('ad', 0.3).rate, 1.0)
        self.assertEqual(ChannelSpec('pd', 0.3).rate, 0.5)
        self.assertEqual(ChannelSpec('depol', 0.3).rate, 0.5)
        self.assertEqual(ChannelSpec('pd', 0.3, 2.0).rate, 2.0)

    def test_channel_spec_validation(self):
        """Test mu and rate domains"""
        with self.assertRaises(DomainError):
            ChannelSpec('ad', 1.5)
        with self.assertRaises(DomainError):
            ChannelSpec('ad', 0.5, -1.0)
        with self.assertRaises(UnknownFamilyError):
            ChannelSpec('amp', 0.5)

    def test_mixed_query_validation(self):
        """Test tau >= 0 and tau_d > 0"""
        spec = ChannelSpec('pd', 0.3)
        state = BellLikeState(0.5)
        with self.assertRaises(DomainError):
            MixedBoundQuery(spec, state, -1.0, 1.0)
        with self.assertRaises(DomainError):
            MixedBoundQuery(spec, state, 0.0, 0.0)

    def test_kraus_set_labels_must_match(self):
        """Test that KrausSet needs one label per operator"""
        with self.assertRaises(ContractError):
            KrausSet((np.eye(4),), ('a', 'b'))
        kraus = KrausSet((np.eye(4),), ('id',))
        self.assertEqual(len(kraus), 1)
        self.assertAlmostEqual(kraus.completeness_error(), 0.0)


class TestScanTypes(unittest.TestCase):
    """Test cases for scan grids, rows and results"""

    def test_scan_grid_order(self):
        """Test row-major mu -> C -> endpoint iteration"""
        grid = ScanGrid('pd', (0.0, 1.0), (0.2,), (0.3, 0.6))
        self.assertEqual(len(grid), 4)
        self.assertEqual(list(grid.iter_points()),
                         [(0.0, 0.2, 0.3), (0.0, 0.2, 0.6), (1.0, 0.2, 0.3), (1.0, 0.2, 0.6)])

    def test_scan_grid_validation(self):
        """Test empty axes and out-of-range values"""
        with self.assertRaises(DomainError):
            ScanGrid('pd', (), (0.2,), (0.5,))
        with self.assertRaises(DomainError):
            ScanGrid('pd', (0.5,), (0.2,), (0.0,))
        with self.assertRaises(DomainError):
            ScanGrid('pd', (0.5,), (1.2,), (0.5,))

    def test_scan_row_columns(self):
        """Test that column order follows insertion order"""
        row = ScanRow({'tau': 0.0, 'mu_0': 1.0})
        self.assertEqual(row.columns, ['tau', 'mu_0'])
        self.assertEqual(row['mu_0'], 1.0)
        self.assertEqual(rows_columns([row]), ['tau', 'mu_0'])
        self.assertEqual(rows_columns([]), [])

    def test_column_label(self):
        """Test compact numeric column names"""
        self.assertEqual(column_label('mu', 0.0), 'mu_0')
        self.assertEqual(column_label('mu', 0.3), 'mu_0.3')
        self.assertEqual(column_label('mu', 1.0), 'mu_1')

    def test_critical_result_to_dict(self):
        """Test that the bracket serializes as a list"""
        data = CriticalResult(True, 0.5, (0.49, 0.5), 12).to_dict()
        self.assertEqual(data, {'exists': True, 'value': 0.5, 'bracket': [0.49, 0.5], 'iterations': 12})
        self.assertIsNone(CriticalResult(False, None, None, 0).to_dict()['bracket'])

    def test_qslt_result_to_dict(self):
        """Test the serialized field names"""
        data = QsltResult('pure', 0.1, 0.2, 0.5, False, {'linf': 0.2}).to_dict()
        self.assertEqual(list(data.keys()), ['bound', 'numerator', 'denominator', 'value', 'stationary',
                                             'path_lengths', 'averages', 'oracle'])


if __name__ == '__main__':
    unittest.main()
