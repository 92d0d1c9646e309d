# tests/test_state_service.py
import math
import os
import sys
import unittest
from unittest.mock import patch

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from models import BellLikeState, DensityMatrix
from services.error_handling import ContractError, NumericError
from services.state_service import (bell_like_density, bell_like_matrix, bures_sin2, concurrence,
                                    relative_purity)


class TestStateService(unittest.TestCase):
    """Test cases for Bell-like states and the scalar functionals"""

    def setUp(self):
        """Set up reference states"""
        self.bell = BellLikeState(math.sqrt(0.5))
        self.ground = bell_like_density(BellLikeState(1.0))
        self.excited = bell_like_density(BellLikeState(0.0))
        self.mixed = DensityMatrix(np.diag([0.5, 0.0, 0.0, 0.5]))

    def test_bell_like_matrix_entries(self):
        """Test the projector onto alpha|00> + beta|11>"""
        m = bell_like_matrix(BellLikeState(0.6))
        self.assertAlmostEqual(m[0, 0].real, 0.36)
        self.assertAlmostEqual(m[3, 3].real, 0.64)
        self.assertAlmostEqual(m[0, 3].real, 0.48)
        self.assertAlmostEqual(m[3, 0].real, 0.48)
        self.assertEqual(m[1, 1], 0.0)

    def test_bell_like_density_is_pure(self):
        """Test purity of the initial state"""
        rho = bell_like_density(self.bell)
        self.assertTrue(rho.is_pure())
        self.assertAlmostEqual(rho.purity(), 1.0, places=12)

    def test_concurrence(self):
        """Test C = 2 alpha beta"""
        self.assertAlmostEqual(concurrence(self.bell), 1.0, places=12)
        self.assertAlmostEqual(concurrence(BellLikeState(0.6)), 0.96, places=12)

    def test_bures_sin2_identical_states(self):
        """Test that a state has zero distance to itself"""
        rho = bell_like_density(self.bell)
        self.assertAlmostEqual(bures_sin2(rho, rho), 0.0, places=12)

    def test_bures_sin2_orthogonal_states(self):
        """Test that orthogonal states are at the maximal distance"""
        self.assertAlmostEqual(bures_sin2(self.ground, self.excited), 1.0, places=12)

    def test_bures_sin2_requires_pure_initial_state(self):
        """Test that a mixed rho0 raises ContractError"""
        with self.assertRaises(ContractError):
            bures_sin2(self.mixed, self.ground)

    def test_relative_purity_of_itself(self):
        """Test f(rho, rho) = 1"""
        self.assertEqual(relative_purity(self.mixed, self.mixed), 1.0)

    def test_relative_purity_values(self):
        """Test Tr(rho_b rho_a) / Tr(rho_a^2) on diagonal states"""
        self.assertAlmostEqual(relative_purity(self.mixed, self.ground), 1.0, places=12)
        other = DensityMatrix(np.diag([0.0, 1.0, 0.0, 0.0]))
        self.assertAlmostEqual(relative_purity(self.mixed, other), 0.0, places=12)

    def test_relative_purity_zero_purity(self):
        """Test that a zero-purity input raises NumericError"""
        with patch.object(DensityMatrix, "purity", return_value=0.0):
            with self.assertRaises(NumericError):
                relative_purity(self.mixed, self.ground)


if __name__ == '__main__':
    unittest.main()
