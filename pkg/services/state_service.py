# services/state_service.py
"""
State Service

Construction of the Bell-like initial states and the scalar functionals the
speed-limit bounds need: concurrence, the Bures-angle term and relative purity.
"""

import logging

import numpy as np

from models import BellLikeState, DensityMatrix
from services.error_handling import ContractError, NumericError
from services.matrix_core import mat_trace_product
from services.numerics_config import get_numerics_config

logger = logging.getLogger(__name__)


def bell_like_matrix(state: BellLikeState) -> np.ndarray:
    """Raw 4x4 projector onto alpha|00> + beta|11>."""
    a, b = state.alpha, state.beta
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = a * a
    m[3, 3] = b * b
    m[0, 3] = m[3, 0] = a * b
    return m


def bell_like_density(state: BellLikeState) -> DensityMatrix:
    """Initial density matrix |Phi><Phi| for Phi = alpha|00> + beta|11>."""
    return DensityMatrix(bell_like_matrix(state))


def concurrence(state: BellLikeState) -> float:
    """C = 2|alpha beta| of the initial state."""
    return state.concurrence


def bures_sin2(rho0: DensityMatrix, rho_tau: DensityMatrix) -> float:
    """
    sin^2 of the Bures angle, |Tr(rho0 rho_tau) - 1|, for a pure rho0.

    Raises:
        ContractError: if rho0 is not pure; the mixed-state bound applies then
    """
    if not rho0.is_pure():
        raise ContractError(
            f"bures_sin2 needs a pure initial state (purity {rho0.purity():.10f}); "
            "use the mixed-state bound instead")
    overlap = mat_trace_product(rho0.m, rho_tau.m).real
    return float(min(1.0, abs(overlap - 1.0)))


def relative_purity(rho_a: DensityMatrix, rho_b: DensityMatrix) -> float:
    """
    Relative purity Tr(rho_b rho_a) / Tr(rho_a^2).

    Raises:
        NumericError: if Tr(rho_a^2) vanishes
    """
    purity = rho_a.purity()
    if purity <= get_numerics_config().get_stationary_tol():
        raise NumericError(f"Relative purity undefined for zero-purity input ({purity:.3e})")
    if rho_a is rho_b:
        return 1.0
    return float(mat_trace_product(rho_b.m, rho_a.m).real / purity)
