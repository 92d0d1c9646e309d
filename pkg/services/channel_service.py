# services/channel_service.py
"""
Channel Service

Builds single-qubit and correlated two-qubit Kraus sets, applies them to
density matrices, and exposes the closed-form evolution and its analytic
derivative with respect to the decay parameter.
"""

import logging
from typing import List, Optional, Union

import numpy as np

from models import BellLikeState, ChannelFamily, ChannelSpec, DecayPoint, DensityMatrix, KrausSet
from services.channel_registry import get_model
from services.error_handling import ContractError, DomainError
from services.numerics_config import get_numerics_config
from services.state_service import bell_like_density

logger = logging.getLogger(__name__)

DecayLike = Union[DecayPoint, float]


def decay_value(decay: DecayLike) -> float:
    """Decay parameter as a float; bare floats may include the closed end 0."""
    if isinstance(decay, DecayPoint):
        return decay.value
    u = float(decay)
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"decay parameter must lie in [0, 1], got {u}")
    return u


def single_qubit_kraus(family, decay: DecayLike) -> List[np.ndarray]:
    """
    Single-qubit Kraus operators of a family, probabilities folded in.

    Raises:
        UnknownFamilyError: for an unregistered family
    """
    model = get_model(ChannelSpec(ChannelFamily.parse(family), 0.0))
    return model.single_qubit_kraus(decay_value(decay))


def correlated_kraus(spec: ChannelSpec, decay: DecayLike) -> KrausSet:
    """Kraus set of (1-mu) * uncorrelated + mu * correlated channel uses."""
    kraus = get_model(spec).kraus_set(decay_value(decay))
    logger.debug(f"Built {len(kraus)} Kraus operators for {spec.family.value} mu={spec.mu}")
    return kraus


def apply(kraus: KrausSet, rho0: DensityMatrix) -> DensityMatrix:
    """
    rho = sum_k E_k rho0 E_k^dagger.

    Raises:
        ContractError: if the Kraus set is incomplete beyond the configured tolerance
    """
    error = kraus.completeness_error()
    tol = get_numerics_config().get_completeness_tol()
    if error > tol:
        raise ContractError(f"Kraus completeness violated: ||sum E^dagger E - I|| = {error:.3e} > {tol:.1e}")
    ops = kraus.stacked()
    rho = np.einsum('kij,jl,kml->im', ops, rho0.m, ops.conj())
    return DensityMatrix(rho)


def evolved_closed_form(spec: ChannelSpec, state: BellLikeState, decay: DecayLike) -> DensityMatrix:
    """Closed-form evolved density matrix of a Bell-like state."""
    return DensityMatrix(get_model(spec).closed_form(state, decay_value(decay)))


def d_rho_d_decay(spec: ChannelSpec, state: BellLikeState, decay: DecayLike) -> np.ndarray:
    """
    Analytic d(rho)/du of the closed-form evolution.

    Raises:
        SingularPointError: for amplitude damping with mu > 0 at u = 0
    """
    return get_model(spec).d_closed_form(state, decay_value(decay))


def printed_singular_values(spec: ChannelSpec, state: BellLikeState, decay: DecayLike) -> Optional[np.ndarray]:
    """Closed-form singular values of d(rho)/du, or None at degenerate points."""
    return get_model(spec).printed_singular_values(state, decay_value(decay))


def kraus_discrepancy(spec: ChannelSpec, state: BellLikeState, decay: DecayLike,
                      kraus: Optional[KrausSet] = None) -> float:
    """Largest entrywise |Kraus output - closed form|."""
    kraus = kraus if kraus is not None else correlated_kraus(spec, decay)
    via_kraus = apply(kraus, bell_like_density(state))
    closed = evolved_closed_form(spec, state, decay)
    return float(np.max(np.abs(via_kraus.m - closed.m)))


def perturb_kraus(kraus: KrausSet, delta: float) -> KrausSet:
    """Copy of a Kraus set with its first operator scaled by (1 + delta)."""
    if not len(kraus):
        return kraus
    operators = list(kraus.operators)
    operators[0] = operators[0] * (1.0 + delta)
    logger.debug(f"Injected Kraus fault: first operator scaled by {1.0 + delta}")
    return KrausSet(tuple(operators), kraus.labels)
