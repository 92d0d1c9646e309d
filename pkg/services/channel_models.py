# services/channel_models.py
"""
Channel Models

The three correlated two-qubit channel families. Each model supplies its
Kraus construction and the closed-form evolution of alpha|00> + beta|11>
in the basis |00>, |01>, |10>, |11> (index 3 is the doubly excited state).

See docs/channels/ for the derivations.
"""

import math
from typing import List, Optional, Tuple

import numpy as np

from models import BellLikeState
from services.base_channel_model import BaseChannelModel
from services.error_handling import SingularPointError
from services.matrix_core import PAULI, kron


def _corner_matrix(d00: float, d11: float, d22: float, d33: float, d03: float) -> np.ndarray:
    """Real symmetric 4x4 with diagonal (d00..d33) and corner coherence d03."""
    m = np.diag([d00, d11, d22, d33]).astype(complex)
    m[0, 3] = m[3, 0] = d03
    return m


def _sorted_abs(values) -> np.ndarray:
    return np.sort(np.abs(np.asarray(values, dtype=float)))[::-1]


class AmplitudeDampingModel(BaseChannelModel):
    """
    Correlated amplitude damping with P = exp(-Gamma t).

    The correlated branch is the full-memory channel
    E00 = diag(1, 1, 1, sqrt(P)), E11 = sqrt(1-P)|00><11|.
    """

    FAMILY_ID = "ad"
    FAMILY_NAME = "Amplitude Damping"
    SQRT_PATH = True

    def single_qubit_kraus(self, u: float) -> List[np.ndarray]:
        b0 = np.array([[1.0, 0.0], [0.0, math.sqrt(u)]], dtype=complex)
        b1 = np.array([[0.0, math.sqrt(1.0 - u)], [0.0, 0.0]], dtype=complex)
        return [b0, b1]

    def correlated_terms(self, u: float) -> List[Tuple[str, np.ndarray]]:
        e00 = np.diag([1.0, 1.0, 1.0, math.sqrt(u)]).astype(complex)
        e11 = np.zeros((4, 4), dtype=complex)
        e11[0, 3] = math.sqrt(1.0 - u)
        return [('00', e00), ('11', e11)]

    def closed_form(self, state: BellLikeState, u: float) -> np.ndarray:
        a2, b2 = state.alpha ** 2, state.beta ** 2
        mu = self.mu
        one_excited = (1.0 - mu) * b2 * u * (1.0 - u)
        return _corner_matrix(
            a2 + (1.0 - u) * b2 * (1.0 - u + u * mu),
            one_excited,
            one_excited,
            u * b2 * (u + mu - u * mu),
            state.alpha * state.beta * ((1.0 - mu) * u + mu * math.sqrt(u))
        )

    def d_closed_form(self, state: BellLikeState, u: float) -> np.ndarray:
        mu = self.mu
        if u <= 0.0 and mu > 0.0:
            raise SingularPointError(
                "d(rho)/dP is singular at P = 0 for correlated amplitude damping; "
                "integrate in sqrt(P)")
        b2 = state.beta ** 2
        mean = b2 * (2.0 * u - 1.0) * (1.0 - mu)
        one_excited = (1.0 - mu) * b2 * (1.0 - 2.0 * u)
        coherence = state.alpha * state.beta * (1.0 - mu)
        if mu > 0.0:
            coherence += state.alpha * state.beta * mu / (2.0 * math.sqrt(u))
        return _corner_matrix(mean - b2, one_excited, one_excited, mean + b2, coherence)

    def d_closed_form_time(self, state: BellLikeState, u: float, rate: float) -> np.ndarray:
        # the 1/sqrt(P) coherence term times -rate*P stays bounded at P = 0
        mu = self.mu
        b2 = state.beta ** 2
        mean = b2 * (2.0 * u - 1.0) * (1.0 - mu)
        one_excited = (1.0 - mu) * b2 * (1.0 - 2.0 * u)
        coherence = state.alpha * state.beta * ((1.0 - mu) * u + 0.5 * mu * math.sqrt(u))
        scale = -rate * u
        return _corner_matrix(
            (mean - b2) * scale, one_excited * scale, one_excited * scale, (mean + b2) * scale, -rate * coherence)

    def d_closed_form_path(self, state: BellLikeState, s: float) -> np.ndarray:
        # d(rho)/dv with P = v^2; bounded at v = 0
        mu = self.mu
        u = s * s
        b2 = state.beta ** 2
        mean = b2 * (2.0 * u - 1.0) * (1.0 - mu)
        one_excited = (1.0 - mu) * b2 * (1.0 - 2.0 * u)
        coherence = state.alpha * state.beta * (2.0 * s * (1.0 - mu) + mu)
        jac = 2.0 * s
        return _corner_matrix(
            (mean - b2) * jac, one_excited * jac, one_excited * jac, (mean + b2) * jac, coherence)

    def printed_singular_values(self, state: BellLikeState, u: float) -> Optional[np.ndarray]:
        return self._block_singular_values(state, u, state.alpha * self.mu / math.sqrt(u)
                                           if u > 0 else None)

    def literal_printed_singular_values(self, state: BellLikeState, u: float) -> Optional[np.ndarray]:
        """Same closed form with the coherence term read as mu*alpha*sqrt(P)."""
        return self._block_singular_values(state, u, state.alpha * self.mu * math.sqrt(u))

    def _block_singular_values(self, state: BellLikeState, u: float,
                               memory_term: Optional[float]) -> Optional[np.ndarray]:
        alpha, beta, mu = state.alpha, state.beta, self.mu
        if alpha <= 0.0 or beta <= 0.0 or memory_term is None:
            return None
        b2 = beta * beta
        x = memory_term + 2.0 * (1.0 - mu) * alpha
        if x == 0.0:
            return None
        outer = abs((mu - 1.0) * b2 * (2.0 * u - 1.0))
        radius = (beta / 2.0) * abs(x) * math.sqrt(1.0 + 4.0 * b2 / (x * x))
        shift = (mu - 1.0) * b2 * (2.0 * u - 1.0)
        return _sorted_abs([outer, outer, shift + radius, shift - radius])

    def memoryless_oracle(self, state: BellLikeState, endpoint: float) -> float:
        """Closed-form pure-bound ratio at mu = 0."""
        beta, p = state.beta, endpoint
        if beta == 0.0:
            return float('nan')
        if p >= 0.5:
            return beta * (1.0 + p) / (beta * p + 1.0)
        return beta * (1.0 - p * p) / (beta * (0.5 - p + p * p) + (1.0 - p))


class PauliChannelModel(BaseChannelModel):
    """Shared Kraus assembly for channels built from Pauli errors."""

    def pauli_probabilities(self, u: float) -> List[float]:
        raise NotImplementedError

    def single_qubit_kraus(self, u: float) -> List[np.ndarray]:
        probabilities = self.pauli_probabilities(u)
        return [math.sqrt(p) * sigma for p, sigma in zip(probabilities, PAULI) if p is not None]

    def _active_paulis(self, u: float):
        return [(k, p) for k, p in enumerate(self.pauli_probabilities(u)) if p is not None]

    def uncorrelated_terms(self, u: float) -> List[Tuple[str, np.ndarray]]:
        active = self._active_paulis(u)
        return [
            (f"{k1}{k2}", math.sqrt(p1 * p2) * kron(PAULI[k1], PAULI[k2]))
            for k1, p1 in active
            for k2, p2 in active
        ]

    def correlated_terms(self, u: float) -> List[Tuple[str, np.ndarray]]:
        return [
            (f"{k}{k}", math.sqrt(p) * kron(PAULI[k], PAULI[k]))
            for k, p in self._active_paulis(u)
        ]


class PhaseDampingModel(PauliChannelModel):
    """Correlated dephasing with p = exp(-gamma t): p0 = (1+p)/2, p3 = (1-p)/2."""

    FAMILY_ID = "pd"
    FAMILY_NAME = "Phase Damping"

    def pauli_probabilities(self, u: float) -> List[Optional[float]]:
        return [(1.0 + u) / 2.0, None, None, (1.0 - u) / 2.0]

    def closed_form(self, state: BellLikeState, u: float) -> np.ndarray:
        coherence = state.alpha * state.beta * (1.0 - (1.0 - u * u) * (1.0 - self.mu))
        return _corner_matrix(state.alpha ** 2, 0.0, 0.0, state.beta ** 2, coherence)

    def d_closed_form(self, state: BellLikeState, u: float) -> np.ndarray:
        coherence = 2.0 * u * state.alpha * state.beta * (1.0 - self.mu)
        return _corner_matrix(0.0, 0.0, 0.0, 0.0, coherence)

    def printed_singular_values(self, state: BellLikeState, u: float) -> Optional[np.ndarray]:
        sigma = abs(2.0 * u * state.alpha * state.beta * (self.mu - 1.0))
        return np.array([sigma, sigma, 0.0, 0.0])

    def oracle_ratio(self, state: BellLikeState, endpoint: float) -> Optional[float]:
        # mu-independent; at mu = 1 this is the limit of a stationary path
        return state.concurrence


class DepolarizingModel(PauliChannelModel):
    """Correlated depolarizing with p0 = (1+p)/2, p1 = p2 = p3 = (1-p)/6."""

    FAMILY_ID = "depol"
    FAMILY_NAME = "Depolarizing"

    def pauli_probabilities(self, u: float) -> List[Optional[float]]:
        flip = (1.0 - u) / 6.0
        return [(1.0 + u) / 2.0, flip, flip, flip]

    def closed_form(self, state: BellLikeState, u: float) -> np.ndarray:
        a2, b2, mu = state.alpha ** 2, state.beta ** 2, self.mu
        keep = (2.0 + u) / 3.0
        flip = (1.0 - u) / 3.0
        shrink = (1.0 + 2.0 * u) / 3.0
        one_excited = (1.0 - mu) * keep * flip
        return _corner_matrix(
            (1.0 - mu) * (a2 * keep ** 2 + b2 * flip ** 2) + mu * (a2 * keep + b2 * flip),
            one_excited,
            one_excited,
            (1.0 - mu) * (a2 * flip ** 2 + b2 * keep ** 2) + mu * (a2 * flip + b2 * keep),
            state.alpha * state.beta * ((1.0 - mu) * shrink ** 2 + mu)
        )

    def d_closed_form(self, state: BellLikeState, u: float) -> np.ndarray:
        a2, b2, mu = state.alpha ** 2, state.beta ** 2, self.mu
        keep = (2.0 + u) / 3.0
        flip = (1.0 - u) / 3.0
        d_one_excited = (1.0 - mu) * (flip - keep) / 3.0
        return _corner_matrix(
            (1.0 - mu) * 2.0 * (a2 * keep - b2 * flip) / 3.0 + mu * (a2 - b2) / 3.0,
            d_one_excited,
            d_one_excited,
            (1.0 - mu) * 2.0 * (b2 * keep - a2 * flip) / 3.0 + mu * (b2 - a2) / 3.0,
            4.0 * state.alpha * state.beta * (1.0 - mu) * (1.0 + 2.0 * u) / 9.0
        )

    def printed_singular_values(self, state: BellLikeState, u: float) -> Optional[np.ndarray]:
        alpha, beta, mu = state.alpha, state.beta, self.mu
        if alpha <= 0.0 or beta <= 0.0 or mu >= 1.0:
            return None
        k = (1.0 + 2.0 * u) * (1.0 - mu)
        c2 = 4.0 * alpha * alpha * beta * beta
        root = math.sqrt(4.0 * c2 + 9.0 * (1.0 - c2) / ((mu - 1.0) ** 2 * (2.0 * u + 1.0) ** 2))
        return _sorted_abs([k / 9.0, k / 9.0, (k + k * root) / 9.0, (k - k * root) / 9.0])

    def oracle_ratio(self, state: BellLikeState, endpoint: float) -> Optional[float]:
        if self.mu < 1.0:
            return None
        return math.sqrt(max(0.0, 1.0 - state.concurrence ** 2))
