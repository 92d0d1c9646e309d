# services/base_channel_model.py
from abc import ABC, abstractmethod
from typing import List, Optional, Tuple

import numpy as np

from models import BellLikeState, ChannelSpec, KrausSet
from services.matrix_core import kron


class BaseChannelModel(ABC):
    """
    Abstract base class for a correlated two-qubit noise channel.

    A model is bound to one ChannelSpec. Subclasses provide the single-qubit
    Kraus family, the fully correlated branch, the closed-form evolved matrix
    of a Bell-like state and its derivative with respect to the decay
    parameter u (P for amplitude damping, p for the Pauli channels).
    """

    # A unique identifier for the family
    FAMILY_ID = "base"
    # A user-friendly name for the family
    FAMILY_NAME = "Base Channel"
    # Integrate the pure bound in v = sqrt(u) instead of u
    SQRT_PATH = False

    def __init__(self, spec: ChannelSpec):
        """
        Initialize the model with a channel specification.
        """
        self.spec = spec
        self.mu = spec.mu

    @abstractmethod
    def single_qubit_kraus(self, u: float) -> List[np.ndarray]:
        """
        Single-qubit Kraus operators with their probabilities folded in.
        Must return 2x2 matrices whose E^dagger E sum to the identity.
        """
        pass

    @abstractmethod
    def correlated_terms(self, u: float) -> List[Tuple[str, np.ndarray]]:
        """Labelled 4x4 operators of the fully correlated (mu = 1) branch."""
        pass

    @abstractmethod
    def closed_form(self, state: BellLikeState, u: float) -> np.ndarray:
        """Evolved density matrix of the Bell-like state at decay parameter u."""
        pass

    @abstractmethod
    def d_closed_form(self, state: BellLikeState, u: float) -> np.ndarray:
        """Entrywise derivative of closed_form with respect to u."""
        pass

    def d_closed_form_time(self, state: BellLikeState, u: float, rate: float) -> np.ndarray:
        """
        Time derivative of closed_form along u(t) = exp(-rate t), i.e.
        d(rho)/du * (-rate u).
        """
        return self.d_closed_form(state, u) * (-rate * u)

    @abstractmethod
    def printed_singular_values(self, state: BellLikeState, u: float) -> Optional[np.ndarray]:
        """
        Closed-form singular values of d(rho)/du, descending, or None where
        the closed form is degenerate.
        """
        pass

    def oracle_ratio(self, state: BellLikeState, endpoint: float) -> Optional[float]:
        """Closed-form pure-bound ratio where one is known."""
        return None

    def uncorrelated_terms(self, u: float) -> List[Tuple[str, np.ndarray]]:
        """Tensor products B_i1 (x) B_i2 labelled 'i1i2'."""
        single = self.single_qubit_kraus(u)
        return [
            (f"{i1}{i2}", kron(b1, b2))
            for i1, b1 in enumerate(single)
            for i2, b2 in enumerate(single)
        ]

    def kraus_set(self, u: float) -> KrausSet:
        """
        Concatenated Kraus set sqrt(1-mu) * uncorrelated + sqrt(mu) * correlated.

        A branch with zero weight is left out.
        """
        operators, labels = [], []
        for weight, prefix, terms in (
            (1.0 - self.mu, 'un', self.uncorrelated_terms),
            (self.mu, 'co', self.correlated_terms)
        ):
            if weight <= 0.0:
                continue
            scale = np.sqrt(weight)
            for label, op in terms(u):
                operators.append(scale * op)
                labels.append(f"{prefix}:{label}")
        return KrausSet(tuple(operators), tuple(labels))

    def d_closed_form_path(self, state: BellLikeState, s: float) -> np.ndarray:
        """
        Derivative along the integration variable s of the pure bound:
        s = u, or s = sqrt(u) when SQRT_PATH is set.
        """
        return self.d_closed_form(state, s)
