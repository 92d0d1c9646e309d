# models.py
"""Domain value types shared by the services and the command line."""

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from services.error_handling import ContractError, DomainError, UnknownFamilyError
from services.matrix_core import I4, as_matrix, eig_hermitian, hermiticity_error
from services.numerics_config import get_numerics_config


class ChannelFamily(str, Enum):
    AD = 'ad'
    PD = 'pd'
    DEPOL = 'depol'

    @classmethod
    def parse(cls, value) -> 'ChannelFamily':
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise UnknownFamilyError(f"Unknown channel family '{value}'; expected one of ad, pd, depol")


@dataclass(frozen=True)
class BellLikeState:
    """alpha|00> + beta|11> with real nonnegative amplitudes."""
    alpha: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0) or math.isnan(self.alpha):
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        object.__setattr__(self, 'alpha', float(self.alpha))

    @property
    def beta(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.alpha * self.alpha))

    @property
    def concurrence(self) -> float:
        return 2.0 * self.alpha * self.beta

    @classmethod
    def from_concurrence(cls, c: float) -> 'BellLikeState':
        """State with concurrence c on the alpha <= sqrt(2)/2 branch."""
        if not (0.0 <= c <= 1.0) or math.isnan(c):
            raise DomainError(f"concurrence must lie in [0, 1], got {c}")
        alpha = math.sqrt(max(0.0, (1.0 - math.sqrt(max(0.0, 1.0 - c * c))) / 2.0))
        return cls(min(alpha, 1.0))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Two-qubit density matrix in the basis |00>, |01>, |10>, |11>.

    Construction checks Hermiticity, unit trace and (unless disabled)
    positivity up to the configured tolerances.
    """
    m: np.ndarray
    check_positivity: bool = True

    def __post_init__(self):
        config = get_numerics_config()
        arr = np.array(as_matrix(self.m, ((4, 4),)), dtype=complex)
        err = hermiticity_error(arr)
        if err > config.get_hermitian_tol():
            raise ContractError(f"Density matrix is not Hermitian (deviation {err:.3e})")
        trace = complex(np.trace(arr))
        if abs(trace - 1.0) > config.get_trace_tol():
            raise ContractError(f"Density matrix trace is {trace.real:.12g}, expected 1")
        arr = (arr + arr.conj().T) / 2
        arr.setflags(write=False)
        object.__setattr__(self, 'm', arr)
        if self.check_positivity:
            smallest = self.min_eigenvalue()
            if smallest < -config.get_positivity_tol():
                raise ContractError(f"Density matrix has negative eigenvalue {smallest:.3e}")

    def eigenvalues(self) -> np.ndarray:
        return eig_hermitian(self.m)

    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[-1])

    def trace(self) -> float:
        return float(np.trace(self.m).real)

    def purity(self) -> float:
        return float(np.einsum('ij,ji->', self.m, self.m).real)

    def is_pure(self, tol: Optional[float] = None) -> bool:
        tol = get_numerics_config().get_purity_tol() if tol is None else tol
        return abs(self.purity() - 1.0) <= tol


@dataclass(frozen=True)
class DecayPoint:
    """Channel decay parameter in (0, 1]: P = exp(-Gamma t) or p = exp(-gamma t)."""
    value: float

    def __post_init__(self):
        if not (0.0 < self.value <= 1.0) or math.isnan(self.value):
            raise DomainError(f"decay parameter must lie in (0, 1], got {self.value}")
        object.__setattr__(self, 'value', float(self.value))

    @classmethod
    def at_time(cls, rate: float, t: float) -> 'DecayPoint':
        return cls(math.exp(-rate * t))


@dataclass(frozen=True)
class ChannelSpec:
    """Channel family, correlation strength mu and decay rate."""
    family: ChannelFamily
    mu: float
    rate: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, 'family', ChannelFamily.parse(self.family))
        if not (0.0 <= self.mu <= 1.0) or math.isnan(self.mu):
            raise DomainError(f"mu must lie in [0, 1], got {self.mu}")
        object.__setattr__(self, 'mu', float(self.mu))
        rate = self.rate
        if rate is None:
            rate = get_numerics_config().get_default_rate(self.family.value)
        if not rate > 0:
            raise DomainError(f"rate must be positive, got {rate}")
        object.__setattr__(self, 'rate', float(rate))


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Ordered 4x4 Kraus operators with their labels."""
    operators: Tuple[np.ndarray, ...]
    labels: Tuple[str, ...]

    def __post_init__(self):
        if len(self.operators) != len(self.labels):
            raise ContractError("KrausSet needs one label per operator")
        ops = []
        for op in self.operators:
            arr = np.array(as_matrix(op, ((4, 4),)), dtype=complex)
            arr.setflags(write=False)
            ops.append(arr)
        object.__setattr__(self, 'operators', tuple(ops))
        object.__setattr__(self, 'labels', tuple(self.labels))

    def __len__(self) -> int:
        return len(self.operators)

    def stacked(self) -> np.ndarray:
        return np.stack(self.operators) if self.operators else np.zeros((0, 4, 4), dtype=complex)

    def completeness_error(self) -> float:
        """Frobenius norm of sum(E^dagger E) - I."""
        ops = self.stacked()
        total = np.einsum('kji,kjl->il', ops.conj(), ops)
        return float(np.linalg.norm(total - I4))


@dataclass(frozen=True)
class PureBoundQuery:
    spec: ChannelSpec
    state: BellLikeState
    endpoint: DecayPoint


@dataclass(frozen=True)
class MixedBoundQuery:
    spec: ChannelSpec
    state: BellLikeState
    tau: float
    tau_d: float

    def __post_init__(self):
        if not self.tau >= 0:
            raise DomainError(f"tau must be >= 0, got {self.tau}")
        if not self.tau_d > 0:
            raise DomainError(f"tau_d must be > 0, got {self.tau_d}")


@dataclass
class QsltResult:
    """
    Outcome of a speed-limit evaluation.

    For the pure bound `value` is tau_QSL/tau and `denominator` the
    operator-norm path length; for the mixed bound `value` is tau_QSL and
    `denominator` the smaller of the two time averages.
    """
    bound: str
    numerator: float
    denominator: float
    value: Optional[float]
    stationary: bool
    path_lengths: Dict[str, float] = field(default_factory=dict)
    averages: Dict[str, float] = field(default_factory=dict)
    oracle: Optional[float] = None

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class ScanGrid:
    """Sweep over (mu, C, endpoint), iterated row-major mu -> C -> endpoint."""
    family: ChannelFamily
    mu_values: Tuple[float, ...]
    c_values: Tuple[float, ...]
    endpoint_values: Tuple[float, ...]
    fixed: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'family', ChannelFamily.parse(self.family))
        for name in ('mu_values', 'c_values', 'endpoint_values'):
            values = tuple(float(v) for v in getattr(self, name))
            if not values:
                raise DomainError(f"{name} must not be empty")
            object.__setattr__(self, name, values)
        if any(not 0.0 <= v <= 1.0 for v in self.mu_values):
            raise DomainError("mu values must lie in [0, 1]")
        if any(not 0.0 <= v <= 1.0 for v in self.c_values):
            raise DomainError("concurrence values must lie in [0, 1]")
        if any(not 0.0 < v <= 1.0 for v in self.endpoint_values):
            raise DomainError("endpoint values must lie in (0, 1]")

    def iter_points(self) -> Iterator[Tuple[float, float, float]]:
        for mu in self.mu_values:
            for c in self.c_values:
                for endpoint in self.endpoint_values:
                    yield mu, c, endpoint

    def __len__(self) -> int:
        return len(self.mu_values) * len(self.c_values) * len(self.endpoint_values)


@dataclass
class ScanRow:
    """One CSV row; `values` keeps column order."""
    values: Dict[str, Union[float, bool, None]]

    @property
    def columns(self) -> List[str]:
        return list(self.values.keys())

    def __getitem__(self, column: str) -> Union[float, bool, None]:
        return self.values[column]


@dataclass
class CriticalResult:
    exists: bool
    value: Optional[float]
    bracket: Optional[Tuple[float, float]]
    iterations: int

    def to_dict(self) -> Dict:
        data = asdict(self)
        data['bracket'] = list(self.bracket) if self.bracket is not None else None
        return data


def column_label(prefix: str, value: float) -> str:
    """Column names such as mu_0, mu_0.3, c_0.2."""
    return f"{prefix}_{value:g}"


def rows_columns(rows: Sequence[ScanRow]) -> List[str]:
    return rows[0].columns if rows else []
