"""
Small dense complex-matrix kernel.

Kronecker products, traces, Hermitian eigenvalues and singular values for the
2x2 and 4x4 matrices used by the two-qubit channels. Matrices are plain
numpy arrays of dtype complex128; every function checks the shape it accepts.
"""

import logging
from typing import Iterable, Sequence, Tuple

import numpy as np

from services.error_handling import ContractError, DimensionError, NumericError

logger = logging.getLogger(__name__)

SUPPORTED_SHAPES = ((2, 2), (4, 4))
HERMITIAN_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (I2, SIGMA_X, SIGMA_Y, SIGMA_Z)


def as_matrix(m, shapes: Iterable[Tuple[int, int]] = SUPPORTED_SHAPES) -> np.ndarray:
    """
    Convert input to a complex matrix and check its shape.

    Args:
        m: Array-like input
        shapes: Accepted (rows, cols) pairs

    Returns:
        complex128 numpy array

    Raises:
        DimensionError: if the shape is not accepted
    """
    arr = np.asarray(m, dtype=complex)
    shapes = tuple(shapes)
    if arr.shape not in shapes:
        raise DimensionError(f"Unsupported matrix shape {arr.shape}; expected one of {shapes}")
    return arr


def _require_finite(m: np.ndarray) -> None:
    if not np.all(np.isfinite(m)):
        raise NumericError("Matrix has non-finite entries")


def kron(a, b) -> np.ndarray:
    """
    Kronecker product of two 2x2 matrices.

    kron(a, b)[2i+k, 2j+l] = a[i, j] * b[k, l]
    """
    a = as_matrix(a, ((2, 2),))
    b = as_matrix(b, ((2, 2),))
    return np.kron(a, b)


def mat_trace_product(a, b) -> complex:
    """Tr(a @ b) without forming the product."""
    a = as_matrix(a, ((4, 4),))
    b = as_matrix(b, ((4, 4),))
    return complex(np.einsum('ij,ji->', a, b))


def hermiticity_error(m) -> float:
    """Largest entry of |m - m^dagger|."""
    m = as_matrix(m)
    return float(np.max(np.abs(m - m.conj().T)))


def eig_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """
    Real eigenvalues of a Hermitian 4x4 matrix, sorted descending.

    The input is symmetrized to (m + m^dagger)/2 before the LAPACK solve.

    Raises:
        ContractError: if m is not Hermitian within tol
    """
    m = as_matrix(m, ((4, 4),))
    _require_finite(m)
    err = hermiticity_error(m)
    if err > tol:
        raise ContractError(f"Matrix is not Hermitian (max deviation {err:.3e} > {tol:.1e})")
    values = np.linalg.eigvalsh((m + m.conj().T) / 2)
    return values[::-1].copy()


def singular_values(m) -> np.ndarray:
    """
    Singular values of a 4x4 matrix, sorted descending.

    Raises:
        NumericError: on non-finite entries
    """
    m = as_matrix(m, ((4, 4),))
    _require_finite(m)
    return np.linalg.svd(m, compute_uv=False)


def hermitian_singular_values(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Singular values of a Hermitian matrix as sorted |eigenvalues|."""
    return np.sort(np.abs(eig_hermitian(m, tol)))[::-1]


def schatten_norms(sv: Sequence[float]) -> np.ndarray:
    """(l=1, l=2, l=inf) norms as one vector."""
    sv = np.asarray(sv, dtype=float)
    return np.array([np.sum(sv), np.sqrt(np.sum(sv * sv)), np.max(sv)])
