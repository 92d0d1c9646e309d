# services/quadrature.py
"""
Adaptive Simpson quadrature for scalar or vector-valued integrands.

Vector integrands (numpy arrays) are refined until every component meets the
tolerance, so the l=1, l=2 and l=inf path lengths come out of one pass.
Node placement depends only on the integrand and the tolerance.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from services.error_handling import NumericError
from services.numerics_config import get_numerics_config

logger = logging.getLogger(__name__)

Value = Union[float, np.ndarray]


@dataclass
class QuadratureResult:
    value: Value
    error: float
    evaluations: int
    max_depth_hit: bool = False


def _simpson(fa: Value, fm: Value, fb: Value, h: float) -> Value:
    """h/3 * (f(a) + 4 f(m) + f(b)) with h the half-width."""
    return h / 3.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(f: Callable[[float], Value], a: float, b: float,
                     tol: Optional[float] = None,
                     max_depth: Optional[int] = None,
                     rel_tol: Optional[float] = None) -> QuadratureResult:
    """
    Integrate f over [a, b] by recursive Simpson subdivision.

    Args:
        f: Integrand returning a float or a 1-d numpy array
        a: Lower bound
        b: Upper bound (a > b integrates in reverse and flips the sign)
        tol: Absolute tolerance, defaults to quadrature_abs_tol
        max_depth: Recursion limit, defaults to quadrature_max_depth
        rel_tol: Floor on the tolerance relative to the first Simpson
            estimate, defaults to quadrature_rel_tol

    Returns:
        QuadratureResult with the Richardson-corrected value

    Raises:
        NumericError: if the integrand returns non-finite values
    """
    config = get_numerics_config()
    tol = config.get_quadrature_abs_tol() if tol is None else tol
    max_depth = config.get_quadrature_max_depth() if max_depth is None else max_depth
    rel_tol = config.get_quadrature_rel_tol() if rel_tol is None else rel_tol

    if a == b:
        zero = np.zeros_like(np.asarray(f(a), dtype=float))
        return QuadratureResult(zero if zero.ndim else 0.0, 0.0, 1)
    if a > b:
        result = adaptive_simpson(f, b, a, tol, max_depth, rel_tol)
        result.value = -result.value
        return result

    state = {'evaluations': 0, 'depth_hit': False}

    def evaluate(x: float) -> Value:
        state['evaluations'] += 1
        y = f(x)
        if not np.all(np.isfinite(y)):
            raise NumericError(f"Integrand is not finite at x={x!r}")
        return y

    def _adaptive(a: float, b: float, fa: Value, fm: Value, fb: Value,
                  s_whole: Value, depth: int, tol: float):
        m = (a + b) / 2.0
        h = (b - a) / 2.0
        lm = (a + m) / 2.0
        rm = (m + b) / 2.0
        flm = evaluate(lm)
        frm = evaluate(rm)

        s_left = _simpson(fa, flm, fm, h / 2.0)
        s_right = _simpson(fm, frm, fb, h / 2.0)
        s_combined = s_left + s_right
        error_estimate = (s_combined - s_whole) / 15.0
        error = float(np.max(np.abs(error_estimate)))

        if error < tol or depth >= max_depth:
            if depth >= max_depth and error >= tol:
                state['depth_hit'] = True
            return s_combined + error_estimate, error

        left, left_error = _adaptive(a, m, fa, flm, fm, s_left, depth + 1, tol / 2.0)
        right, right_error = _adaptive(m, b, fm, frm, fb, s_right, depth + 1, tol / 2.0)
        return left + right, left_error + right_error

    fa = evaluate(a)
    fb = evaluate(b)
    fm = evaluate((a + b) / 2.0)
    s_whole = _simpson(fa, fm, fb, (b - a) / 2.0)
    tol = max(tol, rel_tol * float(np.max(np.abs(s_whole))))
    value, error = _adaptive(a, b, fa, fm, fb, s_whole, 0, tol)

    if state['depth_hit']:
        logger.debug(f"Quadrature on [{a:.6g}, {b:.6g}] reached max depth {max_depth}")
    logger.debug(f"Quadrature on [{a:.6g}, {b:.6g}]: {state['evaluations']} evaluations, error {error:.2e}")
    return QuadratureResult(value, error, state['evaluations'], state['depth_hit'])

