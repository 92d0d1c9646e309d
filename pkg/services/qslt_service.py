# services/qslt_service.py
"""
Quantum speed limit service.

Pure-state bound: tau_QSL / tau = sin^2 B(rho0, rho_tau) / int ||rho_dot||_op dt.
Because u(t) = exp(-rate t) is monotone the path integral is taken over the
decay parameter from the endpoint up to 1, so the ratio depends on the
endpoint only. Amplitude damping is integrated in v = sqrt(P), which keeps
the 1/sqrt(P) coherence derivative bounded.

Mixed-state bound: relative purity over the window [tau, tau + tau_D] with
time averages of sum(sigma_i rho_i) and sqrt(sum(sigma_i^2)).
"""

import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from models import BellLikeState, ChannelSpec, DecayPoint, DensityMatrix, MixedBoundQuery, PureBoundQuery, QsltResult
from services.base_channel_model import BaseChannelModel
from services.channel_registry import get_model
from services.error_handling import NumericError
from services.matrix_core import hermitian_singular_values, schatten_norms
from services.numerics_config import get_numerics_config
from services.quadrature import adaptive_simpson
from services.state_service import bell_like_density, bures_sin2, relative_purity

logger = logging.getLogger(__name__)

NORM_LABELS = ('l1', 'l2', 'linf')


def _path_variable(model: BaseChannelModel, u: float) -> float:
    return math.sqrt(u) if model.SQRT_PATH else u


def _path_integrand(model: BaseChannelModel, state: BellLikeState):
    def integrand(s: float) -> np.ndarray:
        return schatten_norms(hermitian_singular_values(model.d_closed_form_path(state, s)))
    return integrand


def path_lengths(spec: ChannelSpec, state: BellLikeState, endpoint: DecayPoint,
                 tol: Optional[float] = None) -> np.ndarray:
    """(l1, l2, linf) lengths of the decay path from u = 1 down to the endpoint."""
    model = get_model(spec)
    lo = _path_variable(model, endpoint.value)
    return np.asarray(adaptive_simpson(_path_integrand(model, state), lo, 1.0, tol).value, dtype=float)


def _pure_result(numerator: float, lengths: np.ndarray, oracle: Optional[float]) -> QsltResult:
    stationary_tol = get_numerics_config().get_stationary_tol()
    denominator = float(lengths[2])
    path = {label: float(v) for label, v in zip(NORM_LABELS, lengths)}
    if denominator < stationary_tol:
        if numerator < stationary_tol:
            return QsltResult('pure', numerator, denominator, None, True, path, oracle=oracle)
        raise NumericError(f"State moved (sin^2 B = {numerator:.3e}) along a path of zero length")
    # l=inf gives the largest reciprocal term
    value = max(numerator / length for length in lengths if length > 0)
    return QsltResult('pure', numerator, denominator, float(value), False, path, oracle=oracle)


def qslt_pure_ratio(q: PureBoundQuery, tol: Optional[float] = None) -> QsltResult:
    """
    tau_QSL / tau under the operator-norm bound for a pure initial state.

    A query whose endpoint is 1, or whose channel leaves the state fixed,
    comes back with stationary=True and value None.
    """
    model = get_model(q.spec)
    rho0 = bell_like_density(q.state)
    rho_tau = DensityMatrix(model.closed_form(q.state, q.endpoint.value))
    numerator = bures_sin2(rho0, rho_tau)
    lengths = path_lengths(q.spec, q.state, q.endpoint, tol)
    result = _pure_result(numerator, lengths, model.oracle_ratio(q.state, q.endpoint.value))
    logger.debug(f"Pure bound {q.spec.family.value} mu={q.spec.mu} alpha={q.state.alpha:.6g} "
                 f"endpoint={q.endpoint.value:.6g}: value={result.value}")
    return result


def ratio_curve(spec: ChannelSpec, state: BellLikeState, endpoints: Sequence[float],
                tol: Optional[float] = None) -> List[QsltResult]:
    """
    Pure-bound results for many endpoints from one sweep down the decay path.

    Segment integrals between consecutive endpoints are accumulated from
    u = 1 downwards; the tolerance is shared out by segment length.
    """
    if not endpoints:
        return []
    model = get_model(spec)
    tol = get_numerics_config().get_quadrature_abs_tol() if tol is None else tol
    points = sorted({DecayPoint(e).value for e in endpoints}, reverse=True)
    integrand = _path_integrand(model, state)
    rho0 = bell_like_density(state)

    s_min = _path_variable(model, points[-1])
    span = max(1.0 - s_min, 1e-300)
    lengths = np.zeros(3)
    upper = 1.0
    by_endpoint: Dict[float, QsltResult] = {}
    for u in points:
        s = _path_variable(model, u)
        if s < upper:
            segment = adaptive_simpson(integrand, s, upper, tol * (upper - s) / span)
            lengths = lengths + np.asarray(segment.value, dtype=float)
            upper = s
        rho_tau = DensityMatrix(model.closed_form(state, u))
        by_endpoint[u] = _pure_result(bures_sin2(rho0, rho_tau), lengths.copy(), model.oracle_ratio(state, u))

    return [by_endpoint[DecayPoint(e).value] for e in endpoints]


def qslt_mixed(q: MixedBoundQuery, tol: Optional[float] = None) -> QsltResult:
    """
    Mixed-state bound over the window [tau, tau + tau_D].

    tau_QSL = max(1/avg(sum sigma_i rho_i), 1/avg(sqrt(sum sigma_i^2))) * |f - 1| * Tr(rho_tau^2)
    where sigma_i are singular values of rho_dot = d(rho)/du * (-rate u) and
    rho_i those of rho_tau, both sorted descending. A window over which the
    state does not move gives stationary=True and value 0.
    """
    model = get_model(q.spec)
    rate = q.spec.rate
    stationary_tol = get_numerics_config().get_stationary_tol()

    rho_tau = DensityMatrix(model.closed_form(q.state, math.exp(-rate * q.tau)))
    rho_end = DensityMatrix(model.closed_form(q.state, math.exp(-rate * (q.tau + q.tau_d))))
    f = relative_purity(rho_tau, rho_end)
    purity = rho_tau.purity()
    numerator = abs(f - 1.0) * purity
    rho_sv = hermitian_singular_values(rho_tau.m)

    def integrand(t: float) -> np.ndarray:
        u = math.exp(-rate * t)
        sigma = hermitian_singular_values(model.d_closed_form_time(q.state, u, rate))
        return np.array([float(np.dot(sigma, rho_sv)), math.sqrt(float(np.dot(sigma, sigma)))])

    totals = np.asarray(adaptive_simpson(integrand, q.tau, q.tau + q.tau_d, tol).value, dtype=float)
    averages = totals / q.tau_d
    avg = {'sigma_rho': float(averages[0]), 'sigma_l2': float(averages[1])}

    if numerator < stationary_tol and float(np.max(averages)) * q.tau_d < stationary_tol:
        return QsltResult('mixed', numerator, float(np.min(averages)), 0.0, True, averages=avg)
    if np.min(averages) <= 0.0:
        raise NumericError(f"Relative purity changed by {numerator:.3e} with a vanishing speed average")

    value = max(1.0 / averages[0], 1.0 / averages[1]) * numerator
    logger.debug(f"Mixed bound {q.spec.family.value} mu={q.spec.mu} tau={q.tau:.6g}: value={value:.12g}")
    return QsltResult('mixed', numerator, float(np.min(averages)), float(value), False, averages=avg)


def oracle_ratio(spec: ChannelSpec, state: BellLikeState, endpoint: DecayPoint) -> Optional[float]:
    """Closed-form pure-bound ratio: C for phase damping, sqrt(1 - C^2) for depolarizing at mu = 1."""
    return get_model(spec).oracle_ratio(state, endpoint.value)


def memoryless_ad_oracle(state: BellLikeState, endpoint: DecayPoint) -> float:
    """Closed-form amplitude-damping ratio at mu = 0."""
    return get_model(ChannelSpec('ad', 0.0)).memoryless_oracle(state, endpoint.value)


def pd_mixed_closed_form(state: BellLikeState, mu: float, tau: float, tau_d: float, rate: float) -> float:
    """
    Phase-damping mixed bound 2 alpha beta tau_D (mu + (1 - mu) exp(-2 rate tau)).

    At mu = 1 this is the limit value; the window itself is stationary there.
    """
    return 2.0 * state.alpha * state.beta * tau_d * (mu + (1.0 - mu) * math.exp(-2.0 * rate * tau))
