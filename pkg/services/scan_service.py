# services/scan_service.py
"""
Scan Service

Parameter sweeps and critical-value searches over the pure- and mixed-state
speed limits, and the generators for the figure datasets.

Critical searches run a coarse bracketing scan (coarse_step) first and then
bisect the bracket down to bisection_tol. The reported value is the bracket
end inside the qualifying region.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config_loader import default_config
from models import (BellLikeState, ChannelSpec, CriticalResult, DecayPoint,
                    MixedBoundQuery, PureBoundQuery, QsltResult, ScanGrid, ScanRow, column_label)
from services.cache_service import cache_ratio, get_cached_ratio
from services.error_handling import DomainError, UnknownFigureError
from services.numerics_config import get_numerics_config
from services.qslt_service import qslt_mixed, qslt_pure_ratio, ratio_curve

logger = logging.getLogger(__name__)

FIGURE_IDS = ('fig1a', 'fig1b', 'fig2', 'fig3', 'fig4', 'fig5a', 'fig5b')

BELL_ALPHA = math.sqrt(2.0) / 2.0


def _require_open(name: str, value: float, lo_closed: bool = False, hi_closed: bool = False) -> None:
    lo_ok = value >= 0.0 if lo_closed else value > 0.0
    hi_ok = value <= 1.0 if hi_closed else value < 1.0
    if not (lo_ok and hi_ok) or math.isnan(value):
        interval = f"{'[' if lo_closed else '('}0, 1{']' if hi_closed else ')'}"
        raise DomainError(f"{name} must lie in {interval}, got {value}")


def bisect(predicate: Callable[[float], bool], lo: float, hi: float, accuracy: float) -> Tuple[float, float, int]:
    """
    Shrink [lo, hi] with predicate(lo) False and predicate(hi) True.

    Returns:
        (lo, hi, iterations) with hi - lo <= accuracy
    """
    iterations = 0
    while hi - lo > accuracy:
        mid = (lo + hi) / 2.0
        if predicate(mid):
            hi = mid
        else:
            lo = mid
        iterations += 1
    return lo, hi, iterations


def axis_grid(kind: str, points: int, upper: float = 1.0) -> List[float]:
    """
    Sweep axes: 'decay' is k/n for k = 1..n (0.5 is hit exactly for even n),
    'unit' and 'time' are evenly spaced including both ends.
    """
    if kind == 'decay':
        return [k / points for k in range(1, points + 1)]
    if kind in ('unit', 'time'):
        return [float(v) for v in np.linspace(0.0, upper, points)]
    raise ValueError(f"Unknown axis kind '{kind}'")


class ScanService:
    """Service for sweeps, critical searches and figure datasets."""

    def __init__(self, workers: Optional[int] = None, figures: Optional[Dict[str, Any]] = None,
                 use_cache: bool = True):
        """
        Initialize the scan service.

        Args:
            workers: Thread pool size for independent rows, defaults to the numerics config
            figures: The 'figures' configuration section
            use_cache: Memoize pure-bound results across searches
        """
        self.logger = logging.getLogger(__name__)
        self.workers = workers or get_numerics_config().get_workers()
        self.figures = dict(default_config()['figures'])
        self.figures.update(figures or {})
        self.use_cache = use_cache

    # ------------------------------------------------------------------
    # Evaluation helpers
    # ------------------------------------------------------------------

    def _map(self, fn: Callable, items: Sequence) -> List:
        """Ordered map, threaded when more than one worker is configured."""
        if self.workers <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            return list(executor.map(fn, items))

    def pure_result(self, family: str, mu: float, alpha: float, endpoint: float) -> QsltResult:
        settings = get_numerics_config().get_quadrature_settings()
        if self.use_cache:
            cached = get_cached_ratio(family, mu, alpha, endpoint, settings)
            if cached is not None:
                return cached
        result = qslt_pure_ratio(PureBoundQuery(ChannelSpec(family, mu), BellLikeState(alpha), DecayPoint(endpoint)))
        if self.use_cache:
            cache_ratio(family, mu, alpha, endpoint, result, settings)
        return result

    def ratio(self, family: str, mu: float, alpha: float, endpoint: float) -> Optional[float]:
        """Pure-bound ratio, None on a stationary path."""
        return self.pure_result(family, mu, alpha, endpoint).value

    def curve(self, family: str, mu: float, alpha: float, endpoints: Sequence[float]) -> List[Optional[float]]:
        """Ratios along a decay sweep; results are also placed in the cache."""
        results = ratio_curve(ChannelSpec(family, mu), BellLikeState(alpha), list(endpoints))
        if self.use_cache:
            settings = get_numerics_config().get_quadrature_settings()
            for endpoint, result in zip(endpoints, results):
                if get_cached_ratio(family, mu, alpha, endpoint, settings) is None:
                    cache_ratio(family, mu, alpha, endpoint, result, settings)
        return [r.value for r in results]

    @staticmethod
    def _speedup(value: Optional[float], eps: float) -> bool:
        return value is not None and value < 1.0 - eps

    def _correlation_gain(self, mu: float, alpha: float, p_tau: float) -> float:
        """h = ratio(mu) - ratio(0) for amplitude damping; 0 on stationary paths."""
        with_memory = self.ratio('ad', mu, alpha, p_tau)
        memoryless = self.ratio('ad', 0.0, alpha, p_tau)
        if with_memory is None or memoryless is None:
            return 0.0
        return with_memory - memoryless

    # ------------------------------------------------------------------
    # Critical searches
    # ------------------------------------------------------------------

    def find_p_tau_c(self, c: float, mu: float) -> CriticalResult:
        """
        Lower edge of the region [P_tau_c, 1] where memory speeds up amplitude damping.

        h(P) = ratio(mu, P) - ratio(0, P). A point counts as sped up when
        h < -gain_threshold; for weakly entangled states |h| stays of order
        C^2 / 5, and with the default threshold no P_tau_c exists below
        C of about 0.048 at mu = 1.

        A coarse scan runs down from P = 1 - coarse_step. The first run of
        sped-up points that starts there is followed down to where the
        condition fails, and that bracket is bisected. If it holds down to
        the bottom of the grid the bottom point is returned.
        """
        _require_open('concurrence', c)
        _require_open('mu', mu, hi_closed=True)
        config = get_numerics_config()
        threshold = config.get_gain_threshold()
        alpha = BellLikeState.from_concurrence(c).alpha
        step = config.get_coarse_step()
        grid = [round(1.0 - k * step, 12) for k in range(1, int(math.ceil(1.0 / step)))]
        grid = [p for p in grid if p > 0.0]

        with_memory = self.curve('ad', mu, alpha, grid)
        memoryless = self.curve('ad', 0.0, alpha, grid)
        gains = [
            (a - b) if a is not None and b is not None else 0.0
            for a, b in zip(with_memory, memoryless)
        ]

        if gains[0] >= -threshold:
            if all(g >= -threshold for g in gains):
                self.logger.info(f"No P_tau_c for C={c} mu={mu}: memory never speeds up the evolution")
            else:
                self.logger.info(f"No P_tau_c for C={c} mu={mu}: no speedup adjacent to P = 1")
            return CriticalResult(False, None, None, 0)

        hi_index = 0
        while hi_index + 1 < len(grid) and gains[hi_index + 1] < -threshold:
            hi_index += 1
        if hi_index + 1 == len(grid):
            bottom = grid[-1]
            self.logger.info(f"P_tau_c for C={c} mu={mu} lies at or below the grid bottom {bottom}")
            return CriticalResult(True, bottom, (bottom, bottom), 0)

        lo, hi = grid[hi_index + 1], grid[hi_index]
        lo, hi, iterations = bisect(
            lambda p: self._correlation_gain(mu, alpha, p) < -threshold, lo, hi, config.get_bisection_tol())
        self.logger.debug(f"P_tau_c(C={c}, mu={mu}) in [{lo:.9f}, {hi:.9f}] after {iterations} steps")
        return CriticalResult(True, hi, (lo, hi), iterations)

    def _first_crossing(self, name: str, predicate: Callable[[float], bool]) -> CriticalResult:
        """Smallest x in [0, 1] with predicate(x), coarse scan then bisection."""
        config = get_numerics_config()
        if predicate(0.0):
            return CriticalResult(True, 0.0, (0.0, 0.0), 0)
        step = config.get_coarse_step()
        previous = 0.0
        k = 1
        while previous < 1.0:
            x = min(1.0, round(k * step, 12))
            if predicate(x):
                lo, hi, iterations = bisect(predicate, previous, x, config.get_bisection_tol())
                self.logger.debug(f"{name} in [{lo:.9f}, {hi:.9f}] after {iterations} steps")
                return CriticalResult(True, hi, (lo, hi), iterations)
            previous = x
            k += 1
        self.logger.info(f"No {name} on [0, 1]")
        return CriticalResult(False, None, None, 0)

    def find_c_c(self, mu: float, p_tau: float) -> CriticalResult:
        """
        Smallest concurrence whose amplitude-damping ratio drops below 1 - crossover_eps.

        The ratio leaves 1 quadratically in C, so C_c scales with
        sqrt(crossover_eps); its mu-dependence shrinks with it.
        """
        eps = get_numerics_config().get_crossover_eps()
        _require_open('mu', mu, lo_closed=True, hi_closed=True)
        _require_open('p_tau', p_tau)
        return self._first_crossing(
            f"C_c(mu={mu}, P_tau={p_tau})",
            lambda c: self._speedup(self.ratio('ad', mu, BellLikeState.from_concurrence(c).alpha, p_tau), eps))

    def find_mu_critical(self, c: float, p_tau: float) -> CriticalResult:
        """Smallest correlation strength whose depolarizing ratio shows a speedup."""
        _require_open('concurrence', c)
        _require_open('p_tau', p_tau)
        alpha = BellLikeState.from_concurrence(c).alpha
        eps = get_numerics_config().get_speedup_eps()
        return self._first_crossing(
            f"mu_critical(C={c}, p_tau={p_tau})",
            lambda mu: self._speedup(self.ratio('depol', mu, alpha, p_tau), eps))

    # ------------------------------------------------------------------
    # Grid scan
    # ------------------------------------------------------------------

    def run_grid(self, grid: ScanGrid) -> List[ScanRow]:
        """Pure-bound ratio for every (mu, C, endpoint), row-major mu -> C -> endpoint."""
        family = grid.family.value

        def evaluate(point):
            mu, c, endpoint = point
            result = self.pure_result(family, mu, BellLikeState.from_concurrence(c).alpha, endpoint)
            return ScanRow({
                'mu': mu, 'c': c, 'endpoint': endpoint,
                'value': result.value, 'stationary': result.stationary
            })

        rows = self._map(evaluate, list(grid.iter_points()))
        self.logger.info(f"Grid scan {family}: {len(rows)} rows")
        return rows

    # ------------------------------------------------------------------
    # Figure datasets
    # ------------------------------------------------------------------

    def figure_dataset(self, figure_id: str, points: Optional[int] = None) -> List[ScanRow]:
        """
        Rows behind a figure.

        Raises:
            UnknownFigureError: for an id outside FIGURE_IDS
        """
        if figure_id not in FIGURE_IDS:
            raise UnknownFigureError(f"Unknown figure id '{figure_id}'; expected one of {', '.join(FIGURE_IDS)}")
        points = points or get_numerics_config().get_grid_points()
        builder = getattr(self, f"_{figure_id}")
        rows = builder(points)
        self.logger.info(f"Generated {figure_id}: {len(rows)} rows x {len(rows[0].columns) if rows else 0} columns")
        return rows

    @staticmethod
    def _assemble(axis_name: str, axis: Sequence[float], columns: Dict[str, List]) -> List[ScanRow]:
        rows = []
        for i, x in enumerate(axis):
            values = {axis_name: x}
            for name, column in columns.items():
                values[name] = column[i]
            rows.append(ScanRow(values))
        return rows

    def _mu_values(self) -> List[float]:
        return [float(mu) for mu in self.figures['mu_values']]

    def _decay_sweep(self, alpha: float, points: int) -> List[ScanRow]:
        axis = axis_grid('decay', points)
        mus = self._mu_values()
        curves = self._map(lambda mu: self.curve('ad', mu, alpha, axis), mus)
        return self._assemble('p_tau', axis, {column_label('mu', mu): col for mu, col in zip(mus, curves)})

    def _fig1a(self, points: int) -> List[ScanRow]:
        return self._decay_sweep(0.0, points)

    def _fig1b(self, points: int) -> List[ScanRow]:
        return self._decay_sweep(BELL_ALPHA, points)

    def _fig2(self, points: int) -> List[ScanRow]:
        # find_p_tau_c needs C in (0, 1)
        axis = axis_grid('unit', points)[1:-1]
        mus = [mu for mu in self._mu_values() if mu > 0.0]

        def column(mu):
            return [self.find_p_tau_c(c, mu).value for c in axis]

        curves = self._map(column, mus)
        return self._assemble('c', axis, {column_label('mu', mu): col for mu, col in zip(mus, curves)})

    def _concurrence_sweep(self, family: str, endpoint: float, points: int) -> List[ScanRow]:
        axis = axis_grid('unit', points)
        mus = self._mu_values()

        def column(mu):
            return [self.ratio(family, mu, BellLikeState.from_concurrence(c).alpha, endpoint) for c in axis]

        curves = self._map(column, mus)
        return self._assemble('c', axis, {column_label('mu', mu): col for mu, col in zip(mus, curves)})

    def _fig3(self, points: int) -> List[ScanRow]:
        return self._concurrence_sweep('ad', float(self.figures['fixed_endpoint']), points)

    def _fig4(self, points: int) -> List[ScanRow]:
        tau_d = float(self.figures['fig4_tau_d'])
        axis = axis_grid('time', points, float(self.figures['fig4_tau_max']))
        mus = self._mu_values()
        state = BellLikeState(BELL_ALPHA)

        def column(mu):
            spec = ChannelSpec('pd', mu)
            return [qslt_mixed(MixedBoundQuery(spec, state, tau, tau_d)).value for tau in axis]

        curves = self._map(column, mus)
        return self._assemble('tau', axis, {column_label('mu', mu): col for mu, col in zip(mus, curves)})

    def _fig5a(self, points: int) -> List[ScanRow]:
        return self._concurrence_sweep('depol', float(self.figures['fixed_endpoint']), points)

    def _fig5b(self, points: int) -> List[ScanRow]:
        endpoint = float(self.figures['fixed_endpoint'])
        axis = axis_grid('unit', points)
        c_values = [float(c) for c in self.figures['fig5b_c_values']]

        def column(c):
            alpha = BellLikeState.from_concurrence(c).alpha
            return [self.ratio('depol', mu, alpha, endpoint) for mu in axis]

        curves = self._map(column, c_values)
        return self._assemble('mu', axis, {column_label('c', c): col for c, col in zip(c_values, curves)})
