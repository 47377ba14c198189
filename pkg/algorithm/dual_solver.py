# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.

# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.

# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

import logging
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from algorithm.capacity import FEASIBILITY_TOL, LN2, CapacityModel
from datastructures.allocation_result import AllocationResult
from datastructures.power_vector import PowerVector

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Capacities closer than this (relative) count as equal when choosing a lattice point
_GRID_TIE = 1e-12
# Candidates closer than this (relative) to the best count as equal; earlier candidates win
_CANDIDATE_TIE = 1e-9
# Width, in log-multiplier units, at which a line search stops
_LOG_TOL = 1e-10


class DualSolverError(RuntimeError):
    """No multiplier pair produced a usable allocation."""


@dataclass(frozen=True)
class DualConfig:
    """Search parameters of the dual solver.

    Both multipliers are prices in 1/W. Their lattice does not depend on p_max or
    on the PU caps, so raising either can only enlarge what the search reaches.

    Attributes:
        mu_range (tuple[float, float]): Log-lattice bounds of the power multiplier mu.
        lambda_range (tuple[float, float]): Log-lattice bounds of the interference multiplier lambda.
        grid_points (int): Log-spaced values per axis; zero is always added.
        line_points (int): Log-spaced values of each single-multiplier line scan.
        refine_iters (int): Evaluation cap of each line search; 0 keeps the lattice point.
        inner_fixed_point_iters (int): Jacobi iterations per multiplier pair.
        inner_tol (float): Relative change below which the Jacobi iteration has converged.
    """
    mu_range: tuple = (1e-3, 1e9)
    lambda_range: tuple = (1e-3, 1e9)
    grid_points: int = 49
    line_points: int = 4801
    refine_iters: int = 60
    inner_fixed_point_iters: int = 20
    inner_tol: float = 1e-8

    def __post_init__(self):
        for name in ('mu_range', 'lambda_range'):
            lo, hi = getattr(self, name)
            if not 0 < lo < hi:
                raise ValueError(f'{name} must satisfy 0 < lo < hi, got `{(lo, hi)}`')
            object.__setattr__(self, name, (float(lo), float(hi)))
        if self.grid_points < 2:
            raise ValueError(f'grid_points must be at least 2, got `{self.grid_points}`')
        if self.line_points < 2:
            raise ValueError(f'line_points must be at least 2, got `{self.line_points}`')
        if self.refine_iters < 0:
            raise ValueError(f'refine_iters must be nonnegative, got `{self.refine_iters}`')
        if self.inner_fixed_point_iters < 1:
            raise ValueError(f'inner_fixed_point_iters must be at least 1, got `{self.inner_fixed_point_iters}`')
        if not self.inner_tol > 0:
            raise ValueError(f'inner_tol must be positive, got `{self.inner_tol}`')

    def axis(self, name):
        lo, hi = getattr(self, name)
        return np.concatenate(([0.0], np.logspace(math.log10(lo), math.log10(hi), self.grid_points)))

    def line_axis(self, name):
        lo, hi = getattr(self, name)
        return np.logspace(math.log10(lo), math.log10(hi), self.line_points)


def waterfill_power(mu, lam, k, scenario, channels, interference_at_k, weight=1.0):
    """Water-filling power of subcarrier k for fixed multipliers.

    Args:
        mu (float): Power-budget multiplier in 1/W.
        lam (float): Interference multiplier.
        k (int): Subcarrier index (0-based).
        scenario (Scenario): Scenario providing sigma^2.
        channels (ChannelSet): Channel gains.
        interference_at_k (float): PU plus SU interference on subcarrier k in watts.
        weight (float): Factor applied to lam. Defaults to 1, the unweighted form.

    Raises:
        ValueError: If mu + lam * weight is not positive or a multiplier is negative.
        IndexError: If k is out of range.

    Returns:
        float: max(0, 1 / ((mu + lam * weight) ln 2) - (sigma^2 + interference) / |h_k|^2).
    """
    if mu < 0 or lam < 0:
        raise ValueError(f'multipliers must be nonnegative, got mu={mu}, lambda={lam}')
    price = mu + lam * weight
    if not price > 0:
        raise ValueError(f'mu + lambda must be positive, got `{price}`')
    if not 0 <= k < scenario.k_count:
        raise IndexError(f'subcarrier index {k} outside 0..{scenario.k_count - 1}')
    gain = float(channels.gain_ss_direct[k])
    if gain == 0:
        return 0.0
    return max(0.0, 1.0 / (price * LN2) - (scenario.noise_var + interference_at_k) / gain)


@dataclass(frozen=True)
class _Candidate:
    capacity: float
    mu: float
    lam: float
    powers: np.ndarray
    scale: float
    converged: bool


class _Waterfiller:
    """Vectorized fixed-point allocation for batches of multiplier pairs.

    lambda is weighted per subcarrier by w_k = max_l a_lk over the PUs with a
    finite cap, where a_lk is the interference PU l receives per watt on k.
    """

    def __init__(self, model, config):
        self.model = model
        self.config = config
        bounded = np.isfinite(model.caps)
        self.bounded = bool(np.any(bounded))
        if self.bounded:
            self.weight = np.max(model.sp_coupling[bounded], axis=0)
        else:
            self.weight = np.zeros(model.k_count)
        self.usable = model.gain > 0
        self.evals = 0

    def allocate(self, mu, lam):
        """Allocations for pairs (mu[b], lam[b]); returns powers (B, K) and per-row convergence."""
        model = self.model
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        price = mu[:, None] + lam[:, None] * self.weight[None, :]
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            level = np.where(price > 0, 1.0 / (price * LN2), np.inf)
            gain = np.where(self.usable, model.gain, 1.0)
            powers = np.zeros((mu.shape[0], model.k_count))
            converged = np.zeros(mu.shape[0], dtype=bool)
            for _ in range(self.config.inner_fixed_point_iters):
                noise = model.floor + powers @ model.ss_coupling
                update = np.where(self.usable, np.maximum(0.0, level - noise / gain), 0.0)
                change = np.max(np.abs(update - powers), axis=1)
                scale = np.maximum(np.max(np.abs(update), axis=1), np.finfo(float).tiny)
                powers = update
                self.evals += powers.size
                converged = change <= self.config.inner_tol * scale
                if np.all(converged):
                    break
        return powers, converged

    def stretch(self, powers):
        """Scale each row until its first constraint binds.

        Returns the stretched rows, their scale factors and a mask of usable rows;
        unusable rows (non-finite or negative) come back as zeros.
        """
        model = self.model
        usable = np.all(np.isfinite(powers), axis=1) & np.all(powers >= 0, axis=1)
        safe = np.where(usable[:, None], powers, 0.0)
        scale = model.headroom_batch(safe)
        scale = np.where(np.isfinite(scale), scale, 1.0)
        stretched = safe * scale[:, None]
        over = ~model.feasible_batch(stretched)
        if np.any(over):
            scale = np.where(over, scale * (1.0 - 4.0 * np.finfo(float).eps), scale)
            stretched = safe * scale[:, None]
        usable &= model.feasible_batch(stretched, FEASIBILITY_TOL)
        return stretched, scale, usable

    def score(self, mu, lam):
        powers, converged = self.allocate(mu, lam)
        stretched, scale, usable = self.stretch(powers)
        capacity = float(self.model.capacity_batch(stretched)[0]) if usable[0] else -math.inf
        return _Candidate(capacity=capacity, mu=float(mu), lam=float(lam), powers=stretched[0],
                          scale=float(scale[0]), converged=bool(converged[0]))


def _pick(capacities, powers, mask):
    """Index of the best masked row: highest capacity, then lexicographically smallest powers."""
    rows = np.flatnonzero(mask)
    if rows.size == 0:
        return None
    best = np.max(capacities[rows])
    ties = rows[capacities[rows] >= best - _GRID_TIE * max(1.0, abs(best))]
    order = np.lexsort(powers[ties].T[::-1])
    return int(ties[order[0]])


def _line_search(score, lo, hi, max_evals, start):
    """Bounded Brent search of `score` over [lo, hi] in log coordinates.

    Returns the best candidate evaluated, `start` included.
    """
    best = start

    def objective(x):
        nonlocal best
        found = score(math.exp(x))
        if found.capacity > best.capacity:
            best = found
        return -found.capacity if math.isfinite(found.capacity) else 0.0

    if max_evals > 0:
        optimize.minimize_scalar(objective, bounds=(math.log(lo), math.log(hi)), method='bounded',
                                 options={'xatol': _LOG_TOL, 'maxiter': max_evals})
    return best


def _bracket(axis, i):
    """Positive neighbours of axis[i], i >= 1."""
    return axis[max(i - 1, 1)], axis[min(i + 1, axis.shape[0] - 1)]


def _scan(filler, mu, lam):
    """Stretched allocations of the pairs (mu[b], lam[b]) with their capacities; -inf marks unusable rows."""
    powers, converged = filler.allocate(mu, lam)
    stretched, scales, usable = filler.stretch(powers)
    capacity = np.where(usable, filler.model.capacity_batch(stretched), -np.inf)
    return stretched, scales, converged, capacity, usable


def _refine_line(filler, axis, config, power_line):
    """Best candidate on the line lambda = 0 (power_line) or mu = 0, scanned on axis and then refined."""
    fixed = np.zeros_like(axis)
    mu, lam = (axis, fixed) if power_line else (fixed, axis)
    stretched, scales, converged, capacity, usable = _scan(filler, mu, lam)
    row = _pick(capacity, stretched, usable)
    if row is None:
        return None
    start = _Candidate(capacity=float(capacity[row]), mu=float(mu[row]), lam=float(lam[row]),
                       powers=stretched[row], scale=float(scales[row]), converged=bool(converged[row]))
    lo, hi = axis[max(row - 1, 0)], axis[min(row + 1, axis.shape[0] - 1)]
    if power_line:
        return _line_search(lambda value: filler.score(value, 0.0), lo, hi, config.refine_iters, start)
    return _line_search(lambda value: filler.score(0.0, value), lo, hi, config.refine_iters, start)


def solve_dual(scenario, channels, tables, config=DualConfig()):
    """Maximize total capacity with the Lagrange-dual water-filling heuristic.

    Every pair of a fixed log lattice over (mu, lambda) yields a water-filling
    allocation, which is stretched until the budget or a PU cap binds. The lines
    lambda = 0 and mu = 0 are scanned on a denser fixed lattice, and every line is
    refined by a bounded line search: both single-multiplier lines, and the best
    lattice pair along each axis in turn. The best candidate wins, and on near ties
    the single-constraint candidates are preferred.

    Args:
        scenario (Scenario): Scenario.
        channels (ChannelSet): Channel gains.
        tables (InterferenceTables): Overlap factors.
        config (DualConfig): Search parameters.

    Raises:
        DualSolverError: If no multiplier pair gives a finite allocation.

    Returns:
        AllocationResult: Allocation with the chosen multipliers in `details`.
    """
    logger.info(f'Solving the dual problem for K={scenario.k_count}, L={scenario.pu_count}, '
                f'p_max={scenario.p_max:.6g} W...')
    timer = time.perf_counter()
    model = CapacityModel(scenario, channels, tables)
    filler = _Waterfiller(model, config)

    mu_axis = config.axis('mu_range')
    lam_axis = config.axis('lambda_range') if filler.bounded else np.zeros(1)
    n = lam_axis.shape[0]
    mu_grid, lam_grid = np.meshgrid(mu_axis, lam_axis, indexing='ij')
    # Row r of the flattened lattice holds (mu_axis[i], lam_axis[j]) with r + 1 = i * n + j
    stretched, scales, converged, capacity, usable = _scan(filler, mu_grid.ravel()[1:], lam_grid.ravel()[1:])
    best_row = _pick(capacity, stretched, usable)
    if best_row is None:
        raise DualSolverError(f'no usable multiplier pair in mu {config.mu_range} x lambda {config.lambda_range}')

    i, j = divmod(best_row + 1, n)
    grid = _Candidate(capacity=float(capacity[best_row]), mu=float(mu_axis[i]), lam=float(lam_axis[j]),
                      powers=stretched[best_row], scale=float(scales[best_row]), converged=bool(converged[best_row]))

    candidates = []
    power = _refine_line(filler, config.line_axis('mu_range'), config, power_line=True)
    if power is not None:
        candidates.append(('power', power))
    if filler.bounded:
        capped = _refine_line(filler, config.line_axis('lambda_range'), config, power_line=False)
        if capped is not None:
            candidates.append(('interference', capped))
    if i > 0 and j > 0:
        lo, hi = _bracket(mu_axis, i)
        joint = _line_search(lambda mu: filler.score(mu, grid.lam), lo, hi, config.refine_iters, grid)
        fixed_mu = joint.mu
        lo, hi = _bracket(lam_axis, j)
        joint = _line_search(lambda lam: filler.score(fixed_mu, lam), lo, hi, config.refine_iters, joint)
        candidates.append(('joint', joint))
    candidates.append(('grid', grid))

    top = max(candidate.capacity for _, candidate in candidates)
    kind, chosen = next((kind, candidate) for kind, candidate in candidates
                        if candidate.capacity >= top - _CANDIDATE_TIE * max(1.0, abs(top)))

    result = PowerVector(chosen.powers)
    logger.info(f'Completed the dual search in {time.perf_counter() - timer:.6f} seconds '
                f'({kind} candidate, capacity {chosen.capacity:.6f} bits/s/Hz)')
    return AllocationResult(method='dual',
                            powers=result,
                            capacity=model.capacity(result),
                            feasibility=model.feasibility(result, FEASIBILITY_TOL),
                            evals=filler.evals,
                            details={'mu': chosen.mu,
                                     'lambda': chosen.lam,
                                     'mu_normalized': chosen.mu * model.p_max,
                                     'scale': chosen.scale,
                                     'candidate': kind,
                                     'converged': chosen.converged,
                                     'weights': tuple(float(w) for w in filler.weight),
                                     'caps': tuple(float(c) for c in model.caps)})
