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

import numpy as np

from algorithm.capacity import FEASIBILITY_TOL, CapacityModel
from datastructures.allocation_result import AllocationResult
from datastructures.power_vector import PowerVector

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

MAX_SUBCARRIERS = 6
# Upper bound on the rows of one block of compositions held in memory
BLOCK_ROWS = 1 << 18
# Ratios within this distance below an integer round up to it
_LEVEL_SLACK = 1e-9
_TIE = 1e-12


def level_count(p_max, step):
    """Number of power steps n with n * step <= p_max."""
    return int(math.floor(p_max / step + _LEVEL_SLACK))


def composition_count(levels, k_count):
    """Number of vectors of K nonnegative integers summing to at most `levels`."""
    return math.comb(levels + k_count, k_count)


def compositions(levels, k_count):
    """All K-vectors of nonnegative integers with sum <= levels, in lexicographic order.

    Built one coordinate at a time: every row of the previous prefix block is repeated
    once per admissible value of the next coordinate.

    Args:
        levels (int): Largest allowed sum.
        k_count (int): Vector length K >= 1.

    Returns:
        np.ndarray: Integer array of shape (composition_count(levels, K), K).
    """
    prefixes = np.zeros((1, 0), dtype=np.int64)
    remaining = np.array([levels], dtype=np.int64)
    for _ in range(k_count):
        counts = remaining + 1
        rows = np.repeat(np.arange(prefixes.shape[0]), counts)
        starts = np.cumsum(counts) - counts
        values = np.arange(rows.shape[0]) - np.repeat(starts, counts)
        prefixes = np.column_stack((prefixes[rows], values))
        remaining = remaining[rows] - values
    return prefixes


def _blocks(levels, k_count, prefix=()):
    """Yield composition blocks in lexicographic order, splitting on leading coordinates to bound memory."""
    free = k_count - len(prefix)
    budget = levels - sum(prefix)
    if free == 0:
        yield np.array([prefix], dtype=np.int64)
        return
    if composition_count(budget, free) <= BLOCK_ROWS or free == 1:
        tail = compositions(budget, free)
        head = np.broadcast_to(np.asarray(prefix, dtype=np.int64), (tail.shape[0], len(prefix)))
        yield np.hstack((head, tail))
        return
    for first in range(budget + 1):
        yield from _blocks(levels, k_count, prefix + (first,))


def brute_force(scenario, channels, tables, step):
    """Exhaustive search over the lattice of power vectors with spacing `step`.

    Enumerates every p = step * n with nonnegative integers n summing to at most
    floor(p_max / step), keeps the feasible ones and returns the first best in
    lexicographic order. Only meant as an oracle for tiny K.

    Args:
        scenario (Scenario): Scenario with K <= MAX_SUBCARRIERS.
        channels (ChannelSet): Channel gains.
        tables (InterferenceTables): Overlap factors.
        step (float): Lattice spacing delta in watts.

    Raises:
        ValueError: If K exceeds MAX_SUBCARRIERS or step is not positive.

    Returns:
        AllocationResult: The lattice optimum; `evals` counts the vectors scored.
    """
    k_count = scenario.k_count
    if k_count > MAX_SUBCARRIERS:
        raise ValueError(f'brute force supports at most {MAX_SUBCARRIERS} subcarriers, got {k_count}')
    if not (math.isfinite(step) and step > 0):
        raise ValueError(f'step must be positive, got `{step}`')

    levels = level_count(scenario.p_max, step)
    logger.info(f'Enumerating {composition_count(levels, k_count)} lattice points for K={k_count} '
                f'(step {step:.6g} W)...')
    timer = time.perf_counter()
    model = CapacityModel(scenario, channels, tables)

    best_powers, best_capacity = np.zeros(k_count), -math.inf
    evals = 0
    for block in _blocks(levels, k_count):
        powers = block * step
        feasible = model.feasible_batch(powers, FEASIBILITY_TOL)
        if not np.any(feasible):
            continue
        candidates = powers[feasible]
        capacities = model.capacity_batch(candidates)
        evals += candidates.shape[0]
        top = np.max(capacities)
        if top > best_capacity + _TIE * max(1.0, abs(best_capacity)):
            first = int(np.flatnonzero(capacities >= top - _TIE * max(1.0, abs(top)))[0])
            best_powers, best_capacity = candidates[first], float(capacities[first])

    result = PowerVector(best_powers)
    logger.info(f'Completed enumeration in {time.perf_counter() - timer:.6f} seconds '
                f'({evals} feasible points, capacity {best_capacity:.6f} bits/s/Hz)')
    return AllocationResult(method='brute',
                            powers=result,
                            capacity=model.capacity(result),
                            feasibility=model.feasibility(result, FEASIBILITY_TOL),
                            evals=evals,
                            details={'step': step, 'levels': levels})
