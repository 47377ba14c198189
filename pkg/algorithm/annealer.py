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
from dataclasses import dataclass, replace

import numpy as np

from algorithm.capacity import FEASIBILITY_TOL, CapacityModel
from datastructures.allocation_result import AllocationResult, TraceRecord
from datastructures.power_vector import PowerVector, as_array

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Rescaling attempts when rounding leaves a projected vector a few ulps outside a constraint
_ROUNDING_RETRIES = 8


class AnnealingError(ArithmeticError):
    """The objective became non-finite during a run.

    Attributes:
        trace (tuple[TraceRecord]): Iterations completed before the failure.
    """

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = tuple(trace)


@dataclass(frozen=True)
class SaConfig:
    """Annealing schedule and search parameters.

    Attributes:
        initial_temp (float): Starting temperature P (dimensionless). Defaults to 100.
        cooling_factor (float): Exponential cooling ratio in (0, 1). Defaults to 0.95.
        epsilon (float): Stop once a step moves no entry by more than this many watts. Defaults to 1e-6.
        max_iters (int): Hard cap on iterations, one candidate each. Defaults to 10000.
        perturb_scale (float): Jitter standard deviation at the initial temperature,
            as a fraction of p_max. Defaults to 10.
        seed (int): Seed of the run's random generator. Defaults to 0.
        inner_sweeps (int): Candidates tried at each temperature, and the number of
            iterations without a new best the stop rule waits for. Defaults to 20.
        temp_floor_ratio (float): The temperature counts as small below
            temp_floor_ratio * initial_temp. Defaults to 1e-6.
        power_budget (float): p_max in watts, the unit of the jitter. anneal sets it
            from the scenario. Defaults to 1.
    """
    initial_temp: float = 100.0
    cooling_factor: float = 0.95
    epsilon: float = 1e-6
    max_iters: int = 10000
    perturb_scale: float = 10.0
    seed: int = 0
    inner_sweeps: int = 20
    temp_floor_ratio: float = 1e-6
    power_budget: float = 1.0

    def __post_init__(self):
        if not self.initial_temp > 0:
            raise ValueError(f'initial_temp must be positive, got `{self.initial_temp}`')
        if not 0 < self.cooling_factor < 1:
            raise ValueError(f'cooling_factor must lie in (0, 1), got `{self.cooling_factor}`')
        if not self.epsilon > 0:
            raise ValueError(f'epsilon must be positive, got `{self.epsilon}`')
        if not self.perturb_scale > 0:
            raise ValueError(f'perturb_scale must be positive, got `{self.perturb_scale}`')
        if self.max_iters < 1:
            raise ValueError(f'max_iters must be at least 1, got `{self.max_iters}`')
        if self.inner_sweeps < 1:
            raise ValueError(f'inner_sweeps must be at least 1, got `{self.inner_sweeps}`')
        if not self.temp_floor_ratio > 0:
            raise ValueError(f'temp_floor_ratio must be positive, got `{self.temp_floor_ratio}`')
        if not self.power_budget > 0:
            raise ValueError(f'power_budget must be positive, got `{self.power_budget}`')

    @property
    def temp_floor(self):
        return self.temp_floor_ratio * self.initial_temp

    def temperature(self, t):
        """Temperature of iteration t: P * cooling_factor ** (t // inner_sweeps)."""
        return self.initial_temp * self.cooling_factor ** (t // self.inner_sweeps)


def accept(delta, temperature, r):
    """Metropolis rule: always take a better or equal state, a worse one with probability exp(-delta / T).

    Args:
        delta (float): Energy change E(candidate) - E(current).
        temperature (float): Current temperature, > 0.
        r (float): Uniform random number in (0, 1).

    Raises:
        ValueError: If temperature is not positive.

    Returns:
        bool: Whether the candidate is accepted.
    """
    if not temperature > 0:
        raise ValueError(f'temperature must be positive, got `{temperature}`')
    if delta <= 0:
        return True
    return math.exp(-delta / temperature) >= r


def perturb(p, temperature, config, rng):
    """Gaussian jitter around p whose spread shrinks with the temperature, clamped at zero.

    Args:
        p (PowerVector): Current allocation.
        temperature (float): Current temperature.
        config (SaConfig): Annealing parameters; the jitter is perturb_scale * power_budget * T / T0.
        rng (np.random.Generator): Random generator, advanced by K normal draws.

    Returns:
        PowerVector: The neighbouring allocation.
    """
    powers = as_array(p)
    scale = config.perturb_scale * config.power_budget * temperature / config.initial_temp
    jitter = rng.normal(0.0, 1.0, size=powers.shape[0]) * scale
    return PowerVector(np.maximum(powers + jitter, 0.0))


def _project(model, powers):
    """Scale powers onto the feasible set: s = min(1, p_max / sum p, min_l I_th / I_l)."""
    scale = 1.0
    total = float(np.sum(powers))
    if total > model.p_max:
        scale = model.p_max / total
    for interference, cap in zip(model.pu_interference(powers), model.caps):
        if interference > cap:
            scale = min(scale, cap / interference)
    if scale == 1.0:
        return powers

    projected = powers * scale
    for _ in range(_ROUNDING_RETRIES):
        if model.feasibility(projected).feasible:
            break
        scale = np.nextafter(np.nextafter(scale, 0.0), 0.0)
        projected = powers * scale
    return projected


def project_feasible(p, scenario, channels, tables):
    """Shrink an allocation radially until it meets the budget and every PU cap exactly.

    Both constraints are linear in p, so a single scale factor repairs them while
    keeping the direction of p.

    Args:
        p (PowerVector): Nonnegative allocation.
        scenario (Scenario): Scenario.
        channels (ChannelSet): Channel gains.
        tables (InterferenceTables): Overlap factors.

    Returns:
        PowerVector: p itself when already feasible, otherwise s * p with s < 1.
    """
    model = CapacityModel(scenario, channels, tables)
    return PowerVector(_project(model, as_array(p)))


def anneal(scenario, channels, tables, config=SaConfig()):
    """Maximize total capacity by simulated annealing over power vectors.

    Energy is the negated capacity. Each iteration perturbs the current vector,
    projects it onto the feasible set, and applies the Metropolis rule. The run stops
    when a step moves less than epsilon at a temperature below the floor and no new
    best has turned up for inner_sweeps iterations, or after max_iters iterations.
    It returns the best vector ever visited.

    Args:
        scenario (Scenario): Scenario.
        channels (ChannelSet): Channel gains.
        tables (InterferenceTables): Overlap factors.
        config (SaConfig): Annealing parameters.

    Raises:
        AnnealingError: If the objective becomes non-finite.

    Returns:
        AllocationResult: Best allocation, its capacity and the full iteration trace.
    """
    logger.info(f'Annealing K={scenario.k_count}, L={scenario.pu_count}, p_max={scenario.p_max:.6g} W '
                f'(seed {config.seed})...')
    timer = time.perf_counter()
    model = CapacityModel(scenario, channels, tables)
    config = replace(config, power_budget=model.p_max)
    rng = np.random.default_rng(config.seed)

    current = _project(model, rng.uniform(0.0, 1.0, size=model.k_count) * model.p_max / model.k_count)
    current_capacity = model.capacity(current)
    evals = 1
    if not math.isfinite(current_capacity):
        raise AnnealingError('objective is not finite at the starting point')
    best, best_capacity = current, current_capacity
    improved_at = 0

    trace = []
    stopped = False
    for t in range(config.max_iters):
        temperature = config.temperature(t)
        candidate = _project(model, as_array(perturb(current, temperature, config, rng)))
        candidate_capacity = model.capacity(candidate)
        evals += 1
        if not math.isfinite(candidate_capacity):
            raise AnnealingError(f'objective is not finite at iteration {t}', trace=trace)

        delta = current_capacity - candidate_capacity
        accepted = accept(delta, temperature, 1.0 - rng.random())
        step = float(np.max(np.abs(candidate - current)))
        if accepted:
            current, current_capacity = candidate, candidate_capacity
            if current_capacity > best_capacity:
                best, best_capacity = current, current_capacity
                improved_at = t

        trace.append(TraceRecord(t=t, temperature=temperature, energy=-current_capacity,
                                 capacity=current_capacity, accepted=accepted, best_capacity=best_capacity))
        logger.debug(f't={t} T={temperature:.3e} C={current_capacity:.6f} accepted={accepted}')

        stale = t - improved_at >= config.inner_sweeps
        settled = step < config.epsilon and temperature < config.temp_floor
        if settled and stale and model.feasibility(current).feasible:
            stopped = True
            break

    powers = PowerVector(best)
    logger.info(f'Completed annealing in {time.perf_counter() - timer:.6f} seconds '
                f'({len(trace)} iterations, capacity {best_capacity:.6f} bits/s/Hz)')
    return AllocationResult(method='sa',
                            powers=powers,
                            capacity=model.capacity(powers),
                            feasibility=model.feasibility(powers, FEASIBILITY_TOL),
                            trace=tuple(trace),
                            evals=evals,
                            details={'converged': stopped, 'iterations': len(trace),
                                     'final_temperature': trace[-1].temperature if trace else config.initial_temp})
