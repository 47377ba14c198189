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

import hashlib
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from algorithm.annealer import anneal
from algorithm.brute_force import brute_force
from algorithm.capacity import subcarrier_rates
from algorithm.dual_solver import solve_dual
from cli.config import dbw_to_watts
from model.channels import sample_channels
from spectral.interference import build_tables

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Errors a single solver run may raise without aborting the sweep
SOLVER_ERRORS = (ArithmeticError, RuntimeError, ValueError)


def derive_seed(master_seed, trial_index):
    """Seed of one trial, shared by every axis value so points use common channel draws."""
    digest = hashlib.sha256(f'{master_seed}:{trial_index}'.encode('ascii')).digest()
    return int.from_bytes(digest[:8], 'big') >> 1


@dataclass(frozen=True)
class TrialRow:
    """Outcome of one solver on one channel draw.

    Attributes:
        value: Axis value of the point.
        trial (int): Trial index.
        seed (int): Channel and annealing seed.
        method (str): Solver name.
        capacity (float): Total capacity in bits/s/Hz; NaN when the solver failed.
        capacity_bps (float): Capacity in bits/s.
        evals (int): Solver evaluation count.
        feasible (bool): Feasibility of the allocation at FEASIBILITY_TOL.
        wall_time (float): Solver wall time in seconds.
        error (str): Failure message, empty on success.
    """
    value: object
    trial: int
    seed: int
    method: str
    capacity: float
    capacity_bps: float
    evals: int
    feasible: bool
    wall_time: float
    error: str = ''

    @property
    def failed(self):
        return bool(self.error)


@dataclass(frozen=True)
class PointSummary:
    """Aggregate of every trial of one method at one axis value."""
    value: object
    method: str
    trials: int
    failures: int
    mean_capacity: float
    std_capacity: float
    mean_capacity_bps: float
    mean_evals: float
    feasible_fraction: float


@dataclass(frozen=True)
class Allocation:
    """Allocation kept for snapshot and trace exports."""
    value: object
    trial: int
    seed: int
    method: str
    result: object
    rates: tuple


@dataclass
class ExperimentResult:
    """Everything a sweep produced.

    Attributes:
        spec (ExperimentSpec): The experiment that ran.
        seeds (tuple[int]): Seed of each trial index.
        rows (list[TrialRow]): Per-trial rows in axis, trial, method order.
        summary (list[PointSummary]): Per-point aggregates in axis, method order.
        allocations (list[Allocation]): Kept allocations for trace and snapshot sweeps.
    """
    spec: object
    seeds: tuple
    rows: list = field(default_factory=list)
    summary: list = field(default_factory=list)
    allocations: list = field(default_factory=list)

    @property
    def all_failed(self):
        return bool(self.rows) and all(row.failed for row in self.rows)


def scenario_for(spec, value):
    """Scenario of one sweep point: the template with the axis quantity set to `value`."""
    template = spec.scenario
    axis = spec.sweep.axis
    if axis in ('p_max_dbw', 'trace', 'snapshot'):
        template = replace(template, p_max=dbw_to_watts(value))
    elif axis == 'pu_count':
        template = replace(template, pu_count=int(value))
    elif axis == 'su_count':
        template = replace(template, su_count=int(value))
    elif axis == 'k_count':
        k_count = int(value)
        template = replace(template, k_count=k_count, fft_size=k_count,
                           total_bw=template.subcarrier_bw * k_count)
    elif axis == 'interference_cap':
        template = replace(template, interference_cap=value * 1e-3)
    else:
        raise ValueError(f'unknown sweep axis `{axis}`')
    return template.build()


def run_solver(method, scenario, channels, tables, spec, seed):
    """Run one solver with the experiment's settings."""
    if method == 'sa':
        return anneal(scenario, channels, tables, replace(spec.sa, seed=seed))
    if method == 'dual':
        return solve_dual(scenario, channels, tables, spec.dual)
    if method == 'brute':
        return brute_force(scenario, channels, tables, scenario.p_max * spec.brute_resolution)
    raise ValueError(f'unknown method `{method}`')


def run_trial(spec, value, trial, seed):
    """Solve one channel draw at one sweep point with every configured method.

    Args:
        spec (ExperimentSpec): Experiment.
        value: Axis value.
        trial (int): Trial index.
        seed (int): Seed of the draw.

    Returns:
        tuple[list[TrialRow], list[Allocation]]: One row per method, and the
            allocations themselves when the sweep exports them.
    """
    scenario = scenario_for(spec, value)
    channels = sample_channels(scenario, seed)
    tables = build_tables(scenario, channels)
    keep = spec.sweep.axis in ('trace', 'snapshot')
    methods = ('sa',) if spec.sweep.axis == 'trace' else spec.sweep.methods

    rows, allocations = [], []
    for method in methods:
        timer = time.perf_counter()
        try:
            result = run_solver(method, scenario, channels, tables, spec, seed)
        except SOLVER_ERRORS as exc:
            logger.error(f'{method} failed at {spec.sweep.axis}={value}, trial {trial}: {exc}')
            rows.append(TrialRow(value=value, trial=trial, seed=seed, method=method, capacity=math.nan,
                                 capacity_bps=math.nan, evals=0, feasible=False,
                                 wall_time=time.perf_counter() - timer, error=str(exc) or type(exc).__name__))
            continue
        wall_time = time.perf_counter() - timer
        rows.append(TrialRow(value=value, trial=trial, seed=seed, method=method, capacity=result.capacity,
                             capacity_bps=result.capacity * scenario.grid.subcarrier_bw, evals=result.evals,
                             feasible=result.feasibility.feasible, wall_time=wall_time))
        if keep:
            rates = subcarrier_rates(result.powers, scenario, channels, tables)
            allocations.append(Allocation(value=value, trial=trial, seed=seed, method=method, result=result,
                                          rates=tuple(float(r) for r in rates)))
    return rows, allocations


def _run_task(task):
    return run_trial(*task)


def summarize(rows, values, methods):
    """Mean and spread of every (value, method) point over its successful trials."""
    summary = []
    for value in values:
        for method in methods:
            point = [row for row in rows if row.value == value and row.method == method]
            if not point:
                continue
            ok = [row for row in point if not row.failed]
            capacities = np.array([row.capacity for row in ok])
            summary.append(PointSummary(
                value=value,
                method=method,
                trials=len(point),
                failures=len(point) - len(ok),
                mean_capacity=float(np.mean(capacities)) if ok else math.nan,
                std_capacity=float(np.std(capacities, ddof=1)) if len(ok) > 1 else 0.0 if ok else math.nan,
                mean_capacity_bps=float(np.mean([row.capacity_bps for row in ok])) if ok else math.nan,
                mean_evals=float(np.mean([row.evals for row in ok])) if ok else math.nan,
                feasible_fraction=sum(row.feasible for row in point) / len(point)))
    return summary


def run_experiment(spec, jobs=1):
    """Run every point and trial of an experiment.

    Trials may run in a process pool; rows are always collected in axis order,
    then trial order, then method order, so the output does not depend on `jobs`.

    Args:
        spec (ExperimentSpec): Experiment.
        jobs (int): Worker processes. Defaults to 1 (in-process).

    Raises:
        ValueError: If jobs < 1.

    Returns:
        ExperimentResult: Rows, summaries and kept allocations.
    """
    if jobs < 1:
        raise ValueError(f'jobs must be at least 1, got `{jobs}`')
    sweep = spec.sweep
    seeds = tuple(derive_seed(sweep.master_seed, trial) for trial in range(sweep.trials))
    tasks = [(spec, value, trial, seeds[trial]) for value in sweep.values for trial in range(sweep.trials)]
    logger.info(f'Running {sweep.name}: {len(sweep.values)} points x {sweep.trials} trials '
                f'({", ".join(sweep.methods)}) on {jobs} worker(s)...')
    timer = time.perf_counter()

    if jobs == 1:
        outcomes = [_run_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            outcomes = list(executor.map(_run_task, tasks))

    result = ExperimentResult(spec=spec, seeds=seeds)
    for rows, allocations in outcomes:
        result.rows.extend(rows)
        result.allocations.extend(allocations)
    methods = ('sa',) if sweep.axis == 'trace' else sweep.methods
    result.summary = summarize(result.rows, sweep.values, methods)
    failed = sum(row.failed for row in result.rows)
    logger.info(f'Completed {sweep.name} in {time.perf_counter() - timer:.6f} seconds '
                f'({len(result.rows)} rows, {failed} failed)')
    return result
