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

import os
from dataclasses import replace

import numpy as np

from algorithm.annealer import SaConfig, anneal
from algorithm.capacity import check_feasible
from algorithm.dual_solver import DualConfig, solve_dual
from cli.config import load_config
from cli.experiment import run_experiment
from model.channels import sample_channels
from model.grid import build_grid
from model.primary_user import standard_layout
from model.scenario import Scenario
from spectral.interference import build_tables

DATA = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'data')


def sweep_of(name, **sweep):
    spec = load_config(os.path.join(DATA, f'{name}.yaml'))
    return replace(spec, sweep=replace(spec.sweep, **sweep))


def means(result):
    return {(point.value, point.method): point.mean_capacity for point in result.summary}


def random_scenario(rng, seed):
    k_count = int(rng.choice([2, 3, 4, 6]))
    grid = build_grid(0.4e6 * k_count, k_count, k_count)
    pus = standard_layout(grid, int(rng.integers(0, 3)), tx_power=float(rng.choice([0.0, 1e-6, 1e-3])),
                          interference_cap=float(rng.choice([1e-8, 1e-6, 1e-4, 1e-2, np.inf])))
    scenario = Scenario(grid=grid, pus=pus, su_count=int(rng.integers(1, 4)),
                        noise_var=10.0 ** rng.uniform(-8, -4), p_max=10.0 ** rng.uniform(-8, 1))
    channels = sample_channels(scenario, seed)
    return scenario, channels, build_tables(scenario, channels)


def test_no_solver_violates_a_constraint():
    rng = np.random.default_rng(2024)
    dual_config = DualConfig(grid_points=8, line_points=50, refine_iters=5, inner_fixed_point_iters=10)
    violations = 0
    for seed in range(1000):
        scenario, channels, tables = random_scenario(rng, seed)
        for result in (solve_dual(scenario, channels, tables, dual_config),
                       anneal(scenario, channels, tables, SaConfig(seed=seed, max_iters=50))):
            powers = np.asarray(result.powers)
            report = check_feasible(result.powers, scenario, channels, tables)
            caps_ok = all(value <= pu.interference_cap * (1 + 1e-6)
                          for value, pu in zip(report.per_pu_interference, scenario.pus))
            if not (np.min(powers) >= 0 and np.sum(powers) <= scenario.p_max * (1 + 1e-9) and caps_ok):
                violations += 1
    assert violations == 0


def test_annealing_keeps_up_with_dual_across_budget_sweep():
    result = run_experiment(sweep_of('fig3', values=(-20.0, 15.0)), jobs=2)
    capacity = means(result)
    for value in (-20.0, 15.0):
        assert capacity[value, 'sa'] >= 0.99 * capacity[value, 'dual']
    low = capacity[-20.0, 'sa'] / capacity[-20.0, 'dual']
    high = capacity[15.0, 'sa'] / capacity[15.0, 'dual']
    assert low > high


def test_more_primary_users_never_raise_capacity():
    result = run_experiment(sweep_of('fig6', methods=('dual',)))
    capacity = [means(result)[value, 'dual'] for value in (1, 2, 4)]
    assert capacity[0] >= capacity[1] >= capacity[2]


def test_more_secondary_users_lower_capacity():
    result = run_experiment(sweep_of('fig7', values=(4, 16), methods=('dual',)))
    capacity = means(result)
    assert capacity[16, 'dual'] <= capacity[4, 'dual']


def test_evaluation_counts_against_subcarrier_count():
    result = run_experiment(sweep_of('complexity', trials=1))
    evals = {(row.value, row.method): row.evals for row in result.rows}
    sa = [evals[k_count, 'sa'] for k_count in (8, 16, 32, 64)]
    dual = [evals[k_count, 'dual'] for k_count in (8, 16, 32, 64)]
    # eight times the subcarriers
    assert sa[-1] / sa[0] < 8
    assert dual[-1] / dual[0] >= 6
    assert all(b > a for a, b in zip(dual, dual[1:]))
