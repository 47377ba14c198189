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

import math

import numpy as np
import pytest

from algorithm.capacity import (CapacityModel, check_feasible, su_rates, subcarrier_rate, subcarrier_rates,
                                total_capacity)
from datastructures.interference_tables import InterferenceTables
from datastructures.power_vector import PowerVector
from model.channels import ChannelSet, sample_channels
from model.grid import build_grid
from model.primary_user import standard_layout
from model.scenario import Scenario
from spectral.interference import build_tables


def isolated(k_count, gains, noise_var=1.0, p_max=1.0):
    """Scenario without PUs and without cross leakage."""
    grid = build_grid(0.4e6 * k_count, k_count, k_count)
    scenario = Scenario(grid=grid, pus=(), su_count=1, noise_var=noise_var, p_max=p_max)
    channels = ChannelSet(gain_sp=np.zeros((0, k_count)), gain_ps=np.zeros((0, k_count)), gain_ss_direct=gains,
                          gain_ss_cross=np.zeros((k_count, k_count)))
    return scenario, channels, build_tables(scenario, channels)


def test_single_subcarrier_closed_form():
    scenario, channels, tables = isolated(1, [1.0])
    assert subcarrier_rate(PowerVector([1.0]), 0, scenario, channels, tables) == pytest.approx(1.0, rel=1e-15)
    assert subcarrier_rate(PowerVector([0.0]), 0, scenario, channels, tables) == 0.0
    with pytest.raises(IndexError):
        subcarrier_rate(PowerVector([1.0]), 1, scenario, channels, tables)


def test_identical_subcarriers_double_the_rate():
    scenario, channels, tables = isolated(2, [0.7, 0.7])
    single = subcarrier_rate(PowerVector([0.3, 0.3]), 0, scenario, channels, tables)
    assert total_capacity(PowerVector([0.3, 0.3]), scenario, channels, tables) == 2.0 * single
    assert total_capacity(PowerVector.zeros(2), scenario, channels, tables) == 0.0


def test_capacity_increases_with_single_power():
    scenario, channels, tables = isolated(3, [0.5, 1.0, 2.0])
    values = [total_capacity(PowerVector([p, 0.2, 0.2]), scenario, channels, tables) for p in (0.0, 0.1, 0.2, 0.4)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_doubling_noise_lowers_every_rate():
    p = PowerVector([0.2, 0.0, 0.5])
    low = subcarrier_rates(p, *isolated(3, [0.5, 1.0, 2.0], noise_var=1.0))
    high = subcarrier_rates(p, *isolated(3, [0.5, 1.0, 2.0], noise_var=2.0))
    assert high[0] < low[0] and high[2] < low[2]
    assert high[1] == low[1] == 0.0


def cell_instance(seed=1):
    grid = build_grid(12.8e6, 32, 32)
    scenario = Scenario(grid=grid, pus=standard_layout(grid, 2, 0.01, 1e-3), su_count=8, noise_var=1e-6, p_max=1.0)
    channels = sample_channels(scenario, seed)
    return scenario, channels, build_tables(scenario, channels)


def test_total_capacity_is_sum_of_subcarrier_rates():
    scenario, channels, tables = cell_instance()
    p = PowerVector.uniform(32, scenario.p_max)
    rates = [subcarrier_rate(p, k, scenario, channels, tables) for k in range(32)]
    assert total_capacity(p, scenario, channels, tables) == pytest.approx(sum(rates), abs=1e-12)
    assert all(r > 0 for r in rates)
    assert np.sum(su_rates(p, scenario, channels, tables)) == pytest.approx(sum(rates), abs=1e-12)
    assert su_rates(p, scenario, channels, tables).shape == (8,)


def test_rate_reflects_every_interference_term():
    scenario, channels, tables = cell_instance()
    p = PowerVector.uniform(32, scenario.p_max)
    powers = np.asarray(p)
    k = 5
    foreign = [i for i in range(32) if scenario.su_assignment[i] != scenario.su_assignment[k]]
    leak = sum(powers[i] * channels.gain_ss_cross[i, k] * tables.ss_factor[i, k] for i in foreign)
    denominator = scenario.noise_var + tables.ps_interference[:, k].sum() + leak
    expected = math.log2(1.0 + channels.gain_ss_direct[k] * powers[k] / denominator)
    assert subcarrier_rate(p, k, scenario, channels, tables) == pytest.approx(expected, rel=1e-12)


def test_capacity_is_permutation_equivariant():
    scenario, channels, tables = isolated(3, [0.5, 1.0, 2.0])
    p = np.array([0.1, 0.2, 0.3])
    order = [2, 0, 1]
    permuted = ChannelSet(gain_sp=np.zeros((0, 3)), gain_ps=np.zeros((0, 3)),
                          gain_ss_direct=channels.gain_ss_direct[order], gain_ss_cross=np.zeros((3, 3)))
    assert total_capacity(PowerVector(p[order]), scenario, permuted, tables) == pytest.approx(
        total_capacity(PowerVector(p), scenario, channels, tables), rel=1e-15)


def test_check_feasible_budget():
    scenario, channels, tables = isolated(4, [1.0] * 4, p_max=2.0)
    assert check_feasible(PowerVector.zeros(4), scenario, channels, tables).feasible
    report = check_feasible(PowerVector.uniform(4, 2.0), scenario, channels, tables, tol=0.0)
    assert report.power_ok and report.feasible and report.per_pu_interference == ()
    report = check_feasible(PowerVector.uniform(4, 4.0), scenario, channels, tables)
    assert not report.power_ok and not report.feasible
    assert not check_feasible(PowerVector([-0.1, 0, 0, 0]), scenario, channels, tables).nonneg_ok
    with pytest.raises(ValueError):
        check_feasible(PowerVector.zeros(4), scenario, channels, tables, tol=-1.0)


def test_check_feasible_per_pu_caps(desk_scenario):
    channels = sample_channels(desk_scenario, 0)
    tables = build_tables(desk_scenario, channels)
    p = PowerVector([1e-6, 0.0, 0.0, 0.0])
    report = check_feasible(p, desk_scenario, channels, tables)
    expected = channels.gain_sp[0, 0] * tables.sp_factor[0, 0] * 1e-6
    assert report.per_pu_interference[0] == pytest.approx(expected, rel=1e-15)
    assert report.interference_ok[0] == (expected <= 2e-6)
    assert report == check_feasible(p, desk_scenario, channels, tables)


def test_batch_evaluation_matches_single_vectors():
    scenario, channels, tables = cell_instance()
    model = CapacityModel(scenario, channels, tables)
    rng = np.random.default_rng(0)
    powers = rng.uniform(0.0, 2.0 / 32, size=(5, 32))
    assert model.capacity_batch(powers) == pytest.approx([model.capacity(p) for p in powers], rel=1e-12)
    assert list(model.feasible_batch(powers)) == [model.feasibility(p).feasible for p in powers]


def test_interference_tables_are_read_only():
    scenario, channels, tables = isolated(2, [1.0, 1.0])
    with pytest.raises(ValueError):
        tables.ss_factor[0, 1] = 1.0
    assert isinstance(tables, InterferenceTables)
