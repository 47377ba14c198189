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
from scipy import stats

from model.channels import ChannelSet, sample_channels
from model.grid import build_grid, spectral_distance
from model.primary_user import DigitalSpectrum, PrimaryUser, standard_layout
from model.scenario import Scenario, round_robin_assignment


def cell_grid():
    return build_grid(12.8e6, 32, 32)


def test_build_grid_splits_system_band():
    grid = cell_grid()
    assert grid.subcarrier_bw == pytest.approx(0.4e6, rel=1e-15)
    assert grid.symbol_time == pytest.approx(2.5e-6, rel=1e-15)
    assert grid.center_freq[0] == pytest.approx(0.2e6)
    assert grid.center_freq[-1] - grid.center_freq[0] == pytest.approx(31 * 0.4e6, rel=1e-15)
    assert all(b > a for a, b in zip(grid.center_freq, grid.center_freq[1:]))


def test_build_grid_single_subcarrier():
    grid = build_grid(1.0, 1, 1)
    assert grid.center_freq == (0.5,)
    assert grid.symbol_time == 1.0


@pytest.mark.parametrize('args', [(12.8e6, 33, 32), (0.0, 4, 4), (-1.0, 4, 4), (1.6e6, 0, 4), (1.6e6, 4, 0)])
def test_build_grid_rejects_bad_arguments(args):
    with pytest.raises(ValueError):
        build_grid(*args)


@pytest.mark.parametrize('args', [(12.8e6 + 1e-4, 32, 32), (1e-4, 1, 1)])
def test_build_grid_rejects_band_off_the_millihertz_grid(args):
    with pytest.raises(ValueError):
        build_grid(*args)


def test_digital_windows_tile_the_axis():
    grid = build_grid(1.6e6, 4, 4)
    assert grid.digital_window(0)[0] == pytest.approx(-math.pi)
    assert grid.digital_window(3)[1] == pytest.approx(math.pi)
    for k in range(3):
        assert grid.digital_window(k)[1] == pytest.approx(grid.digital_window(k + 1)[0])
    lo, hi = grid.digital_window(1)
    assert grid.digital_frequency(grid.center_freq[1]) == pytest.approx((lo + hi) / 2)
    with pytest.raises(IndexError):
        grid.digital_window(4)


def test_spectral_distance_in_standard_layout():
    grid = cell_grid()
    pus = standard_layout(grid, 2, tx_power=0.01, interference_cap=1e-3)
    assert spectral_distance(grid, pus[0], 0) == 0
    assert spectral_distance(grid, pus[0], 1) == pytest.approx(0.4e6)
    assert spectral_distance(grid, pus[0], 4) == pytest.approx(1.6e6)
    with pytest.raises(IndexError):
        spectral_distance(grid, pus[0], 32)


def test_primary_user_validation():
    with pytest.raises(ValueError):
        PrimaryUser(band_center=0.0, band_width=0.0, tx_power=0.01, interference_cap=1e-3)
    with pytest.raises(ValueError):
        PrimaryUser(band_center=0.0, band_width=1.0, tx_power=-1.0, interference_cap=1e-3)
    with pytest.raises(ValueError):
        PrimaryUser(band_center=0.0, band_width=1.0, tx_power=0.01, interference_cap=0.0)
    with pytest.raises(ValueError):
        standard_layout(build_grid(1.6e6, 4, 4), 5, 0.01, 1e-3)


def test_pu_band_maps_onto_its_subcarrier_window():
    grid = build_grid(1.6e6, 4, 4)
    pu = standard_layout(grid, 1, 0.01, 1e-3)[0]
    spectrum = pu.to_digital(grid)
    lo, hi = grid.digital_window(0)
    assert (spectrum.lo, spectrum.hi) == pytest.approx((lo, hi))
    assert spectrum.level == 0.01
    assert spectrum(lo + 0.1) == 0.01
    assert spectrum(hi + 0.1) == 0.0


def test_out_of_band_pu_is_clipped():
    grid = build_grid(1.6e6, 4, 4)
    pu = PrimaryUser(band_center=-1e6, band_width=4e6, tx_power=1.0, interference_cap=1.0)
    spectrum = pu.to_digital(grid)
    assert spectrum.lo == -math.pi
    with pytest.raises(ValueError):
        DigitalSpectrum(level=1.0, lo=-4.0, hi=0.0)


def test_scenario_validation_and_round_robin():
    grid = build_grid(1.6e6, 4, 4)
    scenario = Scenario(grid=grid, pus=(), su_count=2, noise_var=1e-6, p_max=1.0)
    assert scenario.su_assignment == (0, 1, 0, 1)
    assert round_robin_assignment(5, 2) == (0, 1, 0, 1, 0)
    assert scenario.pu_count == 0
    assert scenario.with_p_max(2.0).p_max == 2.0
    mask = scenario.foreign_pairs()
    assert not mask[0, 2] and mask[0, 1]
    for kwargs in ({'noise_var': 0.0}, {'p_max': -1.0}, {'su_count': 0}, {'su_assignment': (0, 1, 2, 0)}):
        values = dict(grid=grid, pus=(), su_count=2, noise_var=1e-6, p_max=1.0)
        values.update(kwargs)
        with pytest.raises(ValueError):
            Scenario(**values)


def test_sample_channels_is_deterministic():
    grid = cell_grid()
    scenario = Scenario(grid=grid, pus=standard_layout(grid, 2, 0.01, 1e-3), su_count=8, noise_var=1e-6, p_max=1.0)
    first = sample_channels(scenario, 7)
    assert first == sample_channels(scenario, 7)
    assert first != sample_channels(scenario, 8)
    assert first.gain_sp.shape == (2, 32)
    assert np.all(np.diag(first.gain_ss_cross) == 0)
    with pytest.raises(ValueError):
        first.gain_ss_direct[0] = 1.0


def test_su_gains_do_not_depend_on_pu_count():
    grid = cell_grid()
    one = Scenario(grid=grid, pus=standard_layout(grid, 1, 0.01, 1e-3), su_count=8, noise_var=1e-6, p_max=1.0)
    four = Scenario(grid=grid, pus=standard_layout(grid, 4, 0.01, 1e-3), su_count=8, noise_var=1e-6, p_max=1.0)
    assert np.array_equal(sample_channels(one, 3).gain_ss_cross, sample_channels(four, 3).gain_ss_cross)


def test_sampled_gains_are_unit_exponential():
    grid = build_grid(316e3, 316, 316)
    scenario = Scenario(grid=grid, pus=(), su_count=1, noise_var=1e-6, p_max=1.0)
    cross = sample_channels(scenario, 2024).gain_ss_cross
    gains = cross[~np.eye(316, dtype=bool)]
    assert gains.size > 99_000
    assert np.all(gains >= 0)
    assert 0.99 <= np.mean(gains) <= 1.01
    assert stats.kstest(gains, 'expon').statistic < 0.01


def test_channel_set_rejects_bad_gains():
    with pytest.raises(ValueError):
        ChannelSet(gain_sp=np.zeros((0, 2)), gain_ps=np.zeros((0, 2)), gain_ss_direct=[1.0, -1.0],
                   gain_ss_cross=np.zeros((2, 2)))
    with pytest.raises(ValueError):
        ChannelSet(gain_sp=np.zeros((1, 2)), gain_ps=np.zeros((1, 3)), gain_ss_direct=[1.0, 1.0],
                   gain_ss_cross=np.zeros((2, 2)))
