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

import pytest

from algorithm.annealer import SaConfig
from cli.config import (ConfigError, ExperimentSpec, dbw_to_watts, default_paper_scenario, dump_config, load_config,
                        resolve_output, spec_from_dict)

DATA = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'data')


def write(tmp_path, text):
    path = tmp_path / 'config.yaml'
    path.write_text(text)
    return str(path)


def test_dbw_to_watts():
    assert dbw_to_watts(0.0) == 1.0
    assert dbw_to_watts(5.0) == pytest.approx(3.16227766, rel=1e-9)
    assert dbw_to_watts(-10.0) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        dbw_to_watts(float('inf'))


def test_default_paper_scenario():
    scenario = default_paper_scenario()
    assert scenario.grid.subcarrier_bw == pytest.approx(0.4e6)
    assert scenario.k_count == 32 and scenario.grid.fft_size == 32
    assert scenario.pu_count == 2 and scenario.su_count == 8
    assert scenario.noise_var == 1e-6
    assert [pu.interference_cap for pu in scenario.pus] == [1e-3, 1e-3]
    assert [pu.tx_power for pu in scenario.pus] == [0.01, 0.01]
    assert scenario.pus[1].band_center == scenario.grid.center_freq[1]


def test_empty_file_gives_fig3_defaults(tmp_path):
    spec = load_config(write(tmp_path, ''))
    assert spec == ExperimentSpec()
    assert spec.sweep.name == 'fig3'
    assert spec.sweep.values[0] == -20.0 and spec.sweep.values[-1] == 15.0
    assert len(spec.sweep.values) == 15
    assert spec.sweep.methods == ('sa', 'dual')
    assert spec.sweep.trials == 10


@pytest.mark.parametrize('name', ['fig3.yaml', 'fig4.yaml', 'fig5.yaml', 'fig6.yaml', 'fig7.yaml', 'complexity.yaml',
                                  'interference_cap.yaml', 'desk_k4.yaml'])
def test_dump_is_a_fixed_point(tmp_path, name):
    once = dump_config(load_config(os.path.join(DATA, name)))
    twice = dump_config(load_config(write(tmp_path, once)))
    assert once == twice


def test_bundled_desk_config():
    spec = load_config(os.path.join(DATA, 'desk_k4.yaml'))
    assert spec.scenario.k_count == 4
    assert spec.sa == SaConfig(initial_temp=0.01, perturb_scale=0.2, max_iters=3000, inner_sweeps=10)
    assert spec.sweep.methods == ('sa', 'dual', 'brute')


def test_string_numbers_are_accepted(tmp_path):
    spec = load_config(write(tmp_path, 'scenario:\n  noise_var: 1e-6\n  p_max: "2"\n'))
    assert spec.scenario.noise_var == 1e-6
    assert spec.scenario.p_max == 2.0


@pytest.mark.parametrize('text, key', [
    ('scenario:\n  p_max: -1\n', 'scenario.p_max'),
    ('scenario:\n  foo: 1\n', 'scenario.foo'),
    ('scenario:\n  k_count: 2.5\n', 'scenario.k_count'),
    ('bogus: 1\n', 'bogus'),
    ('sa:\n  cooling_factor: 1.5\n', 'sa.cooling_factor'),
    ('dual:\n  mu_range: [1.0]\n', 'dual.mu_range'),
    ('sweep:\n  axis: nothing\n', 'sweep.axis'),
    ('sweep:\n  methods: [sa, magic]\n', 'sweep.methods'),
    ('sweep:\n  trials: 0\n', 'sweep.trials'),
    ('sweep:\n  axis: trace\n  values: [5.0]\n  methods: [dual]\n', 'sweep.methods'),
    ('sweep:\n  axis: pu_count\n', 'sweep.values'),
    ('brute:\n  resolution_fraction: 2\n', 'brute.resolution_fraction'),
])
def test_semantic_errors_name_the_key(tmp_path, text, key):
    with pytest.raises(ConfigError) as info:
        load_config(write(tmp_path, text))
    assert str(info.value).startswith(key)


def test_syntax_error_reports_position(tmp_path):
    path = write(tmp_path, 'scenario:\n  p_max: [1, 2\n')
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert str(info.value).startswith(f'{path}:')
    line, column = str(info.value)[len(path) + 1:].split(':')[:2]
    assert int(line) >= 2 and int(column) >= 1


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / 'missing.yaml'))


def test_non_divisible_grid_is_rejected():
    with pytest.raises(ConfigError):
        spec_from_dict({'scenario': {'k_count': 33}})


def test_output_directory_override(monkeypatch, tmp_path):
    monkeypatch.delenv('CRPA_OUTPUT_DIR', raising=False)
    assert resolve_output('results/fig3.csv') == 'results/fig3.csv'
    monkeypatch.setenv('CRPA_OUTPUT_DIR', str(tmp_path))
    assert resolve_output('results/fig3.csv') == os.path.join(str(tmp_path), 'fig3.csv')
