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
import os
from dataclasses import dataclass, field, fields, replace

import yaml

from algorithm.annealer import SaConfig
from algorithm.dual_solver import DualConfig
from model.grid import build_grid
from model.primary_user import standard_layout
from model.scenario import Scenario

AXES = ('p_max_dbw', 'pu_count', 'su_count', 'k_count', 'interference_cap', 'trace', 'snapshot')
INTEGER_AXES = ('pu_count', 'su_count', 'k_count')
METHODS = ('sa', 'dual', 'brute')
OUTPUT_DIR_ENV = 'CRPA_OUTPUT_DIR'


class ConfigError(ValueError):
    """A configuration file could not be parsed or holds an invalid value."""


def dbw_to_watts(x):
    """Convert decibels relative to one watt into watts: 10 ** (x / 10)."""
    if not math.isfinite(x):
        raise ValueError(f'dBW value must be finite, got `{x}`')
    return 10.0 ** (x / 10.0)


@dataclass(frozen=True)
class ScenarioTemplate:
    """Scenario parameters shared by every point of a sweep.

    Attributes:
        total_bw (float): System bandwidth in Hz. Defaults to 12.8 MHz.
        k_count (int): Number of subcarriers K. Defaults to 32.
        fft_size (int): FFT size N. Defaults to 32.
        base_freq (float): Lower band edge in Hz. Defaults to 0.
        pu_count (int): Number of PUs L, PU l sitting on subcarrier l. Defaults to 2.
        su_count (int): Number of SUs M. Defaults to 8.
        noise_var (float): Noise variance in watts. Defaults to 1e-6.
        p_max (float): SU power budget in watts. Defaults to 5 dBW.
        pu_power (float): Transmit power of every PU in watts. Defaults to 0.01.
        interference_cap (float): Interference threshold of every PU in watts. Defaults to 1 mW.
    """
    total_bw: float = 12.8e6
    k_count: int = 32
    fft_size: int = 32
    base_freq: float = 0.0
    pu_count: int = 2
    su_count: int = 8
    noise_var: float = 1e-6
    p_max: float = 10.0 ** 0.5
    pu_power: float = 0.01
    interference_cap: float = 1e-3

    @property
    def subcarrier_bw(self):
        return self.total_bw / self.k_count

    def build(self):
        """Materialize the template into a Scenario."""
        grid = build_grid(self.total_bw, self.k_count, self.fft_size, self.base_freq)
        pus = standard_layout(grid, self.pu_count, self.pu_power, self.interference_cap)
        return Scenario(grid=grid, pus=pus, su_count=self.su_count,
                        noise_var=self.noise_var, p_max=self.p_max)


def _default_values():
    return tuple(-20.0 + 2.5 * i for i in range(15))


@dataclass(frozen=True)
class SweepSettings:
    """What a sweep varies and how often it repeats each point.

    Attributes:
        name (str): Experiment label written to the manifest.
        axis (str): One of AXES. `trace` and `snapshot` take p_max values in dBW.
        values (tuple): Axis values; dBW for p_max axes, mW for interference_cap.
        methods (tuple[str]): Solvers to run, a subset of METHODS.
        trials (int): Seeded channel draws per point.
        master_seed (int): Seed every trial seed is derived from.
    """
    name: str = 'fig3'
    axis: str = 'p_max_dbw'
    values: tuple = field(default_factory=_default_values)
    methods: tuple = ('sa', 'dual')
    trials: int = 10
    master_seed: int = 0


@dataclass(frozen=True)
class ExperimentSpec:
    """A fully resolved experiment.

    Attributes:
        scenario (ScenarioTemplate): Base scenario.
        sweep (SweepSettings): Sweep axis and repetitions.
        sa (SaConfig): Annealing parameters; the seed is replaced per trial.
        dual (DualConfig): Dual search parameters.
        brute_resolution (float): Brute-force lattice step as a fraction of p_max.
        output (str): Path of the sweep CSV.
    """
    scenario: ScenarioTemplate = field(default_factory=ScenarioTemplate)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    sa: SaConfig = field(default_factory=SaConfig)
    dual: DualConfig = field(default_factory=DualConfig)
    brute_resolution: float = 0.02
    output: str = 'results/fig3.csv'


def default_paper_scenario():
    """The two-PU, eight-SU, 32-subcarrier cell at the default power budget."""
    return ScenarioTemplate().build()


def _as_float(value, path):
    if isinstance(value, bool):
        raise ConfigError(f'{path}: expected a number, got `{value}`')
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f'{path}: expected a number, got `{value}`') from None
    if math.isnan(number):
        raise ConfigError(f'{path}: expected a number, got `{value}`')
    return number


def _as_int(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(f'{path}: expected an integer, got `{value}`')
    return value


def _as_pair(value, path):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f'{path}: expected a [low, high] pair, got `{value}`')
    return tuple(_as_float(v, f'{path}[{i}]') for i, v in enumerate(value))


def _positive(value, path):
    if not (math.isfinite(value) and value > 0):
        raise ConfigError(f'{path}: must be positive, got `{value}`')


def _nonnegative(value, path):
    if not value >= 0:
        raise ConfigError(f'{path}: must be nonnegative, got `{value}`')


def _finite(value, path):
    if not math.isfinite(value):
        raise ConfigError(f'{path}: must be finite, got `{value}`')


_SCENARIO_KEYS = {
    'total_bw': (_as_float, _positive),
    'k_count': (_as_int, _positive),
    'fft_size': (_as_int, _positive),
    'base_freq': (_as_float, _finite),
    'pu_count': (_as_int, _nonnegative),
    'su_count': (_as_int, _positive),
    'noise_var': (_as_float, _positive),
    'p_max': (_as_float, _positive),
    'pu_power': (_as_float, _nonnegative),
    'interference_cap': (_as_float, _positive),
}

_SA_KEYS = {
    'initial_temp': _as_float,
    'cooling_factor': _as_float,
    'epsilon': _as_float,
    'max_iters': _as_int,
    'perturb_scale': _as_float,
    'inner_sweeps': _as_int,
    'temp_floor_ratio': _as_float,
}

_DUAL_KEYS = {
    'mu_range': _as_pair,
    'lambda_range': _as_pair,
    'grid_points': _as_int,
    'line_points': _as_int,
    'refine_iters': _as_int,
    'inner_fixed_point_iters': _as_int,
    'inner_tol': _as_float,
}

_SWEEP_KEYS = ('name', 'axis', 'values', 'methods', 'trials', 'master_seed')
_TOP_KEYS = ('scenario', 'sweep', 'sa', 'dual', 'brute', 'output')


def _section(data, name, allowed):
    section = data.get(name)
    if section is None:
        return {}
    if not isinstance(section, dict):
        raise ConfigError(f'{name}: expected a mapping, got `{section}`')
    for key in section:
        if key not in allowed:
            raise ConfigError(f'{name}.{key}: unknown key')
    return section


def _build(cls, name, values):
    """Construct a config dataclass, reporting its validation errors under the section name."""
    try:
        return cls(**values)
    except ValueError as exc:
        bad = next((key for key in values if str(exc).startswith(key)), None)
        raise ConfigError(f'{name}.{bad}: {exc}' if bad else f'{name}: {exc}') from None


def _parse_sweep(section):
    values = {}
    if 'name' in section:
        values['name'] = str(section['name'])
    if 'axis' in section:
        if section['axis'] not in AXES:
            raise ConfigError(f'sweep.axis: must be one of {", ".join(AXES)}, got `{section["axis"]}`')
        values['axis'] = section['axis']
    axis = values.get('axis', SweepSettings.axis)

    if 'values' in section:
        raw = section['values']
        if not isinstance(raw, list) or not raw:
            raise ConfigError('sweep.values: expected a non-empty list')
        convert = _as_int if axis in INTEGER_AXES else _as_float
        values['values'] = tuple(convert(v, f'sweep.values[{i}]') for i, v in enumerate(raw))
    elif axis != SweepSettings.axis:
        raise ConfigError(f'sweep.values: required for axis `{axis}`')
    for i, value in enumerate(values.get('values', ())):
        if axis in INTEGER_AXES:
            (_nonnegative if axis == 'pu_count' else _positive)(value, f'sweep.values[{i}]')
        elif axis == 'interference_cap':
            _positive(value, f'sweep.values[{i}]')
        else:
            _finite(value, f'sweep.values[{i}]')

    if 'methods' in section:
        raw = section['methods']
        if isinstance(raw, str):
            raw = [raw]
        if not isinstance(raw, list) or not raw:
            raise ConfigError('sweep.methods: expected a non-empty list')
        for method in raw:
            if method not in METHODS:
                raise ConfigError(f'sweep.methods: unknown method `{method}`')
        values['methods'] = tuple(dict.fromkeys(raw))
    if axis == 'trace' and 'sa' not in values.get('methods', SweepSettings.methods):
        raise ConfigError('sweep.methods: the trace axis needs `sa`')

    if 'trials' in section:
        values['trials'] = _as_int(section['trials'], 'sweep.trials')
        if values['trials'] < 1:
            raise ConfigError(f'sweep.trials: must be at least 1, got `{values["trials"]}`')
    if 'master_seed' in section:
        values['master_seed'] = _as_int(section['master_seed'], 'sweep.master_seed')
        _nonnegative(values['master_seed'], 'sweep.master_seed')
    return SweepSettings(**values)


def spec_from_dict(data):
    """Validate a parsed YAML tree into an ExperimentSpec.

    Args:
        data (dict | None): Parsed configuration; None means all defaults.

    Raises:
        ConfigError: On unknown keys, wrong types or out-of-range values.

    Returns:
        ExperimentSpec: The resolved experiment.
    """
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f'top level: expected a mapping, got `{type(data).__name__}`')
    for key in data:
        if key not in _TOP_KEYS:
            raise ConfigError(f'{key}: unknown key')

    scenario_section = _section(data, 'scenario', _SCENARIO_KEYS)
    scenario_values = {}
    for key, value in scenario_section.items():
        convert, check = _SCENARIO_KEYS[key]
        scenario_values[key] = convert(value, f'scenario.{key}')
        check(scenario_values[key], f'scenario.{key}')
    template = ScenarioTemplate(**scenario_values)
    try:
        template.build()
    except ValueError as exc:
        raise ConfigError(f'scenario: {exc}') from None

    sa_section = _section(data, 'sa', _SA_KEYS)
    sa = _build(SaConfig, 'sa',
                {key: _SA_KEYS[key](value, f'sa.{key}') for key, value in sa_section.items()})
    dual_section = _section(data, 'dual', _DUAL_KEYS)
    dual = _build(DualConfig, 'dual',
                  {key: _DUAL_KEYS[key](value, f'dual.{key}') for key, value in dual_section.items()})

    brute_section = _section(data, 'brute', ('resolution_fraction',))
    brute_resolution = ExperimentSpec.brute_resolution
    if 'resolution_fraction' in brute_section:
        brute_resolution = _as_float(brute_section['resolution_fraction'], 'brute.resolution_fraction')
        if not 0 < brute_resolution <= 1:
            raise ConfigError(f'brute.resolution_fraction: must lie in (0, 1], got `{brute_resolution}`')

    output = data.get('output', ExperimentSpec.output)
    if not isinstance(output, str) or not output:
        raise ConfigError(f'output: expected a file path, got `{output}`')

    sweep = _parse_sweep(_section(data, 'sweep', _SWEEP_KEYS))
    return ExperimentSpec(scenario=template, sweep=sweep, sa=sa, dual=dual,
                          brute_resolution=brute_resolution, output=output)


def load_config(path):
    """Read and validate a YAML experiment file.

    Args:
        path (str): Config file path.

    Raises:
        ConfigError: If the file is missing, is not valid YAML (message carries
            file:line:column) or holds invalid values (message carries the key path).

    Returns:
        ExperimentSpec: The resolved experiment.
    """
    try:
        with open(path, 'r') as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f'{path}: cannot read config ({exc.strerror})') from None
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ConfigError(f'{path}:{mark.line + 1}:{mark.column + 1}: {exc.problem}') from None
    except yaml.YAMLError as exc:
        raise ConfigError(f'{path}: {exc}') from None
    return spec_from_dict(data)


def spec_to_dict(spec):
    """Plain nested dict of every setting, in the key order of the YAML schema."""
    sa = {f.name: getattr(spec.sa, f.name) for f in fields(SaConfig) if f.name not in ('seed', 'power_budget')}
    dual = {f.name: getattr(spec.dual, f.name) for f in fields(DualConfig)}
    dual['mu_range'] = list(dual['mu_range'])
    dual['lambda_range'] = list(dual['lambda_range'])
    sweep = {f.name: getattr(spec.sweep, f.name) for f in fields(SweepSettings)}
    sweep['values'] = list(sweep['values'])
    sweep['methods'] = list(sweep['methods'])
    return {'scenario': {f.name: getattr(spec.scenario, f.name) for f in fields(ScenarioTemplate)},
            'sweep': sweep,
            'sa': sa,
            'dual': dual,
            'brute': {'resolution_fraction': spec.brute_resolution},
            'output': spec.output}


def dump_config(spec):
    """Serialize a spec to YAML text that load_config reads back to the same spec."""
    return yaml.safe_dump(spec_to_dict(spec), sort_keys=False, default_flow_style=None)


def with_overrides(spec, master_seed=None):
    """Copy of spec with the CLI's --seed applied to the sweep."""
    if master_seed is not None:
        if master_seed < 0:
            raise ConfigError(f'--seed: must be nonnegative, got `{master_seed}`')
        spec = replace(spec, sweep=replace(spec.sweep, master_seed=master_seed))
    return spec


def resolve_output(path):
    """Move an output path into $CRPA_OUTPUT_DIR when that variable is set."""
    directory = os.environ.get(OUTPUT_DIR_ENV)
    if directory:
        return os.path.join(directory, os.path.basename(path))
    return path
