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

import csv
import hashlib
import logging
import math
import os

import numpy as np

from cli.config import dump_config

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ARTIFACT_VERSION = '1.0.0'

SUMMARY_COLUMNS = ['axis', 'value', 'method', 'trials', 'failures', 'mean_capacity', 'std_capacity',
                   'mean_capacity_bps', 'mean_evals', 'feasible_fraction']
TRIAL_COLUMNS = ['axis', 'value', 'trial', 'seed', 'method', 'capacity', 'capacity_bps', 'evals', 'feasible',
                 'error']
TIMING_COLUMNS = ['axis', 'value', 'trial', 'method', 'wall_time']
TRACE_COLUMNS = ['t', 'temperature', 'energy', 'capacity', 'accepted', 'best_capacity']
SNAPSHOT_COLUMNS = ['value', 'trial', 'seed', 'method', 'subcarrier', 'power', 'rate']
TABLE_COLUMNS = ['table', 'l_or_i', 'k', 'factor_or_watts']


def _fmt(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return 'nan' if math.isnan(value) else f'{value:.12g}'
    return str(value)


def sibling_path(path, suffix):
    """`results/fig3.csv` with suffix `timing` becomes `results/fig3.timing.csv`."""
    stem, ext = os.path.splitext(path)
    return f'{stem}.{suffix}{ext or ".csv"}'


def config_digest(spec):
    return hashlib.sha256(dump_config(spec).encode('utf-8')).hexdigest()


def manifest(spec, seeds):
    """Manifest lines identifying the experiment that produced a file."""
    return [f'schema_version: {SCHEMA_VERSION}',
            f'artifact_version: {ARTIFACT_VERSION}',
            f'experiment: {spec.sweep.name}',
            f'config_sha256: {config_digest(spec)}',
            f'seeds: {" ".join(str(seed) for seed in seeds)}']


def _write_csv(path, header_lines, columns, rows):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        for line in header_lines:
            f.write(f'# {line}\n')
        writer = csv.DictWriter(f, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({key: _fmt(value) for key, value in row.items()})


def write_sweep(result, path):
    """Write a sweep's summary CSV plus the per-trial, timing and plot-script companions.

    Args:
        result (ExperimentResult): Finished sweep.
        path (str): Summary CSV path.

    Returns:
        list[str]: Every file written.
    """
    spec = result.spec
    axis = spec.sweep.axis
    header = manifest(spec, result.seeds) + [f'axis: {axis}']
    logger.info(f'Writing sweep results to `{path}`')

    _write_csv(path, header, SUMMARY_COLUMNS,
               ({'axis': axis, 'value': point.value, 'method': point.method, 'trials': point.trials,
                 'failures': point.failures, 'mean_capacity': point.mean_capacity,
                 'std_capacity': point.std_capacity, 'mean_capacity_bps': point.mean_capacity_bps,
                 'mean_evals': point.mean_evals, 'feasible_fraction': point.feasible_fraction}
                for point in result.summary))

    trials_path = sibling_path(path, 'trials')
    _write_csv(trials_path, header, TRIAL_COLUMNS,
               ({'axis': axis, 'value': row.value, 'trial': row.trial + 1, 'seed': row.seed,
                 'method': row.method, 'capacity': row.capacity, 'capacity_bps': row.capacity_bps,
                 'evals': row.evals, 'feasible': row.feasible, 'error': row.error}
                for row in result.rows))

    timing_path = sibling_path(path, 'timing')
    _write_csv(timing_path, [f'experiment: {spec.sweep.name}'], TIMING_COLUMNS,
               ({'axis': axis, 'value': row.value, 'trial': row.trial + 1, 'method': row.method,
                 'wall_time': row.wall_time}
                for row in result.rows))

    written = [path, trials_path, timing_path]
    if axis == 'snapshot':
        snapshot_path = sibling_path(path, 'snapshot')
        write_snapshot(result.allocations, snapshot_path, header)
        written.append(snapshot_path)
    elif axis == 'trace':
        trace_path = sibling_path(path, 'trace')
        rows = [dict(value=kept.value, trial=kept.trial + 1, **_trace_row(record))
                for kept in result.allocations for record in kept.result.trace]
        _write_csv(trace_path, header, ['value', 'trial'] + TRACE_COLUMNS, rows)
        written.append(trace_path)

    plot_path = os.path.splitext(path)[0] + '.plot.py'
    write_plot_stub(path, plot_path, axis)
    written.append(plot_path)
    return written


def _trace_row(record):
    return {'t': record.t, 'temperature': record.temperature, 'energy': record.energy,
            'capacity': record.capacity, 'accepted': record.accepted, 'best_capacity': record.best_capacity}


def write_trace(trace, path, header_lines=()):
    """Write an annealing trace, one row per iteration."""
    logger.info(f'Writing annealing trace to `{path}`')
    _write_csv(path, header_lines, TRACE_COLUMNS, (_trace_row(record) for record in trace))


def write_snapshot(allocations, path, header_lines=()):
    """Write the per-subcarrier powers and rates of kept allocations; subcarriers are 1-based."""
    logger.info(f'Writing allocation snapshot to `{path}`')
    rows = []
    for kept in allocations:
        for k, (power, rate) in enumerate(zip(kept.result.powers, kept.rates)):
            rows.append({'value': kept.value, 'trial': kept.trial + 1, 'seed': kept.seed,
                         'method': kept.method, 'subcarrier': k + 1, 'power': float(power), 'rate': rate})
    _write_csv(path, header_lines, SNAPSHOT_COLUMNS, rows)


def write_tables(tables, path, header_lines=()):
    """Write the interference tables of one scenario; PU, subcarrier and source indices are 1-based."""
    logger.info(f'Writing interference tables to `{path}`')
    rows = []
    for name, table in (('sp_factor', tables.sp_factor), ('ps_interference', tables.ps_interference),
                        ('ss_factor', tables.ss_factor)):
        for (i, k), value in np.ndenumerate(table):
            rows.append({'table': name, 'l_or_i': i + 1, 'k': k + 1, 'factor_or_watts': float(value)})
    _write_csv(path, header_lines, TABLE_COLUMNS, rows)


_PLOT_TEMPLATE = '''\
"""Plot `{csv_name}`. Requires matplotlib."""

import csv
import os

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))

with open(os.path.join(HERE, {csv_name!r}), newline='') as f:
    rows = list(csv.DictReader(line for line in f if not line.startswith('#')))

fig, ax = plt.subplots()
for method in dict.fromkeys(row['method'] for row in rows):
    points = [row for row in rows if row['method'] == method]
    x = [float(row['value']) for row in points]
    y = [float(row['mean_capacity']) for row in points]
    err = [float(row['std_capacity']) for row in points]
    ax.errorbar(x, y, yerr=err, marker='o', capsize=3, label=method)
ax.set_xlabel({xlabel!r})
ax.set_ylabel('Total SU capacity (bits/s/Hz)')
ax.grid(True)
ax.legend()
fig.savefig(os.path.join(HERE, {png_name!r}), dpi=150)
'''

_AXIS_LABELS = {
    'p_max_dbw': 'p_max (dBW)',
    'pu_count': 'Number of PUs',
    'su_count': 'Number of SUs',
    'k_count': 'Number of subcarriers',
    'interference_cap': 'I_th (mW)',
    'trace': 'p_max (dBW)',
    'snapshot': 'p_max (dBW)',
}


def write_plot_stub(csv_path, plot_path, axis):
    """Write a small matplotlib script that plots a sweep summary CSV."""
    csv_name = os.path.basename(csv_path)
    text = _PLOT_TEMPLATE.format(csv_name=csv_name, xlabel=_AXIS_LABELS[axis],
                                 png_name=os.path.splitext(csv_name)[0] + '.png')
    with open(plot_path, 'w', encoding='utf-8') as f:
        f.write(text)
