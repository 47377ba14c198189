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
import time
from functools import lru_cache

import numpy as np

from datastructures.interference_tables import InterferenceTables
from datastructures.power_vector import as_array
from model.grid import check_index, spectral_distance
from spectral.kernels import NESTED_TOLERANCE, adaptive_quad, fejer_smoothed_psd, leakage_factor

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def su_to_pu_interference(p_k, gain_sp, factor):
    """Interference I_k caused at a PU by subcarrier k: p_k * |h_sp|^2 * leakage."""
    return p_k * gain_sp * factor


def pu_leakage(grid, pu, k):
    """Interference per unit channel gain that a PU puts on subcarrier k, in watts.

    Integrates the FFT-smoothed PU PSD over the digital window of subcarrier k.

    Args:
        grid (OfdmGrid): Subcarrier layout.
        pu (PrimaryUser): The interfering PU.
        k (int): Victim subcarrier (0-based).

    Returns:
        float: Interference in watts before the PU-to-SU channel gain.
    """
    spectrum = pu.to_digital(grid)
    if spectrum.level == 0:
        return 0.0
    lo, hi = grid.digital_window(k)
    n = grid.fft_size
    # The smoothed PSD bends at the PU band edges
    breaks = [spectrum.lo, spectrum.hi]
    return adaptive_quad(lambda omega: fejer_smoothed_psd(spectrum, n, omega), lo, hi, points=breaks,
                         epsrel=NESTED_TOLERANCE)


def pu_to_su_interference(scenario, channels, l, k):
    """Interference J_k^(l) from PU l onto subcarrier k in watts.

    Args:
        scenario (Scenario): Scenario holding the grid and the PUs.
        channels (ChannelSet): Channel gains.
        l (int): PU index (0-based).
        k (int): Subcarrier index (0-based).

    Raises:
        IndexError: If l or k is out of range.

    Returns:
        float: J_k^(l) >= 0; zero when the PU-to-SU gain is zero.
    """
    check_index(scenario.grid, k)
    if not 0 <= l < scenario.pu_count:
        raise IndexError(f'PU index {l} outside 0..{scenario.pu_count - 1}')
    gain = float(channels.gain_ps[l, k])
    if gain == 0:
        return 0.0
    return gain * _pu_leakage_table(scenario.grid, scenario.pus)[l, k]


def su_to_su_interference(p, channels, tables, k):
    """Interference IN_k on subcarrier k from the subcarriers of other SUs, in watts.

    Args:
        p (PowerVector): Current allocation.
        channels (ChannelSet): Channel gains.
        tables (InterferenceTables): Precomputed overlap factors.
        k (int): Victim subcarrier (0-based).

    Returns:
        float: sum over i != k of p_i |h_ik^ss|^2 ss_factor[i, k] on foreign pairs.
    """
    if not 0 <= k < tables.k_count:
        raise IndexError(f'subcarrier index {k} outside 0..{tables.k_count - 1}')
    powers = as_array(p)
    column = tables.ss_coupling(channels)[:, k]
    return float(powers @ column)


@lru_cache(maxsize=32)
def _sp_factor_table(grid, pus):
    table = np.zeros((len(pus), grid.k_count))
    for l, pu in enumerate(pus):
        for k in range(grid.k_count):
            table[l, k] = leakage_factor(grid.symbol_time, spectral_distance(grid, pu, k), pu.band_width)
    table.flags.writeable = False
    return table


@lru_cache(maxsize=32)
def _pu_leakage_table(grid, pus):
    table = np.zeros((len(pus), grid.k_count))
    for l, pu in enumerate(pus):
        for k in range(grid.k_count):
            table[l, k] = pu_leakage(grid, pu, k)
    table.flags.writeable = False
    return table


@lru_cache(maxsize=32)
def _ss_factor_table(grid):
    # Depends on |i - k| only
    by_offset = [0.0] + [leakage_factor(grid.symbol_time, m * grid.subcarrier_bw, grid.subcarrier_bw)
                         for m in range(1, grid.k_count)]
    offsets = np.abs(np.subtract.outer(np.arange(grid.k_count), np.arange(grid.k_count)))
    table = np.asarray(by_offset)[offsets]
    table.flags.writeable = False
    return table


def build_tables(scenario, channels):
    """Precompute every overlap factor the capacity model needs.

    Spectral factors depend only on the layout and are cached across calls, so
    sweeping seeds over one scenario integrates once.

    Args:
        scenario (Scenario): Scenario to tabulate.
        channels (ChannelSet): Gains used for the PU-to-SU interference J.

    Raises:
        QuadratureError: If any integral fails to converge.

    Returns:
        InterferenceTables: The tables.
    """
    timer = time.perf_counter()
    grid, pus = scenario.grid, scenario.pus
    sp_factor = _sp_factor_table(grid, pus)
    ps_interference = channels.gain_ps * _pu_leakage_table(grid, pus)
    ss_factor = _ss_factor_table(grid)
    mask = scenario.foreign_pairs()
    np.fill_diagonal(mask, False)
    logger.debug(f'Built interference tables for K={grid.k_count}, L={len(pus)} '
                 f'in {time.perf_counter() - timer:.6f} seconds')
    return InterferenceTables(sp_factor=sp_factor, ps_interference=ps_interference,
                              ss_factor=ss_factor, ss_mask=mask)
