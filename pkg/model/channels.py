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

from dataclasses import dataclass

import numpy as np


def _frozen(array):
    array = np.array(array, dtype=float)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Power gains |h|^2 of every link in a scenario.

    Attributes:
        gain_sp (np.ndarray): SU transmitter to PU receiver, shape (L, K).
        gain_ps (np.ndarray): PU transmitter to SU receiver, shape (L, K).
        gain_ss_direct (np.ndarray): Desired SU link on each subcarrier, shape (K,).
        gain_ss_cross (np.ndarray): Leakage path from subcarrier i onto subcarrier k,
            shape (K, K), zero diagonal.
    """
    gain_sp: np.ndarray
    gain_ps: np.ndarray
    gain_ss_direct: np.ndarray
    gain_ss_cross: np.ndarray

    def __post_init__(self):
        for name in ('gain_sp', 'gain_ps', 'gain_ss_direct', 'gain_ss_cross'):
            value = _frozen(getattr(self, name))
            if not np.all(np.isfinite(value)) or np.any(value < 0):
                raise ValueError(f'{name} must hold finite nonnegative gains')
            object.__setattr__(self, name, value)
        k_count = self.gain_ss_direct.shape[0]
        if self.gain_ss_cross.shape != (k_count, k_count):
            raise ValueError(f'gain_ss_cross must have shape ({k_count}, {k_count})')
        if self.gain_sp.shape != self.gain_ps.shape or self.gain_sp.shape[1:] != (k_count,):
            raise ValueError(f'gain_sp and gain_ps must both have shape (L, {k_count})')

    def __eq__(self, other):
        if not isinstance(other, ChannelSet):
            return NotImplemented
        return all(np.array_equal(getattr(self, name), getattr(other, name))
                   for name in ('gain_sp', 'gain_ps', 'gain_ss_direct', 'gain_ss_cross'))

    __hash__ = None


def sample_channels(scenario, seed):
    """Draw Rayleigh-faded power gains (exponential, unit mean) for a scenario.

    SU gains are drawn before PU gains, so for a fixed seed the SU links do not
    change with the number of PUs.

    Args:
        scenario (Scenario): Scenario fixing L and K.
        seed (int): Seed for numpy's default generator.

    Returns:
        ChannelSet: The sampled gains.
    """
    rng = np.random.default_rng(seed)
    k_count = scenario.k_count
    pu_count = scenario.pu_count

    direct = rng.exponential(1.0, size=k_count)
    cross = rng.exponential(1.0, size=(k_count, k_count))
    np.fill_diagonal(cross, 0.0)
    gain_sp = rng.exponential(1.0, size=(pu_count, k_count))
    gain_ps = rng.exponential(1.0, size=(pu_count, k_count))
    return ChannelSet(gain_sp=gain_sp, gain_ps=gain_ps, gain_ss_direct=direct, gain_ss_cross=cross)
