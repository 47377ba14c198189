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


def _frozen(array, dtype=float):
    array = np.array(array, dtype=dtype)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class InterferenceTables:
    """Precomputed spectral-overlap factors so optimizers never integrate in their loops.

    Attributes:
        sp_factor (np.ndarray): Fraction of subcarrier k's power leaking into PU l's band,
            shape (L, K). Multiply by p_k |h_sp|^2 for the interference I_k.
        ps_interference (np.ndarray): Interference J_k^(l) from PU l onto subcarrier k in watts,
            shape (L, K).
        ss_factor (np.ndarray): Fraction of subcarrier i's power leaking into subcarrier k's
            band, shape (K, K), zero diagonal.
        ss_mask (np.ndarray): True where subcarriers i and k belong to different SUs, shape (K, K).

    Methods:
        sp_coupling(channels): Per-watt interference of each subcarrier at each PU.
        ss_coupling(channels): Per-watt leakage from subcarrier i onto subcarrier k.
    """
    sp_factor: np.ndarray
    ps_interference: np.ndarray
    ss_factor: np.ndarray
    ss_mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'sp_factor', _frozen(self.sp_factor))
        object.__setattr__(self, 'ps_interference', _frozen(self.ps_interference))
        object.__setattr__(self, 'ss_factor', _frozen(self.ss_factor))
        object.__setattr__(self, 'ss_mask', _frozen(self.ss_mask, dtype=bool))

    @property
    def k_count(self):
        return self.ss_factor.shape[0]

    def sp_coupling(self, channels):
        """Matrix A with A[l, k] = |h_k^sp|^2 * sp_factor[l, k], so I^l = A @ p."""
        return channels.gain_sp * self.sp_factor

    def ss_coupling(self, channels):
        """Matrix S with S[i, k] = |h_ik^ss|^2 * ss_factor[i, k] on foreign pairs, so IN = p @ S."""
        return np.where(self.ss_mask, channels.gain_ss_cross * self.ss_factor, 0.0)

    def pu_interference_at(self):
        """Total PU interference sum_l J_k^(l) on each subcarrier, shape (K,)."""
        return np.sum(self.ps_interference, axis=0)
