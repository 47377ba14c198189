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
from dataclasses import dataclass
from fractions import Fraction

# Subcarrier spacing must resolve to a whole number of millihertz
SPACING_RESOLUTION = 1000


@dataclass(frozen=True)
class OfdmGrid:
    """Subcarrier layout of the secondary OFDM system.

    Attributes:
        k_count (int): Number of subcarriers (K).
        subcarrier_bw (float): Subcarrier spacing B_s in Hz.
        symbol_time (float): OFDM symbol duration T_s in seconds, always 1 / B_s.
        fft_size (int): FFT size N used by the receivers.
        center_freq (tuple[float]): Center frequency of each subcarrier in Hz, index 0..K-1.

    Methods:
        total_bw: Total occupied bandwidth K * B_s.
        system_center: Center frequency of the whole band.
        digital_frequency(f): Map a frequency in Hz onto the [-pi, pi] FFT axis.
        digital_window(k): Digital-frequency window of subcarrier k.
    """
    k_count: int
    subcarrier_bw: float
    symbol_time: float
    fft_size: int
    center_freq: tuple

    @property
    def total_bw(self):
        return self.k_count * self.subcarrier_bw

    @property
    def system_center(self):
        return self.center_freq[0] - self.subcarrier_bw / 2 + self.total_bw / 2

    def digital_frequency(self, f):
        """Map a frequency in Hz onto the normalized digital axis.

        The full K * B_s band spans [-pi, pi].

        Args:
            f (float): Frequency in Hz.

        Returns:
            float: Digital frequency in radians per sample.
        """
        return 2.0 * math.pi * (f - self.system_center) / self.total_bw

    def digital_window(self, k):
        """Digital-frequency window [lo, hi] occupied by subcarrier k."""
        check_index(self, k)
        width = 2.0 * math.pi / self.k_count
        lo = -math.pi + k * width
        return lo, lo + width


def build_grid(total_bw, k_count, fft_size, base_freq=0.0):
    """Split a band of total_bw Hz into k_count equal subcarriers.

    Args:
        total_bw (float): Total system bandwidth in Hz.
        k_count (int): Number of subcarriers.
        fft_size (int): FFT size N.
        base_freq (float): Lower edge of the band in Hz. Defaults to 0.

    Raises:
        ValueError: If an argument is non-positive or the band does not split into
            k_count equal subcarriers.

    Returns:
        OfdmGrid: The subcarrier layout.
    """
    if not isinstance(k_count, int) or isinstance(k_count, bool) or k_count < 1:
        raise ValueError(f'k_count must be a positive integer, got `{k_count}`')
    if not isinstance(fft_size, int) or isinstance(fft_size, bool) or fft_size < 1:
        raise ValueError(f'fft_size must be a positive integer, got `{fft_size}`')
    if not math.isfinite(total_bw) or total_bw <= 0:
        raise ValueError(f'total_bw must be positive, got `{total_bw}`')
    if not math.isfinite(base_freq):
        raise ValueError(f'base_freq must be finite, got `{base_freq}`')

    spacing = Fraction(total_bw) / k_count
    if (spacing * SPACING_RESOLUTION).denominator != 1:
        raise ValueError(f'{total_bw} Hz does not divide into {k_count} equal subcarriers')

    subcarrier_bw = float(spacing)
    centers = tuple(base_freq + (k + 0.5) * subcarrier_bw for k in range(k_count))
    return OfdmGrid(k_count=k_count,
                    subcarrier_bw=subcarrier_bw,
                    symbol_time=1.0 / subcarrier_bw,
                    fft_size=fft_size,
                    center_freq=centers)


def check_index(grid, k):
    if not 0 <= k < grid.k_count:
        raise IndexError(f'subcarrier index {k} outside 0..{grid.k_count - 1}')


def spectral_distance(grid, pu, k):
    """Distance in Hz between the center of subcarrier k and the center of a PU band.

    Args:
        grid (OfdmGrid): Subcarrier layout.
        pu (PrimaryUser): Primary user.
        k (int): Subcarrier index (0-based).

    Raises:
        IndexError: If k is not a valid subcarrier index.

    Returns:
        float: |f_k - f_pu| in Hz.
    """
    check_index(grid, k)
    return abs(grid.center_freq[k] - pu.band_center)
