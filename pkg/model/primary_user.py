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

import enum
import math
from dataclasses import dataclass


class PsdShape(enum.Enum):
    """Shape of a primary user's power spectral density."""
    FLAT = 'flat'


@dataclass(frozen=True)
class DigitalSpectrum:
    """A PU spectrum expressed on the [-pi, pi] digital-frequency axis.

    The PSD equals `level` on [lo, hi] and zero elsewhere.

    Attributes:
        level (float): PSD amplitude in watts per (rad/sample).
        lo (float): Lower band edge in radians.
        hi (float): Upper band edge in radians.
    """
    level: float
    lo: float = -math.pi
    hi: float = math.pi

    def __post_init__(self):
        if self.level < 0:
            raise ValueError(f'PSD level must be nonnegative, got `{self.level}`')
        if not -math.pi <= self.lo <= self.hi <= math.pi:
            raise ValueError(f'band [{self.lo}, {self.hi}] must lie inside [-pi, pi]')

    def __call__(self, omega):
        return self.level if self.lo <= omega <= self.hi else 0.0


@dataclass(frozen=True)
class PrimaryUser:
    """A licensed user occupying a band next to (or inside) the SU band.

    Attributes:
        band_center (float): Center of the PU band in Hz.
        band_width (float): PU bandwidth B_p in Hz.
        tx_power (float): PU transmit power p_pu in watts, used as the PSD amplitude.
        interference_cap (float): Largest aggregate SU interference I_th the PU tolerates, in watts.
        psd_shape (PsdShape): Shape of the PU PSD. Only flat is supported.
    """
    band_center: float
    band_width: float
    tx_power: float
    interference_cap: float
    psd_shape: PsdShape = PsdShape.FLAT

    def __post_init__(self):
        if not self.band_width > 0:
            raise ValueError(f'PU band_width must be positive, got `{self.band_width}`')
        if not self.tx_power >= 0:
            raise ValueError(f'PU tx_power must be nonnegative, got `{self.tx_power}`')
        if not self.interference_cap > 0:
            raise ValueError(f'PU interference_cap must be positive, got `{self.interference_cap}`')

    def to_digital(self, grid):
        """Express the PU PSD on the grid's digital-frequency axis, clipped to [-pi, pi].

        Args:
            grid (OfdmGrid): Subcarrier layout defining the axis.

        Returns:
            DigitalSpectrum: Flat spectrum of amplitude tx_power over the PU band.
        """
        lo = grid.digital_frequency(self.band_center - self.band_width / 2)
        hi = grid.digital_frequency(self.band_center + self.band_width / 2)
        lo = min(max(lo, -math.pi), math.pi)
        hi = min(max(hi, -math.pi), math.pi)
        return DigitalSpectrum(level=self.tx_power, lo=lo, hi=hi)


def standard_layout(grid, pu_count, tx_power, interference_cap):
    """PU l occupies a band of width B_s centered on subcarrier l.

    Args:
        grid (OfdmGrid): Subcarrier layout.
        pu_count (int): Number of PUs (L), at most K.
        tx_power (float): Power of every PU in watts.
        interference_cap (float): Interference cap of every PU in watts.

    Raises:
        ValueError: If pu_count is negative or exceeds the number of subcarriers.

    Returns:
        tuple[PrimaryUser]: The PUs.
    """
    if not 0 <= pu_count <= grid.k_count:
        raise ValueError(f'pu_count must lie in 0..{grid.k_count}, got `{pu_count}`')
    return tuple(PrimaryUser(band_center=grid.center_freq[l],
                             band_width=grid.subcarrier_bw,
                             tx_power=tx_power,
                             interference_cap=interference_cap)
                 for l in range(pu_count))
