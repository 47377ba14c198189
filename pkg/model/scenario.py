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
from dataclasses import dataclass, field, replace

import numpy as np


def round_robin_assignment(k_count, su_count):
    """Deal K subcarriers over M SUs in turn: subcarrier k belongs to SU k mod M."""
    return tuple(k % su_count for k in range(k_count))


@dataclass(frozen=True)
class Scenario:
    """Everything about a downlink CR cell except the random channel gains.

    Attributes:
        grid (OfdmGrid): Subcarrier layout.
        pus (tuple[PrimaryUser]): Primary users (L of them, possibly none).
        su_count (int): Number of SUs (M).
        noise_var (float): Noise variance sigma^2 in watts.
        p_max (float): Total SU power budget in watts.
        su_assignment (tuple[int]): Owning SU of each subcarrier. Defaults to round robin.

    Methods:
        pu_count: Number of PUs.
        with_p_max(p_max): Copy of the scenario with another power budget.
        foreign_pairs(): Mask of subcarrier pairs owned by different SUs.
    """
    grid: object
    pus: tuple
    su_count: int
    noise_var: float
    p_max: float
    su_assignment: tuple = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, 'pus', tuple(self.pus))
        if not isinstance(self.su_count, int) or self.su_count < 1:
            raise ValueError(f'su_count must be a positive integer, got `{self.su_count}`')
        if not (math.isfinite(self.noise_var) and self.noise_var > 0):
            raise ValueError(f'noise_var must be positive, got `{self.noise_var}`')
        if not (math.isfinite(self.p_max) and self.p_max > 0):
            raise ValueError(f'p_max must be positive, got `{self.p_max}`')

        if self.su_assignment is None:
            assignment = round_robin_assignment(self.grid.k_count, self.su_count)
        else:
            assignment = tuple(int(m) for m in self.su_assignment)
        if len(assignment) != self.grid.k_count:
            raise ValueError(f'su_assignment covers {len(assignment)} subcarriers, expected {self.grid.k_count}')
        if any(not 0 <= m < self.su_count for m in assignment):
            raise ValueError(f'su_assignment refers to SUs outside 0..{self.su_count - 1}')
        object.__setattr__(self, 'su_assignment', assignment)

    @property
    def pu_count(self):
        return len(self.pus)

    @property
    def k_count(self):
        return self.grid.k_count

    def with_p_max(self, p_max):
        return replace(self, p_max=p_max)

    def foreign_pairs(self):
        """Boolean (K, K) mask, True where subcarriers i and k belong to different SUs.

        Subcarriers of one SU share an FFT and stay orthogonal, so only foreign pairs leak.
        """
        owners = np.asarray(self.su_assignment)
        return owners[:, None] != owners[None, :]
