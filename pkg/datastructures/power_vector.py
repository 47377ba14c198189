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

import numpy as np


class PowerVector:
    """Per-subcarrier transmit powers p_1..p_K in watts.

    The underlying array is read-only, so a PowerVector can be shared between
    solvers and workers without copying.

    Attributes:
        p (np.ndarray): Power of each subcarrier, shape (K,).

    Methods:
        total: Sum of all powers.
        is_nonnegative(): Whether every entry is >= 0.
    """

    def __init__(self, p):
        """Wrap a sequence of powers.

        Args:
            p (array-like): Powers in watts.

        Raises:
            ValueError: If p is not one-dimensional or holds non-finite entries.
        """
        array = np.array(p, dtype=float)
        if array.ndim != 1:
            raise ValueError(f'power vector must be one-dimensional, got shape {array.shape}')
        if not np.all(np.isfinite(array)):
            raise ValueError('power vector holds non-finite entries')
        array.flags.writeable = False
        self.p = array

    @classmethod
    def zeros(cls, k_count):
        return cls(np.zeros(k_count))

    @classmethod
    def uniform(cls, k_count, total):
        return cls(np.full(k_count, total / k_count))

    @property
    def total(self):
        return float(np.sum(self.p))

    def is_nonnegative(self):
        return bool(np.all(self.p >= 0))

    def __len__(self):
        return self.p.shape[0]

    def __getitem__(self, k):
        return float(self.p[k])

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.p
        return self.p.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, PowerVector):
            return NotImplemented
        return np.array_equal(self.p, other.p)

    __hash__ = None

    def __repr__(self):
        return f'PowerVector({np.array2string(self.p, precision=6)})'


def as_array(p):
    """Return the powers of a PowerVector (or any array-like) as a float array."""
    if isinstance(p, PowerVector):
        return p.p
    return np.asarray(p, dtype=float)
