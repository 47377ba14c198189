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
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), '..'))

import pytest

from model.grid import build_grid
from model.primary_user import standard_layout
from model.scenario import Scenario


@pytest.fixture
def desk_scenario():
    """Four-subcarrier noise-limited cell: one PU on subcarrier 0, two SUs."""
    grid = build_grid(1.6e6, 4, 4)
    pus = standard_layout(grid, 1, tx_power=1e-6, interference_cap=2e-6)
    return Scenario(grid=grid, pus=pus, su_count=2, noise_var=1e-6, p_max=1e-6)


@pytest.fixture
def read_csv():
    """Reader returning the rows of an exported CSV, manifest lines skipped, as dicts of strings."""
    def read(path):
        with open(path, 'r', encoding='utf-8', newline='') as f:
            return list(csv.DictReader(line for line in f if not line.startswith('#')))
    return read
