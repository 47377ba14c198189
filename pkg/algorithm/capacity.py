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

import numpy as np

from datastructures.allocation_result import FeasibilityReport
from datastructures.power_vector import as_array

# Relative slack every solver is held to when it reports feasibility
FEASIBILITY_TOL = 1e-9

LN2 = math.log(2.0)


class CapacityModel:
    """Objective and constraints of one scenario, flattened into numpy arrays.

    Attributes:
        k_count (int): Number of subcarriers.
        p_max (float): Power budget in watts.
        caps (np.ndarray): Interference cap of each PU in watts, shape (L,).
        gain (np.ndarray): Direct SU gains |h_k^ss|^2, shape (K,).
        floor (np.ndarray): Noise plus PU interference on each subcarrier, shape (K,).
        sp_coupling (np.ndarray): PU interference per watt, shape (L, K).
        ss_coupling (np.ndarray): SU leakage per watt from subcarrier i onto k, shape (K, K).

    Methods:
        su_interference(p): SU-to-SU interference on every subcarrier.
        rates(p): Rate of every subcarrier.
        capacity(p): Total capacity.
        capacity_batch(powers): Total capacity of each row of a (B, K) array.
        pu_interference(p): Aggregate SU interference at every PU.
        feasibility(p, tol): Constraint report.
        feasible_batch(powers, tol): Feasibility of each row of a (B, K) array.
        headroom_batch(powers): Largest feasible scale factor of each row.
    """

    def __init__(self, scenario, channels, tables):
        self.k_count = scenario.k_count
        self.p_max = scenario.p_max
        self.noise_var = scenario.noise_var
        self.caps = np.array([pu.interference_cap for pu in scenario.pus], dtype=float)
        self.gain = channels.gain_ss_direct
        self.pu_interference_at = tables.pu_interference_at()
        self.floor = self.noise_var + self.pu_interference_at
        self.sp_coupling = tables.sp_coupling(channels)
        self.ss_coupling = tables.ss_coupling(channels)

    def su_interference(self, p):
        return as_array(p) @ self.ss_coupling

    def rates(self, p):
        powers = as_array(p)
        sinr = self.gain * powers / (self.floor + powers @ self.ss_coupling)
        return np.log1p(sinr) / LN2

    def capacity(self, p):
        return float(np.sum(self.rates(p)))

    def capacity_batch(self, powers):
        sinr = self.gain * powers / (self.floor + powers @ self.ss_coupling)
        return np.sum(np.log1p(sinr), axis=1) / LN2

    def pu_interference(self, p):
        return self.sp_coupling @ as_array(p)

    def feasibility(self, p, tol=0.0):
        powers = as_array(p)
        total = float(np.sum(powers))
        interference = self.pu_interference(powers)
        return FeasibilityReport(total_power=total,
                                 power_ok=bool(total <= self.p_max * (1.0 + tol)),
                                 per_pu_interference=tuple(float(v) for v in interference),
                                 interference_ok=tuple(bool(v <= cap * (1.0 + tol))
                                                       for v, cap in zip(interference, self.caps)),
                                 nonneg_ok=bool(np.min(powers) >= 0) if powers.size else True)

    def feasible_batch(self, powers, tol=0.0):
        ok = np.sum(powers, axis=1) <= self.p_max * (1.0 + tol)
        if self.caps.size:
            ok &= np.all(powers @ self.sp_coupling.T <= self.caps * (1.0 + tol), axis=1)
        return ok & np.all(powers >= 0, axis=1)

    def headroom_batch(self, powers):
        """Largest factor s per row such that s * row meets the budget and every cap; inf for zero rows."""
        with np.errstate(divide='ignore', invalid='ignore'):
            total = np.sum(powers, axis=1)
            scale = np.where(total > 0, self.p_max / total, np.inf)
            if self.caps.size:
                interference = powers @ self.sp_coupling.T
                per_pu = np.where(interference > 0, self.caps / interference, np.inf)
                scale = np.minimum(scale, np.min(per_pu, axis=1))
        return scale


def subcarrier_rates(p, scenario, channels, tables):
    """Rate log2(1 + SINR_k) of every subcarrier in bits/s/Hz, shape (K,)."""
    return CapacityModel(scenario, channels, tables).rates(p)


def subcarrier_rate(p, k, scenario, channels, tables):
    """Rate of subcarrier k in bits/s/Hz.

    The SINR denominator holds the noise, the interference of every PU and the
    leakage from the subcarriers of other SUs.

    Args:
        p (PowerVector): Allocation.
        k (int): Subcarrier index (0-based).
        scenario (Scenario): Scenario.
        channels (ChannelSet): Channel gains.
        tables (InterferenceTables): Overlap factors.

    Raises:
        IndexError: If k is out of range.

    Returns:
        float: log2(1 + |h_k|^2 p_k / (sigma^2 + sum_l J_k^l + IN_k)).
    """
    if not 0 <= k < scenario.k_count:
        raise IndexError(f'subcarrier index {k} outside 0..{scenario.k_count - 1}')
    return float(subcarrier_rates(p, scenario, channels, tables)[k])


def total_capacity(p, scenario, channels, tables):
    """Total capacity C = sum_k rate_k in bits/s/Hz."""
    return CapacityModel(scenario, channels, tables).capacity(p)


def su_rates(p, scenario, channels, tables):
    """Capacity of each SU, summing the rates of the subcarriers it owns, shape (M,)."""
    rates = subcarrier_rates(p, scenario, channels, tables)
    return np.bincount(np.asarray(scenario.su_assignment), weights=rates, minlength=scenario.su_count)


def check_feasible(p, scenario, channels, tables, tol=0.0):
    """Check an allocation against the power budget, every PU cap and nonnegativity.

    Args:
        p (PowerVector): Allocation.
        scenario (Scenario): Scenario.
        channels (ChannelSet): Channel gains.
        tables (InterferenceTables): Overlap factors.
        tol (float): Relative slack on the budget and the caps. Defaults to 0 (exact comparison).

    Raises:
        ValueError: If tol is negative.

    Returns:
        FeasibilityReport: The report.
    """
    if tol < 0:
        raise ValueError(f'tol must be nonnegative, got `{tol}`')
    return CapacityModel(scenario, channels, tables).feasibility(p, tol)
