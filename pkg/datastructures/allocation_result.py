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

from dataclasses import dataclass, field


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of checking an allocation against the power, interference and sign constraints.

    Attributes:
        total_power (float): Sum of all subcarrier powers in watts.
        power_ok (bool): Total power within the budget p_max.
        per_pu_interference (tuple[float]): Aggregate SU interference at each PU in watts.
        interference_ok (tuple[bool]): Interference within I_th for each PU.
        nonneg_ok (bool): No negative power.
    """
    total_power: float
    power_ok: bool
    per_pu_interference: tuple
    interference_ok: tuple
    nonneg_ok: bool

    @property
    def feasible(self):
        return self.power_ok and self.nonneg_ok and all(self.interference_ok)


@dataclass(frozen=True)
class TraceRecord:
    """One annealing iteration.

    Attributes:
        t (int): Iteration index.
        temperature (float): Temperature during the iteration.
        energy (float): Energy (negated capacity) of the current solution after the iteration.
        capacity (float): Capacity of the current solution after the iteration.
        accepted (bool): Whether the candidate became the current solution.
        best_capacity (float): Best capacity seen so far.
    """
    t: int
    temperature: float
    energy: float
    capacity: float
    accepted: bool
    best_capacity: float


@dataclass(frozen=True, eq=False)
class AllocationResult:
    """Final allocation returned by every solver.

    Attributes:
        method (str): Solver that produced the result (`sa`, `dual` or `brute`).
        powers (PowerVector): Allocated powers.
        capacity (float): Total capacity in bits/s/Hz.
        feasibility (FeasibilityReport): Constraint report for `powers`.
        trace (tuple[TraceRecord]): Iteration trace; empty for non-iterative solvers.
        evals (int): Number of evaluations the solver spent.
        details (dict): Solver-specific extras such as multipliers or convergence flags.
    """
    method: str
    powers: object
    capacity: float
    feasibility: FeasibilityReport
    trace: tuple = ()
    evals: int = 0
    details: dict = field(default_factory=dict)
