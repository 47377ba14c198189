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

import argparse
import logging
import math
import os
import sys
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), '..'))
import textwrap
from dataclasses import replace

from algorithm.capacity import su_rates, subcarrier_rates
from cli.config import ExperimentSpec, dbw_to_watts, dump_config, load_config, resolve_output, \
    with_overrides
from cli.experiment import SOLVER_ERRORS, Allocation, run_experiment, run_solver
from cli.writers import manifest, sibling_path, write_snapshot, write_sweep, write_tables, write_trace
from model.channels import sample_channels
from spectral.interference import build_tables

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    """Bad command line; reported with exit code 1."""


class _Parser(argparse.ArgumentParser):

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


class CLI():
    """Parse the command line of the power-allocation tool.

    Attributes:
        command (str): Subcommand (`solve`, `sweep`, `oracle`, `trace` or `dump-config`).
        spec (ExperimentSpec): Experiment resolved from --config plus --seed and --out.
        seed (int): Seed of single-run commands.
        method (str): Solver of the `solve` command.
        p_max_dbw (float): Optional power budget override in dBW.
        jobs (int): Worker processes for `sweep`.
        out (str): Output path given with --out, if any.
    """

    def __init__(self, argv=None):
        parser_description = textwrap.dedent('''\
                             Downlink power allocation for OFDM cognitive radio
                             ---------------------------------------------------
                             Simulated annealing, dual water-filling and a brute-force oracle
                             under a total power budget and per-PU interference caps.''')
        parser = _Parser(description=parser_description, formatter_class=argparse.RawTextHelpFormatter)
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("-c", "--config", dest="config", help="YAML experiment file (defaults: fig3 sweep)")
        common.add_argument("-s", "--seed", dest="seed", type=int, help="Master seed of a sweep or seed of a single run")
        common.add_argument("-o", "--out", dest="out", help="Output file")
        verbosity = common.add_mutually_exclusive_group()
        verbosity.add_argument("-v", "--verbose", dest="verbose", action="store_true", help="Log per-iteration detail")
        verbosity.add_argument("-q", "--quiet", dest="quiet", action="store_true", help="Log warnings and errors only")

        commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
        solve = commands.add_parser("solve", parents=[common], help="Solve one scenario and print the allocation")
        solve.add_argument("-m", "--method", dest="method", choices=("sa", "dual", "brute"), default="dual",
                           help="Solver to run")
        solve.add_argument("-p", "--p-max-dbw", dest="p_max_dbw", type=float, help="Override p_max (dBW)")
        sweep = commands.add_parser("sweep", parents=[common], help="Run the experiment described by --config")
        sweep.add_argument("-j", "--jobs", dest="jobs", type=int, default=1, help="Worker processes")
        oracle = commands.add_parser("oracle", parents=[common], help="Brute-force search for K <= 6")
        oracle.add_argument("-p", "--p-max-dbw", dest="p_max_dbw", type=float, help="Override p_max (dBW)")
        trace = commands.add_parser("trace", parents=[common], help="Write the annealing trace of one run")
        trace.add_argument("-p", "--p-max-dbw", dest="p_max_dbw", type=float, help="Override p_max (dBW)")
        commands.add_parser("dump-config", parents=[common], help="Print the fully resolved configuration")
        args = parser.parse_args(argv)

        self.command = args.command
        self.verbose = args.verbose
        self.quiet = args.quiet
        self.seed = args.seed if args.seed is not None else 0
        self.method = getattr(args, 'method', 'brute' if self.command == 'oracle' else 'sa')
        self.p_max_dbw = getattr(args, 'p_max_dbw', None)
        self.jobs = getattr(args, 'jobs', 1)
        if self.jobs < 1:
            raise UsageError(f'--jobs must be at least 1, got {self.jobs}')
        self.out = resolve_output(args.out) if args.out else None

        spec = load_config(args.config) if args.config else ExperimentSpec()
        master_seed = args.seed if self.command == 'sweep' else None
        self.spec = with_overrides(spec, master_seed=master_seed)
        if self.p_max_dbw is not None:
            self.spec = replace(self.spec, scenario=replace(self.spec.scenario, p_max=dbw_to_watts(self.p_max_dbw)))

    def configure_logging(self):
        if self.verbose:
            logging.getLogger().setLevel(logging.DEBUG)
        elif self.quiet:
            logging.getLogger().setLevel(logging.WARNING)


def _single_run(cli):
    scenario = cli.spec.scenario.build()
    channels = sample_channels(scenario, cli.seed)
    tables = build_tables(scenario, channels)
    result = run_solver(cli.method, scenario, channels, tables, cli.spec, cli.seed)
    return scenario, channels, tables, result


def solve(cli):
    """Solve one scenario and print capacity, feasibility and the allocation."""
    scenario, channels, tables, result = _single_run(cli)
    rates = subcarrier_rates(result.powers, scenario, channels, tables)
    print(f'method: {result.method}')
    print(f'capacity: {result.capacity:.9g} bits/s/Hz ({result.capacity * scenario.grid.subcarrier_bw:.6g} bits/s)')
    print(f'feasible: {result.feasibility.feasible}')
    print(f'total power: {result.feasibility.total_power:.9g} W of {scenario.p_max:.9g} W')
    for l, interference in enumerate(result.feasibility.per_pu_interference):
        print(f'PU {l + 1} interference: {interference:.9g} W of {scenario.pus[l].interference_cap:.9g} W')
    for m, rate in enumerate(su_rates(result.powers, scenario, channels, tables)):
        print(f'SU {m + 1} rate: {rate:.9g} bits/s/Hz')
    for k, (power, rate) in enumerate(zip(result.powers, rates)):
        print(f'subcarrier {k + 1}: {float(power):.9g} W, {rate:.9g} bits/s/Hz')
    print(f'evals: {result.evals}')

    if cli.out:
        header = manifest(cli.spec, (cli.seed,))
        kept = Allocation(value=10.0 * math.log10(scenario.p_max), trial=0,
                          seed=cli.seed, method=result.method, result=result, rates=tuple(float(r) for r in rates))
        write_snapshot([kept], cli.out, header)
        write_tables(tables, sibling_path(cli.out, 'tables'), header)
    return EXIT_OK


def sweep(cli):
    """Run the configured experiment and write its CSV files."""
    result = run_experiment(cli.spec, jobs=cli.jobs)
    for path in write_sweep(result, cli.out or resolve_output(cli.spec.output)):
        print(path)
    if result.all_failed:
        logger.error('Every solver run failed')
        return EXIT_RUNTIME
    return EXIT_OK


def trace(cli):
    """Run one annealing pass and write its iteration trace."""
    scenario, _, _, result = _single_run(cli)
    path = cli.out or resolve_output(sibling_path(cli.spec.output, 'trace'))
    write_trace(result.trace, path, manifest(cli.spec, (cli.seed,)))
    print(f'capacity: {result.capacity:.9g} bits/s/Hz after {len(result.trace)} iterations')
    print(path)
    return EXIT_OK


def dump(cli):
    text = dump_config(cli.spec)
    if cli.out:
        with open(cli.out, 'w') as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {'solve': solve, 'sweep': sweep, 'oracle': solve, 'trace': trace, 'dump-config': dump}


def main(argv=None):
    """Run the command line and return the process exit code.
    """
    try:
        cli = CLI(argv)
    except (UsageError, ValueError) as exc:
        logger.error(str(exc))
        return EXIT_USAGE
    cli.configure_logging()
    if cli.command == 'oracle' and cli.spec.scenario.k_count > 6:
        logger.error(f'oracle supports at most 6 subcarriers, the scenario has {cli.spec.scenario.k_count}')
        return EXIT_USAGE

    try:
        return _COMMANDS[cli.command](cli)
    except SOLVER_ERRORS as exc:
        logger.error(f'{cli.command} failed: {exc}')
        return EXIT_RUNTIME
    except OSError as exc:
        logger.error(f'cannot write output: {exc}')
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
