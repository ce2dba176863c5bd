"""Command-line experiment runner.

Every subcommand writes CSV preceded by ``#`` metadata lines (schema version,
package version, config hash, seed). Exit codes: 0 success, 2 invalid
configuration, 3 numerical failure.
"""

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .analytic import sir_cdf, rate_cdf
from .config import DEFAULT_SEED, GridSpec, SystemConfig
from .exceptions import InvalidParameter, QuadratureNotConverged, TailMassTooLarge
from .load import cell_load_pmf, tagged_cell_extra_load_pmf
from .optimize import outage_frontier
from .schemes import (Scheme, access_profile, degenerate_profile, interferer_mtilde_pmf,
                      subchannel_activity_probability)
from .simulate import run_campaign, simulate_records, wilson_interval

SCHEMA_VERSION = 1

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(Exception):
    pass


class NumericalFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="smallcell", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help=f"base seed (default {DEFAULT_SEED})")
    common.add_argument("--jobs", type=int, default=1, help="parallel MC workers")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--dump-config", action="store_true",
                        help="print the effective config as JSON and exit")
    common.add_argument("--with-mc", action="store_true",
                        help="add Monte Carlo columns where supported")
    common.add_argument("--ratio", type=float, help="UE to AP density ratio")
    common.add_argument("--alpha", type=float, help="path-loss exponent (> 2)")
    common.add_argument("--theta0-db", type=float, help="SIR threshold in dB")
    common.add_argument("-n", "--n", type=int, help="number of subchannels")
    common.add_argument("--m-max", type=int, help="transmit antennas per AP")
    common.add_argument("--scheme", help="scheme1 or scheme2")
    common.add_argument("--sdma-rule", choices=["min", "group"])
    common.add_argument("--k-max", type=int, help="load pmf truncation")
    common.add_argument("--full-buffer", action="store_true", default=None,
                        help="every AP serves m_max UEs on every subchannel")
    common.add_argument("--samples", type=int, dest="mc_samples", help="MC realizations")
    common.add_argument("--radius", type=float, help="simulation disk radius")
    common.add_argument("--n-max", type=int, help="largest N tried by optimize")
    common.add_argument("--theta-grid", nargs=3, type=float, metavar=("MIN_DB", "MAX_DB", "POINTS"))
    common.add_argument("--rate-grid", nargs=3, type=float, metavar=("MIN", "MAX", "POINTS"))
    common.add_argument("--r0", type=float, action="append",
                        help="target rate for optimize (repeatable)")

    sub.add_parser("sir-cdf", parents=[common], help="analytic SIR cdf over a dB grid")
    sub.add_parser("rate-cdf", parents=[common], help="analytic (and MC) user-rate cdf")
    sub.add_parser("simulate", parents=[common], help="raw Monte Carlo samples")
    sub.add_parser("optimize", parents=[common], help="rate-outage-optimal subchannel count")
    sub.add_parser("activity", parents=[common], help="subchannel activity and M~ pmf")
    return parser


_OVERRIDES = ("ratio", "alpha", "theta0_db", "n", "m_max", "scheme", "sdma_rule", "k_max",
              "full_buffer", "mc_samples", "radius", "n_max")


def resolve_config(args):
    try:
        config = SystemConfig.load(args.config) if args.config else SystemConfig()
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    changes = {k: getattr(args, k) for k in _OVERRIDES if getattr(args, k) is not None}
    if args.seed is not None:
        changes["base_seed"] = args.seed
    if args.theta_grid:
        lo, hi, pts = args.theta_grid
        changes["sir_grid_db"] = GridSpec(lo, hi, int(pts))
    if args.rate_grid:
        lo, hi, pts = args.rate_grid
        changes["rate_grid_spec"] = GridSpec(lo, hi, int(pts))
    config = config.replace(**changes)
    if "scheme" in changes:
        config.scheme = Scheme.parse(config.scheme).value
    config.validate()
    return config


def _profile(config):
    if config.full_buffer:
        return degenerate_profile(config.m_max, config.m_max)
    load = cell_load_pmf(config.ratio, k_max=config.k_max)
    extra = tagged_cell_extra_load_pmf(config.ratio, k_max=config.k_max)
    return access_profile(config.scheme, load, extra, config.n, config.m_max,
                          sdma_rule=config.sdma_rule)


def cmd_sir_cdf(config, args):
    profile = _profile(config)
    m_pmf = profile.m_pmf()
    rows = []
    for db, lin in zip(config.sir_grid_db.values(), config.sir_grid_linear()):
        try:
            value = sir_cdf(lin, m_pmf, profile.mtilde, config.alpha)
        except QuadratureNotConverged as exc:
            raise NumericalFailure(f"SIR cdf failed at theta = {db} dB: {exc}") from exc
        rows.append((db, lin, value))
    return ["theta_db", "theta_linear", "f_sir_analytic"], rows


def cmd_rate_cdf(config, args):
    profile = _profile(config)
    grid = config.rate_grid()
    try:
        analytic = np.atleast_1d(rate_cdf(grid, profile.joint, config.n, config.params,
                                          profile.mtilde))
    except QuadratureNotConverged as exc:
        raise NumericalFailure(f"rate cdf failed: {exc}") from exc
    if not args.with_mc:
        return ["r", "f_r_analytic"], list(zip(grid, analytic))
    result = run_campaign(config, jobs=args.jobs)
    trials = len(result.records)
    low, high = wilson_interval(result.rate_curve.values * trials, trials)
    header = ["r", "f_r_analytic", "f_r_empirical", "ci_low", "ci_high"]
    return header, list(zip(grid, analytic, result.rate_curve.values, low, high))


def cmd_simulate(config, args):
    records = simulate_records(config.mc_samples, config.base_seed, config.scheme, config.n,
                               config.m_max, config.ratio, config.params, config.window,
                               config.sdma_rule, config.full_buffer, args.jobs)
    rows = [(int(r["seed"]), float(r["sir"]), int(r["k0"]), int(r["m"]), float(r["rate"]))
            for r in records]
    return ["seed", "sir", "k0", "m", "rate"], rows


def cmd_optimize(config, args):
    r_grid = np.array(sorted(args.r0)) if args.r0 else config.r0_grid.values()
    try:
        results = outage_frontier(r_grid, config.m_max, config.scheme, config.n_max,
                                  config.ratio, config.params, config.sdma_rule)
    except QuadratureNotConverged as exc:
        raise NumericalFailure(f"optimisation failed: {exc}") from exc
    rows = [(res.r0, res.n_star, res.outage, res.outage_at(1)) for res in results]
    return ["r0", "n_star", "outage", "outage_at_n1"], rows


def cmd_activity(config, args):
    load = cell_load_pmf(config.ratio, k_max=config.k_max)
    closed = subchannel_activity_probability(config.scheme, load, config.n, config.m_max)
    pmf = interferer_mtilde_pmf(config.scheme, load, config.n, config.m_max,
                                sdma_rule=config.sdma_rule)
    header = ["n", "m_max", "activity_closed_form"] + [f"mtilde_{j}" for j in range(pmf.size)]
    row = [config.n, config.m_max, closed] + list(pmf)
    if args.with_mc:
        mc = interferer_mtilde_pmf(config.scheme, load, config.n, config.m_max,
                                   method="monte-carlo", samples=config.mc_samples,
                                   seed=config.base_seed, sdma_rule=config.sdma_rule)
        header.append("activity_mc")
        row.append(1.0 - mc[0])
    return header, [tuple(row)]


COMMANDS = {
    "sir-cdf": cmd_sir_cdf,
    "rate-cdf": cmd_rate_cdf,
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "activity": cmd_activity,
}


def _format(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(stream, command, config, header, rows):
    stream.write(f"# smallcell-csv schema={SCHEMA_VERSION} version={__version__}\n")
    stream.write(f"# command={command} config_hash={config.digest()} seed={config.base_seed}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format(v) for v in row])


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        config = resolve_config(args)
    except (ConfigError, InvalidParameter, TailMassTooLarge) as exc:
        print(f"smallcell: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.dump_config:
        text = config.dumps() + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK

    try:
        header, rows = COMMANDS[args.command](config, args)
    except (InvalidParameter, TailMassTooLarge) as exc:
        print(f"smallcell: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, QuadratureNotConverged, FloatingPointError) as exc:
        print(f"smallcell: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_table(fh, args.command, config, header, rows)
    else:
        write_table(sys.stdout, args.command, config, header, rows)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
