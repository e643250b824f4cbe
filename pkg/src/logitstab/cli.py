"""Command-line front end.

Subcommands: analyze, verify, simulate, instance, report. Games come from
a builtin name (triangle, lb-unit, lb-pos, parallel, lb-custom) or a JSON
file. Exit codes: 0 ok, 2 parse/schema/params, 3 state-space cap,
4 internal inconsistency, 5 verify disagreement.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from .dynamics import (
    DEFAULT_BETA_LADDER,
    DEFAULT_SLOPE_TOL,
    DynamicsConfig,
    numeric_stable_estimate,
    parse_revision,
    simulate,
    stationary_distribution,
    transition_matrix,
)
from .errors import (
    InternalInconsistency,
    InvalidParams,
    LogitstabError,
    ParseError,
    SchemaError,
    StateSpaceTooLarge,
)
from .games import GameTable
from .metrics import classify_states, metric_report, write_states_csv
from .stability import stochastic_potentials
from .zoo import (
    format_rational,
    game_to_json,
    load_game_from_file,
    make_lb_pos_instance,
    make_lb_unit_instance,
    make_load_balancing,
    make_parallel_links,
    make_triangle,
    parse_rational,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_INCONSISTENT = 4
EXIT_DISAGREE = 5

BUILTINS = ("triangle", "lb-unit", "lb-pos", "parallel", "lb-custom")


def _add_game_source(parser):
    parser.add_argument("--builtin", choices=BUILTINS, help="builtin instance name")
    parser.add_argument("--file", help="path to a JSON game file")
    parser.add_argument("--m", type=int, help="machines (lb-unit/lb-pos)")
    parser.add_argument("--l", type=int, help="size parameter l (lb-unit/lb-pos)")
    parser.add_argument("--costs", help="comma-separated link costs (parallel)")
    parser.add_argument("--players", type=int, help="player count (parallel)")
    parser.add_argument("--jobs", help="comma-separated job weights (lb-custom)")
    parser.add_argument("--machines", type=int, help="machine count (lb-custom)")


def _add_revision(parser):
    parser.add_argument("--revision", default="independent", help="independent | async")
    parser.add_argument("--p", default="1/2", help="revising probability for independent learning")


def build_instance(name: str, args) -> object:
    if name == "triangle":
        return make_triangle()
    if name == "lb-unit":
        _require(args, "m", "l")
        return make_lb_unit_instance(args.m, args.l)
    if name == "lb-pos":
        _require(args, "m", "l")
        return make_lb_pos_instance(args.m, args.l)
    if name == "parallel":
        _require(args, "costs", "players")
        costs = [parse_rational(c) for c in args.costs.split(",")]
        return make_parallel_links(costs, args.players)
    if name == "lb-custom":
        _require(args, "jobs", "machines")
        jobs = [parse_rational(j) for j in args.jobs.split(",")]
        return make_load_balancing(args.machines, jobs)
    raise InvalidParams(f"unknown builtin {name!r}")


def _require(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise InvalidParams(f"--{n} is required for this builtin")


def load_game(args):
    if (args.builtin is None) == (args.file is None):
        raise InvalidParams("exactly one of --builtin or --file is required")
    if args.file:
        return load_game_from_file(args.file)
    return build_instance(args.builtin, args)


def _emit(data: dict, out_path):
    text = json.dumps(data, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_analyze(args) -> int:
    game = load_game(args)
    table = GameTable(game)
    report = metric_report(game, table, p=Fraction(args.p))
    _emit(report.to_json_dict(), args.out)
    if args.csv:
        write_states_csv(classify_states(game, table, p=Fraction(args.p)), args.csv)
    return EXIT_OK


def cmd_verify(args) -> int:
    game = load_game(args)
    table = GameTable(game)
    revision = parse_revision(args.revision, Fraction(args.p))
    ladder = [float(b) for b in args.beta_ladder.split(",")]
    exact = stochastic_potentials(game, revision, table).argmin
    estimate = numeric_stable_estimate(game, revision, ladder, args.slope_tol, table)
    agree = estimate.persisting == exact
    payload = {
        "agree": agree,
        "stable_exact": sorted(exact),
        "persisting_numeric": sorted(estimate.persisting),
        "slopes": {str(s): float(estimate.slopes[s]) for s in range(game.n_states)},
        "beta_ladder": ladder,
    }
    _emit(payload, args.out)
    return EXIT_OK if agree else EXIT_DISAGREE


def cmd_simulate(args) -> int:
    game = load_game(args)
    table = GameTable(game)
    revision = parse_revision(args.revision, Fraction(args.p))
    config = DynamicsConfig(args.beta, revision)
    result = simulate(game, config, args.steps, args.seed, table=table)
    rows = [
        (sid, int(count), count / args.steps)
        for sid, count in enumerate(result.occupancy)
    ]
    out = args.out or "occupancy.csv"
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["state_id", "count", "frequency"])
        for sid, count, freq in rows:
            writer.writerow([sid, count, f"{freq:.10f}"])
    mu = stationary_distribution(transition_matrix(game, config, table))
    freqs = result.occupancy / result.occupancy.sum()
    tv = 0.5 * float(abs(freqs - mu.probabilities).sum())
    print(json.dumps({"steps": args.steps, "seed": args.seed, "tv_distance": tv, "csv": out}))
    return EXIT_OK


def cmd_instance(args) -> int:
    game = build_instance(args.name, args)
    _emit(game_to_json(game), args.out)
    return EXIT_OK


def cmd_report(args) -> int:
    # analyze plus the per-state classification CSV in one pass
    if not args.csv:
        args.csv = "states.csv"
    return cmd_analyze(args)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="logitstab")
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="exact stability analysis and metric report")
    _add_game_source(p_an)
    _add_revision(p_an)
    p_an.add_argument("--out", help="report JSON path (default: stdout)")
    p_an.add_argument("--csv", help="per-state classification CSV path")
    p_an.set_defaults(func=cmd_analyze)

    p_ve = sub.add_parser("verify", help="numeric cross-check of the zero-noise stable set")
    _add_game_source(p_ve)
    _add_revision(p_ve)
    p_ve.add_argument(
        "--beta-ladder", default=",".join(str(b) for b in DEFAULT_BETA_LADDER)
    )
    p_ve.add_argument("--slope-tol", type=float, default=DEFAULT_SLOPE_TOL)
    p_ve.add_argument("--out", help="verdict JSON path (default: stdout)")
    p_ve.set_defaults(func=cmd_verify)

    p_si = sub.add_parser("simulate", help="seeded trajectory of the finite-noise chain")
    _add_game_source(p_si)
    _add_revision(p_si)
    p_si.add_argument("--beta", type=float, default=1.0)
    p_si.add_argument("--steps", type=int, default=10**5)
    p_si.add_argument("--seed", type=int, default=0)
    p_si.add_argument("--out", help="occupancy CSV path (default: occupancy.csv)")
    p_si.set_defaults(func=cmd_simulate)

    p_in = sub.add_parser("instance", help="emit a builtin instance as JSON")
    p_in.add_argument("name", choices=BUILTINS)
    p_in.add_argument("--m", type=int)
    p_in.add_argument("--l", type=int)
    p_in.add_argument("--costs")
    p_in.add_argument("--players", type=int)
    p_in.add_argument("--jobs")
    p_in.add_argument("--machines", type=int)
    p_in.add_argument("--out")
    p_in.set_defaults(func=cmd_instance)

    p_re = sub.add_parser("report", help="analyze plus per-state CSV")
    _add_game_source(p_re)
    _add_revision(p_re)
    p_re.add_argument("--out", help="report JSON path (default: stdout)")
    p_re.add_argument("--csv", help="per-state CSV path (default: states.csv)")
    p_re.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except StateSpaceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InternalInconsistency as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (ParseError, SchemaError, InvalidParams, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except LogitstabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
