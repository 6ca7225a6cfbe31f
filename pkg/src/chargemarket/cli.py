"""Command-line surface.

Exit codes: 0 success with converged results, 2 bad input (parse, validation,
usage, missing file), 3 when any required solve reports converged=false.
"""

from __future__ import annotations

import argparse
import sys

from .assignment import SolveOptions, solve_user_equilibrium
from .harness import run_endogeneity_comparison, sweep
from .model import Scenario
from .placement import solve_placement
from .pricing import PricingOptions, solve_price_equilibrium
from .report import render_report, report_rows, write_report
from .scenario_io import ScenarioParseError, parse_scenario

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_NOT_CONVERGED = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chargemarket",
        description="Trilevel charging-market solver: placement / pricing / traffic.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("scenario", help="scenario file (.scn)")
        return p

    def solver_flags(p, mode=True):
        p.add_argument("--gap", type=float, default=None, help="relative gap tolerance")
        p.add_argument("--max-iter", type=int, default=None, help="Frank-Wolfe iteration cap")
        if mode:
            p.add_argument("--mode", choices=("endogenous", "exogenous"), default=None,
                           help="non-EV treatment")
        p.add_argument("--out", default=None, help="report file (default stdout)")

    add("validate", "parse and validate a scenario")

    p = add("solve-ue", "solve the Level 1 user equilibrium at midpoint prices")
    solver_flags(p)

    p = add("solve-pricing", "solve the Level 2 price equilibrium on open stations")
    solver_flags(p)

    p = add("solve-placement", "solve the Level 3 placement problem")
    p.add_argument("--k", type=int, required=True, help="number of sites to open")
    p.add_argument("--method", choices=("exhaustive", "greedy"), default="exhaustive")
    solver_flags(p)

    p = add("compare", "endogenous vs exogenous placement comparison")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=("exhaustive", "greedy"), default="exhaustive")
    solver_flags(p, mode=False)

    p = add("sweep", "re-run the comparison or placement over a parameter range")
    p.add_argument("--param", choices=("nonev_scale", "outside_cost", "k"), required=True)
    p.add_argument("--values", required=True, help="comma-separated, strictly increasing")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--method", choices=("exhaustive", "greedy"), default="exhaustive")
    solver_flags(p, mode=False)
    return parser


def _solve_options(args) -> SolveOptions:
    opts = SolveOptions()
    fields = {}
    if getattr(args, "gap", None) is not None:
        fields["gap_tol"] = args.gap
    if getattr(args, "max_iter", None) is not None:
        fields["max_iter"] = args.max_iter
    if getattr(args, "mode", None) is not None:
        fields["mode"] = args.mode
    from dataclasses import replace
    return replace(opts, **fields) if fields else opts


def _midpoint_prices(scenario: Scenario) -> dict:
    mid = 0.5 * (scenario.params.p_min + scenario.params.p_max)
    return {sid: mid for sid in scenario.open_station_ids()}


def _emit(result, scenario, out):
    rows = report_rows(result, scenario)
    if out:
        write_report(rows, out)
    else:
        sys.stdout.write(render_report(rows))


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code not in (0, None) else EXIT_OK

    try:
        scenario = parse_scenario(args.scenario)
    except ScenarioParseError as exc:
        for err in exc.errors:
            print(err, file=sys.stderr)
        return EXIT_BAD_INPUT

    if args.command == "validate":
        print(f"{args.scenario}: ok")
        return EXIT_OK

    try:
        if args.command == "solve-ue":
            options = _solve_options(args)
            state = solve_user_equilibrium(
                scenario, scenario.open_station_ids(), _midpoint_prices(scenario), options)
            _emit(state, scenario, args.out)
            return EXIT_OK if state.converged else EXIT_NOT_CONVERGED

        if args.command == "solve-pricing":
            options = _solve_options(args)
            result = solve_price_equilibrium(
                scenario, scenario.open_station_ids(), PricingOptions(), options)
            _emit(result, scenario, args.out)
            return EXIT_OK if result.converged else EXIT_NOT_CONVERGED

        if args.command == "solve-placement":
            options = _solve_options(args)
            result = solve_placement(scenario, args.k, args.method,
                                     PricingOptions(), options)
            _emit(result, scenario, args.out)
            ok = all(row.converged for row in result.table)
            return EXIT_OK if ok else EXIT_NOT_CONVERGED

        if args.command == "compare":
            options = _solve_options(args)
            report = run_endogeneity_comparison(scenario, args.k, PricingOptions(),
                                                options, args.method)
            _emit(report, scenario, args.out)
            ok = all(row.converged for side in (report.endogenous, report.exogenous)
                     for row in side.table)
            return EXIT_OK if ok else EXIT_NOT_CONVERGED

        if args.command == "sweep":
            try:
                values = [float(v) for v in args.values.split(",") if v.strip() != ""]
            except ValueError:
                print(f"--values: not numeric: '{args.values}'", file=sys.stderr)
                return EXIT_BAD_INPUT
            options = _solve_options(args)
            series = sweep(scenario, args.param, values, args.k, PricingOptions(),
                           options, args.method)
            _emit(series, scenario, args.out)
            ok = True
            for _, point in series.points:
                sides = ((point.endogenous, point.exogenous)
                         if hasattr(point, "endogenous") else (point,))
                ok = ok and all(row.converged for side in sides for row in side.table)
            return EXIT_OK if ok else EXIT_NOT_CONVERGED
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BAD_INPUT

    return EXIT_BAD_INPUT


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
