"""Deterministic report emission.

A report is a sequence of token rows, one per line, fields separated by
single spaces. Numbers are rendered with 9 significant digits and trailing
zeros kept, booleans as 1/0, so identical results always serialize to
identical bytes. parse_report recovers the raw rows, which re-emit
byte-identically.
"""

from __future__ import annotations

from pathlib import Path

from .assignment import FlowState
from .harness import ComparisonReport, SweepSeries, metrics_report
from .model import Scenario
from .placement import PlacementResult
from .pricing import PricingResult


def format_number(x) -> str:
    """Fixed 9-significant-digit decimal rendering, locale independent."""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    v = float(x)
    if v == 0.0:
        v = 0.0  # normalize -0.0
    return format(v, "#.9g")


def _fmt(value) -> str:
    if isinstance(value, (bool, int, float)):
        return format_number(value)
    return str(value)


def _flow_rows(state: FlowState) -> list:
    rows = [
        ["converged", _fmt(state.converged)],
        ["iterations", _fmt(state.iterations)],
        ["gap", _fmt(state.gap)],
    ]
    for lid in sorted(state.link_flow["ev"]):
        rows.append(["link_flow", _fmt(lid), _fmt(state.link_flow["ev"][lid]),
                     _fmt(state.link_flow["nonev"][lid])])
    for sid in sorted(state.station_flow):
        rows.append(["station_flow", _fmt(sid), _fmt(state.station_flow[sid])])
    for od in sorted(state.opt_out):
        rows.append(["opt_out", _fmt(od), _fmt(state.opt_out[od])])
    return rows


def _metric_rows(scenario: Scenario, result) -> list:
    return [["metric", key, _fmt(value)] for key, value in metrics_report(scenario, result)]


def _pricing_rows(scenario: Scenario, result: PricingResult, with_flow=True) -> list:
    rows = [
        ["pricing_converged", _fmt(result.converged)],
        ["rounds", _fmt(result.rounds)],
        ["cycle_detected", _fmt(result.cycle_detected)],
    ]
    for sid in sorted(result.prices):
        rows.append(["price", _fmt(sid), _fmt(result.prices[sid])])
    for pid in sorted(result.profits):
        rows.append(["profit", _fmt(pid), _fmt(result.profits[pid])])
    if with_flow:
        rows.extend(_flow_rows(result.flow))
    return rows


def _placement_rows(scenario: Scenario, result: PlacementResult) -> list:
    rows = [
        ["method", result.method],
        ["best"] + [_fmt(i) for i in result.best.ids],
        ["entrant_profit", _fmt(result.profit)],
        ["all_failed", _fmt(result.all_failed)],
    ]
    for row in result.table:
        rows.append(["eval", _fmt(row.profit), _fmt(row.converged),
                     _fmt(row.cycle_detected)] + [_fmt(i) for i in row.placement.ids])
    rows.extend(_pricing_rows(scenario, result.pricing))
    rows.extend(_metric_rows(scenario, result))
    return rows


def _comparison_rows(report: ComparisonReport) -> list:
    scenario = report.scenario
    rows = [
        ["delta", "profit_abs", _fmt(report.profit_delta_abs)],
        ["delta", "profit_rel", _fmt(report.profit_delta_rel)],
        ["delta", "same_placement", _fmt(report.same_placement)],
        ["delta", "price_max_diff", _fmt(report.price_max_diff)],
        ["delta", "mean_ev_cost", _fmt(report.mean_ev_cost_delta)],
    ]
    for mode in ("endogenous", "exogenous"):
        for key in ("vc_max", "vc_mean"):
            rows.append(["congestion", mode, key, _fmt(report.congestion[mode][key])])
    for mode, result in (("endogenous", report.endogenous), ("exogenous", report.exogenous)):
        rows.append(["mode", mode])
        rows.extend(_placement_rows(scenario, result))
    return rows


def report_rows(result, scenario: Scenario | None = None) -> list:
    """Token rows for any solver result; scenario required except for
    ComparisonReport and SweepSeries, which embed it.
    """
    if isinstance(result, ComparisonReport):
        return [["report", "comparison"]] + _comparison_rows(result)
    if isinstance(result, SweepSeries):
        rows = [["report", "sweep"], ["parameter", result.parameter]]
        for value, point in result.points:
            rows.append(["point", _fmt(value)])
            if isinstance(point, ComparisonReport):
                rows.extend(_comparison_rows(point))
            else:
                if scenario is None:
                    raise ValueError("scenario required for placement sweep rows")
                rows.extend(_placement_rows(scenario, point))
        return rows
    if scenario is None:
        raise ValueError(f"scenario required for {type(result).__name__} rows")
    if isinstance(result, PlacementResult):
        return [["report", "placement"]] + _placement_rows(scenario, result)
    if isinstance(result, PricingResult):
        return ([["report", "pricing"]] + _pricing_rows(scenario, result)
                + _metric_rows(scenario, result))
    if isinstance(result, FlowState):
        return ([["report", "ue"]] + _flow_rows(result)
                + _metric_rows(scenario, result))
    raise TypeError(f"cannot report {type(result).__name__}")


def render_report(rows: list) -> str:
    return "".join(" ".join(str(t) for t in row) + "\n" for row in rows)


def write_report(result, path, scenario: Scenario | None = None) -> None:
    """Serialize a result (or pre-built token rows) to `path`; identical
    inputs always produce identical bytes.
    """
    rows = result if isinstance(result, list) else report_rows(result, scenario)
    data = render_report(rows).encode("utf-8")
    Path(path).write_bytes(data)


def parse_report(path) -> list:
    """Token rows of an emitted report; render_report(rows) reproduces the
    file byte for byte.
    """
    text = Path(path).read_text(encoding="utf-8")
    return [line.split() for line in text.splitlines() if line.strip()]
