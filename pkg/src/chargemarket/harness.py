"""Comparison experiments and metrics.

The central experiment contrasts two worlds on the same scenario: one where
non-EV traffic re-routes with everything else (endogenous), and one where it
is frozen as a fixed preload before any EV or pricing decision is made
(exogenous). Divergence between the two optimal placements is the package's
demonstration that background traffic is not a harmless abstraction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .assignment import FlowState, SolveOptions
from .model import Scenario, link_travel_time, scale_nonev_demand, station_service_delay, \
    with_outside_cost
from .placement import PlacementResult, solve_placement
from .pricing import PricingOptions, PricingResult


@dataclass(frozen=True)
class ComparisonReport:
    scenario: Scenario
    endogenous: PlacementResult
    exogenous: PlacementResult
    profit_delta_abs: float      # endogenous - exogenous entrant profit
    profit_delta_rel: float      # relative to |endogenous profit|
    same_placement: bool
    price_max_diff: float        # over stations open in both solutions
    mean_ev_cost_delta: float    # endogenous - exogenous mean EV generalized cost
    congestion: dict             # mode -> {"vc_max": float, "vc_mean": float}


@dataclass(frozen=True)
class SweepSeries:
    parameter: str
    points: tuple   # ((value, ComparisonReport | PlacementResult), ...)


def _total_link_flows(scenario: Scenario, state: FlowState) -> dict:
    return {
        l.id: state.link_flow["ev"].get(l.id, 0.0) + state.link_flow["nonev"].get(l.id, 0.0)
        for l in scenario.links
    }


def congestion_summary(scenario: Scenario, state: FlowState) -> dict:
    """Max and mean volume/capacity over links with a capacity (bpr only)."""
    totals = _total_link_flows(scenario, state)
    ratios = [
        totals[l.id] / l.latency.capacity
        for l in scenario.links if l.latency.kind == "bpr"
    ]
    if not ratios:
        return {"vc_max": 0.0, "vc_mean": 0.0}
    return {"vc_max": max(ratios), "vc_mean": sum(ratios) / len(ratios)}


def ev_mean_generalized_cost(scenario: Scenario, state: FlowState, prices: dict) -> float:
    """Demand-weighted mean EV generalized cost: vot-weighted travel time and
    queueing plus charging payments, with opt-outs at the outside cost.
    """
    params = scenario.params
    stations = scenario.stations_by_id()
    totals = _total_link_flows(scenario, state)
    total = 0.0
    for l in scenario.links:
        flow_ev = state.link_flow["ev"].get(l.id, 0.0)
        if flow_ev > 0.0:
            total += params.vot * link_travel_time(l.latency, totals[l.id]) * flow_ev
    for sid, throughput in state.station_flow.items():
        if throughput > 0.0:
            delay = station_service_delay(stations[sid], throughput)
            total += (params.vot * delay + prices[sid] * params.energy) * throughput
    total += params.outside_cost * sum(state.opt_out.values())
    demand = sum(d.volume for d in scenario.demand if d.cls == "ev")
    return total / demand if demand > 0 else 0.0


def comparison_deltas(scenario: Scenario, endo: PlacementResult,
                      exo: PlacementResult) -> dict:
    """Deltas between the two embedded results; the report stores exactly these."""
    delta_abs = endo.profit - exo.profit
    delta_rel = delta_abs / abs(endo.profit) if endo.profit != 0.0 else 0.0
    common = set(endo.pricing.prices) & set(exo.pricing.prices)
    price_diff = max(
        (abs(endo.pricing.prices[sid] - exo.pricing.prices[sid]) for sid in common),
        default=0.0,
    )
    cost_delta = (
        ev_mean_generalized_cost(scenario, endo.pricing.flow, endo.pricing.prices)
        - ev_mean_generalized_cost(scenario, exo.pricing.flow, exo.pricing.prices)
    )
    return {
        "profit_delta_abs": delta_abs,
        "profit_delta_rel": delta_rel,
        "same_placement": endo.best.ids == exo.best.ids,
        "price_max_diff": price_diff,
        "mean_ev_cost_delta": cost_delta,
        "congestion": {
            "endogenous": congestion_summary(scenario, endo.pricing.flow),
            "exogenous": congestion_summary(scenario, exo.pricing.flow),
        },
    }


def run_endogeneity_comparison(scenario: Scenario, k: int,
                               pricing_options: PricingOptions | None = None,
                               solve_options: SolveOptions | None = None,
                               method: str = "exhaustive") -> ComparisonReport:
    """Solve the placement problem twice, once per congestion mode, with
    otherwise identical options, and report the differences.
    """
    base = solve_options or SolveOptions()
    endo = solve_placement(scenario, k, method, pricing_options,
                           replace(base, mode="endogenous"))
    exo = solve_placement(scenario, k, method, pricing_options,
                          replace(base, mode="exogenous"))
    deltas = comparison_deltas(scenario, endo, exo)
    return ComparisonReport(
        scenario=scenario, endogenous=endo, exogenous=exo,
        profit_delta_abs=deltas["profit_delta_abs"],
        profit_delta_rel=deltas["profit_delta_rel"],
        same_placement=deltas["same_placement"],
        price_max_diff=deltas["price_max_diff"],
        mean_ev_cost_delta=deltas["mean_ev_cost_delta"],
        congestion=deltas["congestion"],
    )


def metrics_report(scenario: Scenario, result) -> list:
    """Ordered (key, value) metric pairs for a FlowState, PricingResult, or
    PlacementResult. Flow metrics are recomputed from the embedded state.
    """
    rows: list = []
    prices: dict = {}
    state: FlowState
    if isinstance(result, PlacementResult):
        rows.append(("placement", " ".join(str(i) for i in result.best.ids)))
        rows.append(("entrant_profit", result.profit))
        pricing = result.pricing
        prices = pricing.prices
        state = pricing.flow
        for pid in sorted(pricing.profits):
            rows.append((f"profit[{pid}]", pricing.profits[pid]))
    elif isinstance(result, PricingResult):
        prices = result.prices
        state = result.flow
        entrant = scenario.entrant()
        rows.append(("entrant_profit", result.profits[entrant.id]))
        for pid in sorted(result.profits):
            rows.append((f"profit[{pid}]", result.profits[pid]))
    elif isinstance(result, FlowState):
        state = result
    else:
        raise TypeError(f"no metrics for {type(result).__name__}")

    for sid in sorted(prices):
        rows.append((f"price[{sid}]", prices[sid]))
    for sid in sorted(state.station_flow):
        rows.append((f"station_demand[{sid}]", state.station_flow[sid]))
    for od in sorted(state.opt_out):
        rows.append((f"opt_out[{od}]", state.opt_out[od]))

    totals = _total_link_flows(scenario, state)
    summary = congestion_summary(scenario, state)
    rows.append(("vc_max", summary["vc_max"]))
    rows.append(("vc_mean", summary["vc_mean"]))
    for cls in ("ev", "nonev"):
        cost = sum(
            scenario.params.vot * link_travel_time(l.latency, totals[l.id])
            * state.link_flow[cls].get(l.id, 0.0)
            for l in scenario.links
        )
        rows.append((f"travel_cost[{cls}]", cost))
    return rows


_SWEEP_PARAMETERS = ("nonev_scale", "outside_cost", "k")


def sweep(scenario: Scenario, parameter: str, values, k: int | None = None,
          pricing_options: PricingOptions | None = None,
          solve_options: SolveOptions | None = None,
          method: str = "exhaustive") -> SweepSeries:
    """One comparison (nonev_scale, outside_cost) or placement solve (k) per
    value; values must be strictly increasing.
    """
    if parameter not in _SWEEP_PARAMETERS:
        raise ValueError(f"unknown sweep parameter '{parameter}'")
    values = list(values)
    if not values:
        raise ValueError("no sweep values")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("sweep values must be strictly increasing")
    if parameter in ("nonev_scale", "outside_cost") and k is None:
        raise ValueError(f"sweep over {parameter} needs a placement budget k")

    points = []
    for v in values:
        if parameter == "nonev_scale":
            derived = scale_nonev_demand(scenario, v)
            points.append((v, run_endogeneity_comparison(
                derived, k, pricing_options, solve_options, method)))
        elif parameter == "outside_cost":
            derived = with_outside_cost(scenario, v)
            points.append((v, run_endogeneity_comparison(
                derived, k, pricing_options, solve_options, method)))
        else:
            points.append((v, solve_placement(
                scenario, int(v), method, pricing_options, solve_options)))
    return SweepSeries(parameter=parameter, points=tuple(points))
