"""Trilevel solver for charging-station markets on congested road networks:
station placement over price competition over a multi-class user equilibrium.
"""

from .model import (
    DemandEntry,
    EconomicParams,
    InvalidScenario,
    LatencyFn,
    Link,
    Node,
    Provider,
    Scenario,
    Station,
    ev_generalized_cost,
    link_travel_time,
    scale_nonev_demand,
    scenario_errors,
    station_service_delay,
    validate_scenario,
    with_outside_cost,
)
from .assignment import (
    AugmentedNetwork,
    FlowState,
    GenPath,
    SolveOptions,
    build_augmented_network,
    background_state,
    freeze_background,
    relative_gap,
    shortest_generalized_path,
    solve_user_equilibrium,
    station_demand,
)
from .pricing import (
    NashReport,
    PricingOptions,
    PricingResult,
    best_response_price,
    price_grid,
    provider_profit,
    solve_price_equilibrium,
    verify_nash,
)
from .placement import (
    EvalRow,
    Placement,
    PlacementResult,
    enumerate_placements,
    evaluate_placement,
    solve_placement,
)
from .harness import (
    ComparisonReport,
    SweepSeries,
    comparison_deltas,
    congestion_summary,
    ev_mean_generalized_cost,
    metrics_report,
    run_endogeneity_comparison,
    sweep,
)
from .scenario_io import ScenarioParseError, parse_scenario, parse_scenario_text
from .report import format_number, parse_report, render_report, report_rows, write_report
from .scenarios import bundled_names, bundled_path, bundled_text, load_bundled

__all__ = [
    "ComparisonReport",
    "EvalRow",
    "NashReport",
    "Placement",
    "PlacementResult",
    "PricingOptions",
    "PricingResult",
    "ScenarioParseError",
    "SweepSeries",
    "best_response_price",
    "bundled_names",
    "bundled_path",
    "bundled_text",
    "comparison_deltas",
    "congestion_summary",
    "enumerate_placements",
    "ev_mean_generalized_cost",
    "evaluate_placement",
    "format_number",
    "load_bundled",
    "metrics_report",
    "parse_report",
    "parse_scenario",
    "parse_scenario_text",
    "price_grid",
    "provider_profit",
    "render_report",
    "report_rows",
    "run_endogeneity_comparison",
    "solve_placement",
    "solve_price_equilibrium",
    "sweep",
    "verify_nash",
    "write_report",
    "AugmentedNetwork",
    "DemandEntry",
    "EconomicParams",
    "FlowState",
    "GenPath",
    "InvalidScenario",
    "LatencyFn",
    "Link",
    "Node",
    "Provider",
    "Scenario",
    "SolveOptions",
    "Station",
    "background_state",
    "build_augmented_network",
    "ev_generalized_cost",
    "freeze_background",
    "link_travel_time",
    "relative_gap",
    "scale_nonev_demand",
    "scenario_errors",
    "shortest_generalized_path",
    "solve_user_equilibrium",
    "station_demand",
    "station_service_delay",
    "validate_scenario",
    "with_outside_cost",
]
