"""Level 3 solver: the entrant's site selection, anticipating the pricing game
and the traffic equilibrium nested inside it.

Exhaustive search over all k-subsets of candidate sites is the reference
method; greedy forward selection is a labeled heuristic for larger instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .assignment import SolveOptions
from .model import Scenario
from .pricing import PricingOptions, PricingResult, solve_price_equilibrium


@dataclass(frozen=True)
class Placement:
    ids: tuple       # candidate station ids opened, sorted ascending
    k: int

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(sorted(self.ids)))
        if len(self.ids) != self.k:
            raise ValueError(f"placement has {len(self.ids)} sites, budget is {self.k}")
        if len(set(self.ids)) != self.k:
            raise ValueError("duplicate sites in placement")


@dataclass(frozen=True)
class EvalRow:
    placement: Placement
    profit: float
    converged: bool
    cycle_detected: bool


@dataclass(frozen=True)
class PlacementResult:
    best: Placement
    profit: float
    pricing: PricingResult
    table: tuple            # EvalRow per evaluated placement, evaluation order
    method: str             # "exhaustive" | "greedy"
    all_failed: bool        # no evaluation converged


def enumerate_placements(candidates, k: int):
    """All C(n, k) placements in lexicographic order of sorted id tuples."""
    ids = sorted(candidates)
    if not (1 <= k <= len(ids)):
        raise ValueError(f"k must be in 1..{len(ids)}, got {k}")
    return [Placement(combo, k) for combo in combinations(ids, k)]


def evaluate_placement(scenario: Scenario, placement: Placement,
                       pricing_options: PricingOptions | None = None,
                       solve_options: SolveOptions | None = None
                       ) -> tuple[float, PricingResult]:
    """Entrant's equilibrium profit (net of site costs) with the placement's
    candidates opened alongside every already-open station.
    """
    candidates = set(scenario.candidate_station_ids())
    unknown = [sid for sid in placement.ids if sid not in candidates]
    if unknown:
        raise ValueError(f"not entrant candidates: {unknown}")
    open_stations = tuple(sorted(set(scenario.open_station_ids()) | set(placement.ids)))
    result = solve_price_equilibrium(scenario, open_stations, pricing_options, solve_options)
    entrant = scenario.entrant()
    return result.profits[entrant.id], result


def solve_placement(scenario: Scenario, k: int, method: str = "exhaustive",
                    pricing_options: PricingOptions | None = None,
                    solve_options: SolveOptions | None = None) -> PlacementResult:
    """Pick the entrant's best k sites.

    exhaustive: argmax over every k-subset, ties to the lexicographically
    first placement. greedy: k rounds of largest marginal gain, ties to the
    smallest id; heuristic, can be suboptimal.
    """
    if method not in ("exhaustive", "greedy"):
        raise ValueError(f"unknown method '{method}'")
    candidates = scenario.candidate_station_ids()
    if k > len(candidates):
        raise ValueError(f"k={k} exceeds {len(candidates)} candidates")

    table: list[EvalRow] = []

    def run(placement):
        profit, result = evaluate_placement(scenario, placement, pricing_options,
                                            solve_options)
        row = EvalRow(placement, profit, result.converged, result.cycle_detected)
        table.append(row)
        return profit, result

    if method == "exhaustive":
        best = None
        for placement in enumerate_placements(candidates, k):
            profit, result = run(placement)
            if best is None or profit > best[0]:
                best = (profit, placement, result)
        profit, placement, result = best
    else:
        chosen: list[int] = []
        result = None
        profit = None
        for _ in range(k):
            round_best = None
            for cand in sorted(set(candidates) - set(chosen)):
                trial = Placement(tuple(chosen) + (cand,), len(chosen) + 1)
                trial_profit, trial_result = run(trial)
                if round_best is None or trial_profit > round_best[0]:
                    round_best = (trial_profit, cand, trial_result)
            profit, pick, result = round_best
            chosen.append(pick)
        placement = Placement(tuple(chosen), k)

    return PlacementResult(
        best=placement,
        profit=profit,
        pricing=result,
        table=tuple(table),
        method=method,
        all_failed=not any(r.converged for r in table),
    )
