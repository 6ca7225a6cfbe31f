"""Level 2 solver: Nash pricing among providers via damped iterated best
response, every profit evaluation backed by a full Level 1 equilibrium.

A best response sweeps the station's price over a uniform grid in
[p_min, p_max] and then sharpens the winner with a golden-section pass one
grid step wide. Ties always resolve toward the higher price so results are
reproducible. Pure price equilibria need not exist; the solver detects
profile cycles on the quantized grid and returns the best profile seen with
an honest diagnostic instead of spinning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .assignment import FlowState, SolveOptions, background_state, solve_user_equilibrium
from .model import Provider, Scenario

PriceProfile = dict  # station id -> currency/kWh


@dataclass(frozen=True)
class PricingOptions:
    damping: float = 0.5
    threshold: float | None = None   # default 1e-3 * (p_max - p_min), resolved per scenario
    max_rounds: int = 200
    refinement: int = 30             # golden-section evaluations after the grid pass

    def __post_init__(self):
        if not (0.0 < self.damping <= 1.0):
            raise ValueError("damping must be in (0, 1]")
        if self.threshold is not None and self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.refinement < 0:
            raise ValueError("refinement must be >= 0")

    def resolved_threshold(self, scenario: Scenario) -> float:
        if self.threshold is not None:
            return self.threshold
        return 1e-3 * (scenario.params.p_max - scenario.params.p_min)


@dataclass(frozen=True)
class PricingResult:
    prices: dict               # station id -> price
    converged: bool
    rounds: int
    cycle_detected: bool
    profits: dict              # provider id -> currency/h
    flow: FlowState            # Level 1 state at the returned prices


@dataclass(frozen=True)
class NashReport:
    """Certificate from re-running every provider's unilateral grid deviations."""

    max_gain: float
    gains: dict                # provider id -> best unilateral gain found
    base_profits: dict         # provider id -> profit at the checked profile
    best_deviation: tuple | None  # (provider, station, price) achieving max_gain
    tolerance: float
    passed: bool
    unconverged: int           # deviation evaluations skipped as infeasible


def price_grid(scenario: Scenario) -> list[float]:
    """The uniform price grid from the scenario's economic parameters."""
    p = scenario.params
    if p.grid == 1 or p.p_max == p.p_min:
        return [p.p_min]
    step = (p.p_max - p.p_min) / (p.grid - 1)
    pts = [p.p_min + i * step for i in range(p.grid)]
    pts[-1] = p.p_max
    return pts


def provider_profit(scenario: Scenario, prices: dict, provider: Provider,
                    state: FlowState) -> float:
    """Hourly profit: margin on energy sold at the provider's open stations,
    net of site cost per open entrant site.
    """
    stations = scenario.stations_by_id()
    energy = scenario.params.energy
    profit = 0.0
    open_count = 0
    for sid, price in prices.items():
        if stations[sid].provider != provider.id:
            continue
        open_count += 1
        profit += (price - provider.marginal_cost) * energy * state.station_flow.get(sid, 0.0)
    if provider.kind == "entrant":
        profit -= provider.site_cost * open_count
    return profit


def _solve_level1(scenario, prices, solve_options, preload):
    open_stations = tuple(sorted(prices))
    return solve_user_equilibrium(scenario, open_stations, prices,
                                  solve_options, preload=preload)


class _Evaluator:
    """Shared profit evaluation for best response and verification; keeps a
    count of candidates whose nested solve failed to converge.
    """

    def __init__(self, scenario, solve_options, preload, bg_converged=True):
        self.scenario = scenario
        self.solve_options = solve_options or SolveOptions()
        self.preload = preload
        self.bg_converged = bg_converged
        self.unconverged = 0

    def profit(self, prices, provider):
        state = _solve_level1(self.scenario, prices, self.solve_options, self.preload)
        feasible = state.converged and self.bg_converged
        if not feasible:
            self.unconverged += 1
            return None, state
        return provider_profit(self.scenario, prices, provider, state), state


def _golden_refine(evaluate, lo, hi, best_profit, best_price, iterations):
    """Golden-section maximization on [lo, hi]; keeps the incoming best unless
    a strictly better (or equally good, higher-priced) point is found.
    """
    if iterations < 2 or hi <= lo:
        return best_profit, best_price
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = evaluate(c)
    fd = evaluate(d)

    def consider(profit, price, best):
        if profit is None:
            return best
        bp, bx = best
        if profit > bp or (profit == bp and price > bx):
            return (profit, price)
        return best

    best = (best_profit, best_price)
    best = consider(fc, c, best)
    best = consider(fd, d, best)
    for _ in range(iterations - 2):
        if fc is not None and (fd is None or fc > fd):
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = evaluate(c)
            best = consider(fc, c, best)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = evaluate(d)
            best = consider(fd, d, best)
    return best


def best_response_price(scenario: Scenario, prices: dict, provider: Provider,
                        options: PricingOptions | None = None,
                        solve_options: SolveOptions | None = None,
                        preload: dict | None = None) -> dict:
    """Coordinate-descent best response over the provider's open stations,
    ascending station id; all rivals' prices held fixed. Each candidate price
    is scored by a full Level 1 solve; grid ties go to the higher price and a
    golden-section pass refines one grid step around the winner.
    """
    options = options or PricingOptions()
    ev = _Evaluator(scenario, solve_options, preload)
    profile = dict(sorted(prices.items()))
    stations = scenario.stations_by_id()
    own = sorted(sid for sid in profile if stations[sid].provider == provider.id)
    grid = price_grid(scenario)
    step = grid[1] - grid[0] if len(grid) > 1 else 0.0
    p = scenario.params

    for sid in own:
        best_profit = None
        best_price = profile[sid]
        for cand in grid:
            trial = dict(profile)
            trial[sid] = cand
            profit, _ = ev.profit(trial, provider)
            if profit is None:
                continue
            if best_profit is None or profit >= best_profit:
                best_profit = profit
                best_price = cand
        if best_profit is None:
            continue  # every candidate infeasible: keep the current price

        if options.refinement >= 2 and step > 0.0:
            lo = max(p.p_min, best_price - step)
            hi = min(p.p_max, best_price + step)

            def evaluate(price, _sid=sid):
                trial = dict(profile)
                trial[_sid] = price
                profit, _ = ev.profit(trial, provider)
                return profit

            best_profit, best_price = _golden_refine(
                evaluate, lo, hi, best_profit, best_price, options.refinement)
        profile[sid] = best_price
    return profile


def _quantize(profile: dict, scenario: Scenario) -> tuple:
    p = scenario.params
    if p.p_max == p.p_min or p.grid < 2:
        return tuple(sorted((sid, 0) for sid in profile))
    step = (p.p_max - p.p_min) / (p.grid - 1)
    return tuple(sorted((sid, round((v - p.p_min) / step)) for sid, v in profile.items()))


def solve_price_equilibrium(scenario: Scenario, open_stations,
                            options: PricingOptions | None = None,
                            solve_options: SolveOptions | None = None) -> PricingResult:
    """Damped iterated best response over providers in ascending id order.

    Converges when no price moved by more than the threshold in a round.
    Revisiting a grid-quantized profile flags a cycle and returns the profile
    with the best total profit among those seen.
    """
    options = options or PricingOptions()
    solve_options = solve_options or SolveOptions()
    open_stations = tuple(sorted(open_stations))
    if not open_stations:
        raise ValueError("at least one open station required")

    preload = None
    bg_converged = True
    if solve_options.mode == "exogenous":
        bg = background_state(scenario, solve_options)
        bg_converged = bg.converged
        preload = dict(bg.link_flow["nonev"])

    stations = scenario.stations_by_id()
    p = scenario.params
    init = 0.5 * (p.p_min + p.p_max)
    profile = {sid: init for sid in open_stations}
    threshold = options.resolved_threshold(scenario)

    active = sorted(
        pr.id for pr in scenario.providers
        if any(stations[sid].provider == pr.id for sid in open_stations)
    )
    providers = scenario.providers_by_id()

    history = [_quantize(profile, scenario)]
    seen_profiles = [dict(profile)]
    converged = False
    cycle = False
    rounds = 0
    for _ in range(options.max_rounds):
        before = dict(profile)
        for pid in active:
            br = best_response_price(scenario, profile, providers[pid],
                                     options, solve_options, preload)
            for sid in sorted(br):
                if stations[sid].provider == pid:
                    profile[sid] = profile[sid] + options.damping * (br[sid] - profile[sid])
        rounds += 1
        change = max(abs(profile[sid] - before[sid]) for sid in profile)
        if change <= threshold:
            converged = True
            break
        q = _quantize(profile, scenario)
        # a genuine cycle revisits an older profile; matching only the
        # immediately preceding one is damped convergence in progress
        if q in history[:-1]:
            cycle = True
            break
        if q != history[-1]:
            history.append(q)
            seen_profiles.append(dict(profile))

    if cycle:
        # return the best-total-profit profile among those visited
        best = None
        for past in seen_profiles:
            state = _solve_level1(scenario, past, solve_options, preload)
            total = sum(
                provider_profit(scenario, past, pr, state) for pr in scenario.providers
            )
            if best is None or total > best[0]:
                best = (total, past)
        profile = best[1]

    profile = dict(sorted(profile.items()))
    final_state = _solve_level1(scenario, profile, solve_options, preload)
    profits = {
        pr.id: provider_profit(scenario, profile, pr, final_state)
        for pr in sorted(scenario.providers, key=lambda x: x.id)
    }
    return PricingResult(
        prices=profile,
        converged=converged and final_state.converged and bg_converged,
        rounds=rounds,
        cycle_detected=cycle,
        profits=profits,
        flow=final_state,
    )


def verify_nash(scenario: Scenario, prices: dict, tolerance: float,
                options: PricingOptions | None = None,
                solve_options: SolveOptions | None = None) -> NashReport:
    """Re-run every provider's single-station grid deviations against the
    profile and report the largest unilateral profit gain found.
    """
    solve_options = solve_options or SolveOptions()
    preload = None
    bg_converged = True
    if solve_options.mode == "exogenous":
        bg = background_state(scenario, solve_options)
        bg_converged = bg.converged
        preload = dict(bg.link_flow["nonev"])

    ev = _Evaluator(scenario, solve_options, preload, bg_converged)
    stations = scenario.stations_by_id()
    base_state = _solve_level1(scenario, prices, solve_options, preload)
    base_profits = {
        pr.id: provider_profit(scenario, prices, pr, base_state)
        for pr in sorted(scenario.providers, key=lambda x: x.id)
    }

    grid = price_grid(scenario)
    max_gain = 0.0
    best_dev = None
    gains = {pid: 0.0 for pid in base_profits}
    for pr in sorted(scenario.providers, key=lambda x: x.id):
        own = sorted(sid for sid in prices if stations[sid].provider == pr.id)
        for sid in own:
            for cand in grid:
                if cand == prices[sid]:
                    continue
                trial = dict(prices)
                trial[sid] = cand
                profit, _ = ev.profit(trial, pr)
                if profit is None:
                    continue
                gain = profit - base_profits[pr.id]
                if gain > gains[pr.id]:
                    gains[pr.id] = gain
                if gain > max_gain:
                    max_gain = gain
                    best_dev = (pr.id, sid, cand)
    return NashReport(
        max_gain=max_gain,
        gains=gains,
        base_profits=base_profits,
        best_deviation=best_dev,
        tolerance=tolerance,
        passed=max_gain <= tolerance,
        unconverged=ev.unconverged,
    )
