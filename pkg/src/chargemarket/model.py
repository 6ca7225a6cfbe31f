"""Domain types for charging-market scenarios: networks, stations, providers,
demand, and the cost primitives shared by all three solver levels.

Everything here is immutable after validation and safe to share between
concurrent solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace


class InvalidScenario(ValueError):
    """Raised by validate_scenario; carries the complete list of violations."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class Node:
    id: int


@dataclass(frozen=True)
class LatencyFn:
    """Link volume-delay function, minutes as a function of flow (veh/h).

    Two kinds:
      bpr:    t0 * (1 + alpha * (flow / capacity) ** beta)
      affine: a + b * flow
    """

    kind: str  # "bpr" | "affine"
    t0: float = 0.0
    capacity: float = 1.0
    alpha: float = 0.15
    beta: float = 4.0
    a: float = 0.0
    b: float = 0.0

    @classmethod
    def bpr(cls, t0: float, capacity: float, alpha: float = 0.15, beta: float = 4.0) -> LatencyFn:
        return cls(kind="bpr", t0=t0, capacity=capacity, alpha=alpha, beta=beta)

    @classmethod
    def affine(cls, a: float, b: float) -> LatencyFn:
        return cls(kind="affine", a=a, b=b)

    def value(self, flow: float) -> float:
        if flow < 0:
            raise ValueError(f"negative flow {flow}")
        if self.kind == "bpr":
            return self.t0 * (1.0 + self.alpha * (flow / self.capacity) ** self.beta)
        return self.a + self.b * flow

    def integral(self, flow: float) -> float:
        """Antiderivative of value() at `flow`, zero at flow 0 (Beckmann term)."""
        if flow < 0:
            raise ValueError(f"negative flow {flow}")
        if self.kind == "bpr":
            return self.t0 * flow * (
                1.0 + self.alpha / (self.beta + 1.0) * (flow / self.capacity) ** self.beta
            )
        return self.a * flow + 0.5 * self.b * flow * flow

    def errors(self, where: str) -> list[str]:
        errs = []
        if self.kind == "bpr":
            if self.t0 < 0:
                errs.append(f"{where}: bpr t0 must be >= 0, got {self.t0}")
            if self.capacity <= 0:
                errs.append(f"{where}: bpr capacity must be > 0, got {self.capacity}")
            if self.alpha < 0:
                errs.append(f"{where}: bpr alpha must be >= 0, got {self.alpha}")
            if self.beta < 1:
                errs.append(f"{where}: bpr beta must be >= 1, got {self.beta}")
        elif self.kind == "affine":
            if self.a < 0:
                errs.append(f"{where}: affine a must be >= 0, got {self.a}")
            if self.b < 0:
                errs.append(f"{where}: affine b must be >= 0, got {self.b}")
        else:
            errs.append(f"{where}: unknown latency kind '{self.kind}'")
        return errs


@dataclass(frozen=True)
class Link:
    id: int
    tail: int
    head: int
    latency: LatencyFn
    virtual: bool = False  # self-loops are legal only on virtual links


@dataclass(frozen=True)
class Station:
    """Charging station; queueing delay is a power law in throughput."""

    id: int
    provider: int
    node: int
    d0: float          # base service minutes
    kappa: float       # service capacity, veh/h
    gamma: float       # delay exponent, >= 1
    status: str        # "open" | "candidate"


@dataclass(frozen=True)
class Provider:
    id: int
    kind: str          # "incumbent" | "entrant"
    marginal_cost: float   # currency/kWh
    site_cost: float       # currency/h per open entrant site


@dataclass(frozen=True)
class DemandEntry:
    cls: str           # "ev" | "nonev"
    origin: int
    dest: int
    volume: float      # veh/h


@dataclass(frozen=True)
class EconomicParams:
    vot: float             # currency/minute
    energy: float          # kWh per charging stop
    outside_cost: float    # currency, EV opt-out generalized cost
    p_min: float
    p_max: float
    grid: int              # price grid points, >= 2


@dataclass(frozen=True)
class Scenario:
    nodes: tuple[Node, ...]
    links: tuple[Link, ...]
    stations: tuple[Station, ...]
    providers: tuple[Provider, ...]
    demand: tuple[DemandEntry, ...]
    params: EconomicParams
    version: int = 1

    def node_ids(self) -> set[int]:
        return {n.id for n in self.nodes}

    def links_by_id(self) -> dict[int, Link]:
        return {l.id: l for l in self.links}

    def stations_by_id(self) -> dict[int, Station]:
        return {s.id: s for s in self.stations}

    def providers_by_id(self) -> dict[int, Provider]:
        return {p.id: p for p in self.providers}

    def entrant(self) -> Provider:
        return next(p for p in self.providers if p.kind == "entrant")

    def open_station_ids(self) -> tuple[int, ...]:
        return tuple(sorted(s.id for s in self.stations if s.status == "open"))

    def candidate_station_ids(self) -> tuple[int, ...]:
        return tuple(sorted(s.id for s in self.stations if s.status == "candidate"))

    def ev_demand(self) -> tuple[tuple[int, DemandEntry], ...]:
        """(index, entry) pairs for EV demand, in scenario order."""
        return tuple((i, d) for i, d in enumerate(self.demand) if d.cls == "ev")

    def nonev_demand(self) -> tuple[tuple[int, DemandEntry], ...]:
        return tuple((i, d) for i, d in enumerate(self.demand) if d.cls == "nonev")


def link_travel_time(latency: LatencyFn, flow: float) -> float:
    """Travel time in minutes on a link carrying `flow` veh/h."""
    return latency.value(flow)


def station_service_delay(station: Station, throughput: float) -> float:
    """Queueing delay in minutes at a station serving `throughput` veh/h:
    d0 * (1 + (throughput / kappa) ** gamma).
    """
    if throughput < 0:
        raise ValueError(f"negative throughput {throughput}")
    if station.d0 == 0.0:
        return 0.0
    return station.d0 * (1.0 + (throughput / station.kappa) ** station.gamma)


def station_delay_integral(station: Station, throughput: float) -> float:
    """Antiderivative of station_service_delay at `throughput`, zero at 0."""
    if throughput < 0:
        raise ValueError(f"negative throughput {throughput}")
    if station.d0 == 0.0:
        return 0.0
    g = station.gamma
    return station.d0 * throughput * (1.0 + (throughput / station.kappa) ** g / (g + 1.0))


def ev_generalized_cost(route_minutes: float, delay_minutes: float, price: float,
                        params: EconomicParams) -> float:
    """Currency cost of an EV trip: vot * (travel + delay) + price * energy."""
    if route_minutes < 0 or delay_minutes < 0 or price < 0:
        raise ValueError("generalized-cost inputs must be nonnegative")
    return params.vot * (route_minutes + delay_minutes) + price * params.energy


def _physical_reachable(scenario: Scenario, origin: int) -> set[int]:
    adj: dict[int, list[int]] = {}
    for l in scenario.links:
        if not l.virtual:
            adj.setdefault(l.tail, []).append(l.head)
    seen = {origin}
    stack = [origin]
    while stack:
        u = stack.pop()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def scenario_errors(scenario: Scenario) -> list[str]:
    """Complete list of invariant violations; empty when the scenario is valid."""
    errs: list[str] = []
    if scenario.version != 1:
        errs.append(f"unsupported version {scenario.version}")

    node_ids = [n.id for n in scenario.nodes]
    nodes = set(node_ids)
    if len(node_ids) != len(nodes):
        dupes = sorted({i for i in node_ids if node_ids.count(i) > 1})
        errs.append(f"duplicate node ids {dupes}")

    link_ids = [l.id for l in scenario.links]
    if len(link_ids) != len(set(link_ids)):
        dupes = sorted({i for i in link_ids if link_ids.count(i) > 1})
        errs.append(f"duplicate link ids {dupes}")
    for l in scenario.links:
        for endpoint in (l.tail, l.head):
            if endpoint not in nodes:
                errs.append(f"link {l.id}: unknown node {endpoint}")
        if l.tail == l.head and not l.virtual:
            errs.append(f"link {l.id}: self-loop on non-virtual link")
        errs.extend(l.latency.errors(f"link {l.id}"))

    provider_ids = [p.id for p in scenario.providers]
    if len(provider_ids) != len(set(provider_ids)):
        dupes = sorted({i for i in provider_ids if provider_ids.count(i) > 1})
        errs.append(f"duplicate provider ids {dupes}")
    providers = {p.id: p for p in scenario.providers}
    entrants = [p for p in scenario.providers if p.kind == "entrant"]
    for p in scenario.providers:
        if p.kind not in ("incumbent", "entrant"):
            errs.append(f"provider {p.id}: unknown kind '{p.kind}'")
        if p.marginal_cost < 0:
            errs.append(f"provider {p.id}: marginal_cost must be >= 0")
        if p.site_cost < 0:
            errs.append(f"provider {p.id}: site_cost must be >= 0")
    if len(entrants) > 1:
        errs.append(f"multiple entrants: providers {sorted(p.id for p in entrants)}")
    elif not entrants:
        errs.append("no entrant provider")

    station_ids = [s.id for s in scenario.stations]
    if len(station_ids) != len(set(station_ids)):
        dupes = sorted({i for i in station_ids if station_ids.count(i) > 1})
        errs.append(f"duplicate station ids {dupes}")
    for s in scenario.stations:
        if s.provider not in providers:
            errs.append(f"station {s.id}: unknown provider {s.provider}")
        if s.node not in nodes:
            errs.append(f"station {s.id}: unknown node {s.node}")
        if s.d0 < 0:
            errs.append(f"station {s.id}: d0 must be >= 0")
        if s.kappa <= 0:
            errs.append(f"station {s.id}: kappa must be > 0")
        if s.gamma < 1:
            errs.append(f"station {s.id}: gamma must be >= 1")
        if s.status not in ("open", "candidate"):
            errs.append(f"station {s.id}: unknown status '{s.status}'")
        if s.status == "candidate" and s.provider in providers \
                and providers[s.provider].kind != "entrant":
            errs.append(f"station {s.id}: candidate owned by non-entrant provider {s.provider}")

    reachable_cache: dict[int, set[int]] = {}
    for i, d in enumerate(scenario.demand):
        where = f"demand entry {i}"
        if d.cls not in ("ev", "nonev"):
            errs.append(f"{where}: unknown class '{d.cls}'")
        if d.volume < 0:
            errs.append(f"{where}: volume must be >= 0")
        missing = False
        for endpoint in (d.origin, d.dest):
            if endpoint not in nodes:
                errs.append(f"{where}: unknown node {endpoint}")
                missing = True
        if missing:
            continue
        if d.origin == d.dest:
            errs.append(f"{where}: origin equals destination {d.origin}")
            continue
        if d.origin not in reachable_cache:
            reachable_cache[d.origin] = _physical_reachable(scenario, d.origin)
        if d.dest not in reachable_cache[d.origin]:
            errs.append(f"{where}: no physical path {d.origin} -> {d.dest}")

    p = scenario.params
    if p.vot <= 0:
        errs.append("params: vot must be > 0")
    if p.energy <= 0:
        errs.append("params: energy must be > 0")
    if p.outside_cost <= 0:
        errs.append("params: outside_cost must be > 0")
    if p.p_min > p.p_max:
        errs.append(f"pricing: p_min {p.p_min} exceeds p_max {p.p_max}")
    if p.p_min < 0:
        errs.append("pricing: p_min must be >= 0")
    if p.grid < 2:
        errs.append(f"pricing: grid must be >= 2, got {p.grid}")
    for v in (p.vot, p.energy, p.outside_cost, p.p_min, p.p_max):
        if not math.isfinite(v):
            errs.append("params: non-finite value")
            break
    return errs


def validate_scenario(scenario: Scenario) -> Scenario:
    """Return the scenario unchanged if valid, else raise InvalidScenario
    carrying every violation found.
    """
    errs = scenario_errors(scenario)
    if errs:
        raise InvalidScenario(errs)
    return scenario


def scale_nonev_demand(scenario: Scenario, factor: float) -> Scenario:
    """Derived scenario with every non-EV volume multiplied by `factor`."""
    if factor < 0:
        raise ValueError("scale factor must be >= 0")
    demand = tuple(
        replace(d, volume=d.volume * factor) if d.cls == "nonev" else d
        for d in scenario.demand
    )
    return replace(scenario, demand=demand)


def with_outside_cost(scenario: Scenario, outside_cost: float) -> Scenario:
    """Derived scenario with a different EV opt-out cost."""
    return replace(scenario, params=replace(scenario.params, outside_cost=outside_cost))
