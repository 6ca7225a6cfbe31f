"""Level 1 solver: joint multi-class user equilibrium.

EV drivers pick a route with exactly one charging stop, or opt out at a fixed
outside cost; non-EV drivers pick routes only. Both classes share link
congestion. The equilibrium is the minimizer of a convex Beckmann potential
over an augmented network:

  * physical links keep their latency functions;
  * each open station contributes a virtual charging link whose latency is the
    station's queueing delay plus a constant price * energy / vot minutes;
  * each EV origin-destination pair has a virtual bypass link of constant
    outside_cost / vot minutes, usable only by that pair.

EV routing runs on a two-layer copy of the physical network (uncharged /
charged); crossing a charging link is the only way between layers, which makes
"exactly one stop per trip" structural. The solver is Frank-Wolfe with exact
bisection line search, so the Beckmann objective never increases between
iterations.

In exogenous mode the non-EV population is solved once on its own, frozen, and
added as a fixed preload to every link; only EV flow re-routes afterwards.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .model import Scenario, station_service_delay

# element kinds in the compiled cost table
_POWER = 0   # t0 * (1 + alpha * (x / cap) ** beta), used by bpr links and stations
_AFFINE = 1  # a + b * x
_CONST = 2   # constant-only (bypass)


@dataclass(frozen=True)
class SolveOptions:
    gap_tol: float = 1e-6
    max_iter: int = 10000
    line_search_tol: float = 1e-10
    mode: str = "endogenous"  # "endogenous" | "exogenous"

    def __post_init__(self):
        if self.gap_tol <= 0 or self.line_search_tol <= 0 or self.max_iter <= 0:
            raise ValueError("tolerances and max_iter must be positive")
        if self.mode not in ("endogenous", "exogenous"):
            raise ValueError(f"unknown mode '{self.mode}'")


@dataclass(frozen=True)
class FlowState:
    """Level 1 equilibrium: per-class link flows, station throughputs, opt-out
    volumes, and solver diagnostics. beckmann_trace holds the objective value
    at each iterate of the (EV phase of the) solve.
    """

    link_flow: dict           # {"ev": {link_id: veh/h}, "nonev": {...}}
    station_flow: dict        # {station_id: veh/h}
    opt_out: dict             # {demand index: veh/h}, EV entries only
    iterations: int
    gap: float
    converged: bool
    beckmann_trace: tuple = ()


@dataclass(frozen=True)
class Commodity:
    cls: str
    od_index: int
    origin: int
    dest: int
    volume: float


class AugmentedNetwork:
    """Physical links plus the virtual charging and bypass links for a given
    set of open stations and prices. Immutable once built.
    """

    def __init__(self, scenario: Scenario, open_stations, prices, mode="endogenous",
                 preload=None):
        stations = scenario.stations_by_id()
        missing = [sid for sid in open_stations if sid not in stations]
        if missing:
            raise ValueError(f"unknown stations {missing}")
        absent = [sid for sid in open_stations if sid not in prices]
        if absent:
            raise ValueError(f"missing price for stations {absent}")

        self.scenario = scenario
        self.open_stations = tuple(sorted(open_stations))
        self.prices = {sid: float(prices[sid]) for sid in self.open_stations}
        self.mode = mode
        self.preload = dict(preload or {})

        params = scenario.params
        self.physical_links = tuple(sorted(scenario.links, key=lambda l: l.id))
        self.charging_links = tuple(
            (sid, stations[sid].node, self.prices[sid] * params.energy / params.vot)
            for sid in self.open_stations
        )
        self.bypass_links = tuple(
            (i, d.origin, d.dest, params.outside_cost / params.vot)
            for i, d in scenario.ev_demand()
        )

        self._compile()

    # -- compiled element table ------------------------------------------------

    def _compile(self):
        scenario = self.scenario
        stations = scenario.stations_by_id()
        nodes = sorted(scenario.node_ids())
        self.node_index = {nid: i for i, nid in enumerate(nodes)}
        self.index_node = nodes
        n = len(nodes)
        self.n_nodes = n

        L = len(self.physical_links)
        S = len(self.charging_links)
        B = len(self.bypass_links)
        E = L + S + B
        self.n_physical = L

        kind = np.zeros(E, dtype=np.int8)
        t0 = np.zeros(E)
        cap = np.ones(E)
        alpha = np.zeros(E)
        beta = np.ones(E)
        aa = np.zeros(E)
        bb = np.zeros(E)
        const = np.zeros(E)
        preload = np.zeros(E)

        self.link_elem = {}
        for e, link in enumerate(self.physical_links):
            self.link_elem[link.id] = e
            lat = link.latency
            if lat.kind == "bpr":
                kind[e] = _POWER
                t0[e], cap[e], alpha[e], beta[e] = lat.t0, lat.capacity, lat.alpha, lat.beta
            else:
                kind[e] = _AFFINE
                aa[e], bb[e] = lat.a, lat.b
            preload[e] = self.preload.get(link.id, 0.0)

        self.station_elem = {}
        for j, (sid, _node, addend) in enumerate(self.charging_links):
            e = L + j
            st = stations[sid]
            self.station_elem[sid] = e
            kind[e] = _POWER
            t0[e], cap[e], alpha[e], beta[e] = st.d0, st.kappa, 1.0, st.gamma
            const[e] = addend

        self.bypass_elem = {}
        for j, (od, _o, _d, minutes) in enumerate(self.bypass_links):
            e = L + S + j
            self.bypass_elem[od] = e
            kind[e] = _CONST
            const[e] = minutes

        for arr in (kind, t0, cap, alpha, beta, aa, bb, const, preload):
            arr.flags.writeable = False
        self._kind, self._t0, self._cap = kind, t0, cap
        self._alpha, self._beta, self._a, self._b = alpha, beta, aa, bb
        self._const = const
        self.preload_arr = preload
        self._preload_integral = self._integral_raw(preload)
        self.n_elements = E
        # plain-float copies for the scalar line-search hot path
        self._p = (kind.tolist(), t0.tolist(), cap.tolist(), alpha.tolist(),
                   beta.tolist(), aa.tolist(), bb.tolist(), const.tolist())

        # class-specific adjacency: non-EV over physical arcs, EV over a
        # two-layer copy with charging arcs crossing layer 0 -> layer 1
        adj_nonev = [[] for _ in range(n)]
        adj_ev = [[] for _ in range(2 * n)]
        for e, link in enumerate(self.physical_links):
            u, v = self.node_index[link.tail], self.node_index[link.head]
            adj_nonev[u].append((e, v))
            adj_ev[u].append((e, v))
            adj_ev[n + u].append((e, n + v))
        for j, (sid, node, _addend) in enumerate(self.charging_links):
            e = L + j
            u = self.node_index[node]
            adj_ev[u].append((e, n + u))
        self.adj_nonev = [tuple(x) for x in adj_nonev]
        self.adj_ev = [tuple(x) for x in adj_ev]

        self.commodities = tuple(
            Commodity(d.cls, i, d.origin, d.dest, d.volume)
            for i, d in enumerate(scenario.demand)
        )

        # weakly-connected components of the physical graph; the Beckmann
        # objective separates across them, so line search runs per component
        comp = list(range(n))

        def find(i):
            while comp[i] != i:
                comp[i] = comp[comp[i]]
                i = comp[i]
            return i

        for link in self.physical_links:
            a = find(self.node_index[link.tail])
            b = find(self.node_index[link.head])
            if a != b:
                comp[max(a, b)] = min(a, b)
        roots = sorted({find(i) for i in range(n)})
        root_id = {r: i for i, r in enumerate(roots)}
        self.n_components = len(roots)
        node_comp = [root_id[find(i)] for i in range(n)]
        self.node_component = node_comp
        elem_comp = np.zeros(E, dtype=np.int64)
        for e, link in enumerate(self.physical_links):
            elem_comp[e] = node_comp[self.node_index[link.tail]]
        for j, (sid, node, _addend) in enumerate(self.charging_links):
            elem_comp[L + j] = node_comp[self.node_index[node]]
        for j, (od, o, _d, _m) in enumerate(self.bypass_links):
            elem_comp[L + S + j] = node_comp[self.node_index[o]]
        elem_comp.flags.writeable = False
        self.elem_component = elem_comp

    # -- element cost / integral ------------------------------------------------

    def elem_cost(self, x: np.ndarray) -> np.ndarray:
        """Element latency in minutes at element flows x (preload included in x)."""
        y = self._const.copy()
        pm = self._kind == _POWER
        if pm.any():
            y[pm] += self._t0[pm] * (
                1.0 + self._alpha[pm] * (x[pm] / self._cap[pm]) ** self._beta[pm]
            )
        am = self._kind == _AFFINE
        if am.any():
            y[am] += self._a[am] + self._b[am] * x[am]
        return y

    def _integral_raw(self, x: np.ndarray) -> np.ndarray:
        y = self._const * x
        pm = self._kind == _POWER
        if pm.any():
            y[pm] += self._t0[pm] * x[pm] * (
                1.0 + self._alpha[pm] / (self._beta[pm] + 1.0)
                * (x[pm] / self._cap[pm]) ** self._beta[pm]
            )
        am = self._kind == _AFFINE
        if am.any():
            y[am] += self._a[am] * x[am] + 0.5 * self._b[am] * x[am] ** 2
        return y

    def beckmann(self, assigned: np.ndarray) -> float:
        """Beckmann potential of assigned element flows, preload held fixed."""
        return float(
            (self._integral_raw(self.preload_arr + assigned) - self._preload_integral).sum()
        )

    def solver_commodities(self) -> tuple[Commodity, ...]:
        if self.mode == "exogenous":
            return tuple(c for c in self.commodities if c.cls == "ev" and c.volume > 0)
        return tuple(c for c in self.commodities if c.volume > 0)


def build_augmented_network(scenario: Scenario, open_stations, prices,
                            mode: str = "endogenous", preload=None) -> AugmentedNetwork:
    return AugmentedNetwork(scenario, open_stations, prices, mode=mode, preload=preload)


# -- shortest paths --------------------------------------------------------------


def _dijkstra(adj, source: int, n_gnodes: int, costs):
    """Cheap deterministic Dijkstra: distances and parent arcs from source.

    Tie-breaks follow heap insertion order, which is fixed for fixed inputs.
    """
    dist = [float("inf")] * n_gnodes
    parent = [-1] * n_gnodes          # graph-arc (elem, tail) encoded below
    parent_tail = [-1] * n_gnodes
    dist[source] = 0.0
    counter = 0
    heap = [(0.0, 0, source)]
    visited = [False] * n_gnodes
    while heap:
        d, _, u = heapq.heappop(heap)
        if visited[u]:
            continue
        visited[u] = True
        for e, v in adj[u]:
            nd = d + costs[e]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = e
                parent_tail[v] = u
                counter += 1
                heapq.heappush(heap, (nd, counter, v))
    return dist, parent, parent_tail


def _walk_parents(parent, parent_tail, source, target):
    elems = []
    v = target
    while v != source:
        elems.append(parent[v])
        v = parent_tail[v]
    elems.reverse()
    return elems


def _dijkstra_lex(adj, source: int, n_gnodes: int, costs, node_of):
    """Exact tie-broken shortest paths: among equal-cost paths, prefer the
    lexicographically smallest physical node-id sequence, then the smallest
    element-id sequence. Label-correcting; exact float ties only.
    """
    INF = float("inf")
    dist = [INF] * n_gnodes
    key = [None] * n_gnodes
    arcs = [None] * n_gnodes
    dist[source] = 0.0
    key[source] = ((node_of(source),), ())
    arcs[source] = ()
    counter = 0
    heap = [(0.0, 0, source)]
    while heap:
        d, _, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for e, v in adj[u]:
            nd = d + costs[e]
            if nd > dist[v]:
                continue
            nkey = (key[u][0] + (node_of(v),), key[u][1] + (e,))
            if nd < dist[v] or nkey < key[v]:
                dist[v] = nd
                key[v] = nkey
                arcs[v] = arcs[u] + (e,)
                counter += 1
                heapq.heappush(heap, (nd, counter, v))
    return dist, arcs


@dataclass(frozen=True)
class GenPath:
    """A class-feasible route: physical node sequence, links traversed, the
    charging station used (EV only), or the opt-out flag.
    """

    nodes: tuple
    links: tuple
    station: int | None
    opt_out: bool
    cost: float  # currency


def _state_to_arrays(aug: AugmentedNetwork, state: FlowState):
    E = aug.n_elements
    x_ev = np.zeros(E)
    x_nonev = np.zeros(E)
    for lid, f in state.link_flow.get("ev", {}).items():
        x_ev[aug.link_elem[lid]] = f
    for lid, f in state.link_flow.get("nonev", {}).items():
        x_nonev[aug.link_elem[lid]] = f
    for sid, f in state.station_flow.items():
        if sid in aug.station_elem:
            x_ev[aug.station_elem[sid]] = f
    for od, f in state.opt_out.items():
        if od in aug.bypass_elem:
            x_ev[aug.bypass_elem[od]] = f
    return x_ev, x_nonev


def shortest_generalized_path(aug: AugmentedNetwork, cls: str, origin: int, dest: int,
                              flows: FlowState) -> tuple[GenPath, float]:
    """Minimum generalized-cost path for one traveler class at current flows.

    EV paths carry exactly one charging stop, unless the OD's opt-out is
    strictly cheaper. Ties prefer the lexicographically smallest node
    sequence, then smallest link ids; charging beats opt-out on ties.
    """
    if cls not in ("ev", "nonev"):
        raise ValueError(f"unknown class '{cls}'")
    scenario = aug.scenario
    params = scenario.params
    x_ev, x_nonev = _state_to_arrays(aug, flows)
    costs = aug.elem_cost(x_ev + x_nonev)  # exogenous states carry preload as nonev
    n = aug.n_nodes
    o = aug.node_index[origin]
    d = aug.node_index[dest]

    if cls == "nonev":
        dist, arcs = _dijkstra_lex(aug.adj_nonev, o, n, costs,
                                   lambda g: aug.index_node[g])
        if arcs[d] is None:
            raise ValueError(f"destination {dest} unreachable from {origin} for nonev")
        elems = arcs[d]
        nodes = _elem_nodes(aug, origin, elems)
        links = tuple(aug.physical_links[e].id for e in elems)
        cost = float(params.vot * dist[d])
        return GenPath(nodes, links, None, False, cost), cost

    dist, arcs = _dijkstra_lex(aug.adj_ev, o, 2 * n, costs,
                               lambda g: aug.index_node[g % n])
    target = n + d
    charge_minutes = dist[target]
    bypass = next((b for b in aug.bypass_links if b[1] == origin and b[2] == dest), None)
    bypass_minutes = bypass[3] if bypass is not None else float("inf")
    if bypass_minutes < charge_minutes:  # strict: indifferent drivers charge
        cost = params.vot * bypass_minutes
        return GenPath((origin, dest), (), None, True, cost), cost
    if arcs[target] is None:
        raise ValueError(f"destination {dest} unreachable from {origin} for ev")
    elems = arcs[target]
    nodes = _elem_nodes(aug, origin, elems)
    links = tuple(aug.physical_links[e].id for e in elems if e < aug.n_physical)
    elem_station = {e: sid for sid, e in aug.station_elem.items()}
    station = next(elem_station[e] for e in elems if e in elem_station)
    cost = float(params.vot * charge_minutes)
    return GenPath(nodes, links, station, False, cost), cost


def _elem_nodes(aug, origin, elems):
    nodes = [origin]
    for e in elems:
        if e < aug.n_physical:
            nodes.append(aug.physical_links[e].head)
        else:
            nodes.append(nodes[-1])  # charging self-loop in physical space
    return tuple(nodes)


# -- Frank-Wolfe ------------------------------------------------------------------


def _all_or_nothing(aug: AugmentedNetwork, commodities, costs):
    """Auxiliary per-class element flows and per-component shortest-path cost
    at the frozen element costs. EV demand opts out only when strictly cheaper.
    """
    E = aug.n_elements
    n = aug.n_nodes
    y_ev = np.zeros(E)
    y_nonev = np.zeros(E)
    sptt: dict = {}
    clist = costs.tolist()

    groups: dict = {}
    for c in commodities:
        groups.setdefault((c.cls, c.origin), []).append(c)

    for (cls, origin), members in sorted(groups.items()):
        comp = aug.node_component[aug.node_index[origin]]
        if cls == "nonev":
            src = aug.node_index[origin]
            dist, parent, ptail = _dijkstra(aug.adj_nonev, src, n, clist)
            for c in members:
                tgt = aug.node_index[c.dest]
                if dist[tgt] == float("inf"):
                    raise ValueError(
                        f"destination {c.dest} unreachable from {c.origin} for nonev")
                for e in _walk_parents(parent, ptail, src, tgt):
                    y_nonev[e] += c.volume
                sptt[comp] = sptt.get(comp, 0.0) + dist[tgt] * c.volume
        else:
            src = aug.node_index[origin]
            dist, parent, ptail = _dijkstra(aug.adj_ev, src, 2 * n, clist)
            for c in members:
                tgt = n + aug.node_index[c.dest]
                byp = aug.bypass_elem[c.od_index]
                byp_minutes = costs[byp]
                if byp_minutes < dist[tgt]:
                    y_ev[byp] += c.volume
                    sptt[comp] = sptt.get(comp, 0.0) + byp_minutes * c.volume
                else:
                    for e in _walk_parents(parent, ptail, src, tgt):
                        y_ev[e] += c.volume
                    sptt[comp] = sptt.get(comp, 0.0) + dist[tgt] * c.volume
    return y_ev, y_nonev, sptt


def _line_search(aug, base, idxs, delta, tol):
    """Exact step for one component: bisection on the directional derivative
    of its Beckmann term along delta, restricted to [0, 1]. Scalar math; the
    active sets are tiny compared to the element table.
    """
    kind, t0, cap, alpha, beta, aa, bb, const = aug._p
    rows = [(e, base[e], delta[e], kind[e]) for e in idxs]

    def deriv(lam):
        s = 0.0
        for e, b, d, k in rows:
            x = b + lam * d
            if k == _POWER:
                c = const[e] + t0[e] * (1.0 + alpha[e] * (x / cap[e]) ** beta[e])
            elif k == _AFFINE:
                c = const[e] + aa[e] + bb[e] * x
            else:
                c = const[e]
            s += d * c
        return s

    if deriv(0.0) >= 0.0:
        return 0.0
    if deriv(1.0) <= 0.0:
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if deriv(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _zero_state(aug: AugmentedNetwork) -> FlowState:
    zeros_ev = {l.id: 0.0 for l in aug.physical_links}
    zeros_nonev = {l.id: aug.preload.get(l.id, 0.0) for l in aug.physical_links}
    return FlowState(
        link_flow={"ev": zeros_ev, "nonev": zeros_nonev},
        station_flow={sid: 0.0 for sid in aug.open_stations},
        opt_out={od: 0.0 for od, *_ in aug.bypass_links},
        iterations=0, gap=0.0, converged=True, beckmann_trace=(0.0,),
    )


def _frank_wolfe(aug: AugmentedNetwork, options: SolveOptions) -> FlowState:
    """Frank-Wolfe with exact per-component line search.

    The Beckmann objective separates over weakly-connected components, so each
    component follows its own trajectory and freezes once its own relative gap
    is within tolerance; disconnected subnetworks solve identically whether
    together or apart.
    """
    commodities = aug.solver_commodities()
    if not commodities:
        return _zero_state(aug)

    costs0 = aug.elem_cost(aug.preload_arr.copy())
    x_ev, x_nonev, _ = _all_or_nothing(aug, commodities, costs0)
    trace = [aug.beckmann(x_ev + x_nonev)]

    active_comps = sorted({aug.node_component[aug.node_index[c.origin]]
                           for c in commodities})
    gap_by_comp = {comp: float("inf") for comp in active_comps}
    frozen: set = set()
    iterations = 0
    converged = False
    while True:
        live = [c for c in commodities
                if aug.node_component[aug.node_index[c.origin]] not in frozen]
        assigned = x_ev + x_nonev
        costs = aug.elem_cost(aug.preload_arr + assigned)
        y_ev, y_nonev, sptt = _all_or_nothing(aug, live, costs)
        tstt = np.bincount(aug.elem_component, weights=costs * assigned,
                           minlength=aug.n_components)
        for comp in active_comps:
            if comp in frozen:
                continue
            t = float(tstt[comp])
            s = sptt.get(comp, 0.0)
            gap_by_comp[comp] = 0.0 if t <= 1e-300 else max(0.0, 1.0 - s / t)
            if gap_by_comp[comp] <= options.gap_tol:
                frozen.add(comp)
        if len(frozen) == len(active_comps):
            converged = True
            break
        if iterations >= options.max_iter:
            break
        delta = (y_ev + y_nonev) - assigned
        base = (aug.preload_arr + assigned).tolist()
        dlist = delta.tolist()
        active = np.nonzero(delta)[0]
        lam_comp = np.zeros(aug.n_components)
        for comp in sorted(set(aug.elem_component[active].tolist())):
            if comp in frozen:
                continue
            idxs = [int(e) for e in active if aug.elem_component[e] == comp]
            lam_comp[comp] = _line_search(aug, base, idxs, dlist,
                                          options.line_search_tol)
        lam = lam_comp[aug.elem_component]
        x_ev += lam * (y_ev - x_ev)
        x_nonev += lam * (y_nonev - x_nonev)
        iterations += 1
        trace.append(aug.beckmann(x_ev + x_nonev))
    gap = max(gap_by_comp.values()) if gap_by_comp else 0.0

    link_ev = {l.id: float(x_ev[aug.link_elem[l.id]]) for l in aug.physical_links}
    if aug.mode == "exogenous":
        link_nonev = {l.id: aug.preload.get(l.id, 0.0) for l in aug.physical_links}
    else:
        link_nonev = {l.id: float(x_nonev[aug.link_elem[l.id]]) for l in aug.physical_links}
    return FlowState(
        link_flow={"ev": link_ev, "nonev": link_nonev},
        station_flow={sid: float(x_ev[e]) for sid, e in sorted(aug.station_elem.items())},
        opt_out={od: float(x_ev[e]) for od, e in sorted(aug.bypass_elem.items())},
        iterations=iterations,
        gap=float(gap),
        converged=converged,
        beckmann_trace=tuple(trace),
    )


def background_state(scenario: Scenario, options: SolveOptions | None = None) -> FlowState:
    """Non-EV-only user equilibrium on the physical network (zero EV flow)."""
    options = options or SolveOptions()
    aug = AugmentedNetwork(scenario, (), {}, mode="endogenous")
    aug.commodities = tuple(c for c in aug.commodities if c.cls == "nonev")
    return _frank_wolfe(aug, options)


def freeze_background(scenario: Scenario, options: SolveOptions | None = None) -> dict:
    """Fixed per-link non-EV preloads for exogenous mode: the link flows of a
    non-EV-only equilibrium with zero EV flow.
    """
    state = background_state(scenario, options)
    return dict(state.link_flow["nonev"])


def solve_user_equilibrium(scenario: Scenario, open_stations, prices,
                           options: SolveOptions | None = None,
                           preload: dict | None = None) -> FlowState:
    """Frank-Wolfe user equilibrium at the given open stations and prices.

    Endogenous mode assigns both classes together. Exogenous mode first
    freezes the non-EV background (or accepts a precomputed `preload`) and
    then equilibrates EV flow against it; iterations, gap and trace then
    describe the EV phase. Non-convergence is reported via converged=False,
    never raised.
    """
    options = options or SolveOptions()
    if options.mode == "endogenous":
        aug = AugmentedNetwork(scenario, open_stations, prices, mode="endogenous")
        return _frank_wolfe(aug, options)

    bg_converged = True
    if preload is None:
        bg = background_state(scenario, options)
        bg_converged = bg.converged
        preload = dict(bg.link_flow["nonev"])
    aug = AugmentedNetwork(scenario, open_stations, prices, mode="exogenous",
                           preload=preload)
    state = _frank_wolfe(aug, options)
    if not bg_converged and state.converged:
        state = FlowState(
            link_flow=state.link_flow, station_flow=state.station_flow,
            opt_out=state.opt_out, iterations=state.iterations, gap=state.gap,
            converged=False, beckmann_trace=state.beckmann_trace,
        )
    return state


def relative_gap(state: FlowState, aug: AugmentedNetwork) -> float:
    """1 - (all-or-nothing cost / current assigned cost) at the state's frozen
    element costs; 0 for zero-demand states.
    """
    commodities = aug.solver_commodities()
    if not commodities:
        return 0.0
    x_ev, x_nonev = _state_to_arrays(aug, state)
    if aug.mode == "exogenous":
        assigned = x_ev
        costs = aug.elem_cost(x_ev + x_nonev)
    else:
        assigned = x_ev + x_nonev
        costs = aug.elem_cost(assigned)
    _, _, sptt = _all_or_nothing(aug, commodities, costs)
    tstt = float(np.dot(costs, assigned))
    if tstt <= 1e-300:
        return 0.0
    return max(0.0, 1.0 - sum(sptt.values()) / tstt)


def station_demand(state: FlowState, station) -> float:
    """Throughput on a station's charging link; 0 for closed stations."""
    sid = station if isinstance(station, int) else station.id
    return state.station_flow.get(sid, 0.0)
