"""Scratch smoke test: Pigou + Braess closed forms, EV charging basics."""
from chargemarket import *

P = EconomicParams(vot=1.0, energy=1.0, outside_cost=10.0, p_min=0.0, p_max=10.0, grid=11)


def pigou():
    return validate_scenario(Scenario(
        nodes=(Node(1), Node(2)),
        links=(Link(1, 1, 2, LatencyFn.affine(1.0, 0.0)),
               Link(2, 1, 2, LatencyFn.affine(0.0, 1.0))),
        stations=(),
        providers=(Provider(1, "entrant", 0.0, 0.0),),
        demand=(DemandEntry("nonev", 1, 2, 1.0),),
        params=P,
    ))


def braess(with_shortcut=True):
    links = [
        Link(1, 1, 2, LatencyFn.affine(0.0, 1.0)),   # O->A: x
        Link(2, 2, 4, LatencyFn.affine(1.0, 0.0)),   # A->D: 1
        Link(3, 1, 3, LatencyFn.affine(1.0, 0.0)),   # O->B: 1
        Link(4, 3, 4, LatencyFn.affine(0.0, 1.0)),   # B->D: x
    ]
    if with_shortcut:
        links.append(Link(5, 2, 3, LatencyFn.affine(0.0, 0.0)))  # A->B: 0
    return validate_scenario(Scenario(
        nodes=(Node(1), Node(2), Node(3), Node(4)),
        links=tuple(links),
        stations=(),
        providers=(Provider(1, "entrant", 0.0, 0.0),),
        demand=(DemandEntry("nonev", 1, 4, 1.0),),
        params=P,
    ))


def ev_two_station():
    # O -> D via node 2 (station 1) or node 3 (station 2), symmetric
    return validate_scenario(Scenario(
        nodes=(Node(1), Node(2), Node(3), Node(4)),
        links=(Link(1, 1, 2, LatencyFn.bpr(5.0, 50.0)),
               Link(2, 2, 4, LatencyFn.bpr(5.0, 50.0)),
               Link(3, 1, 3, LatencyFn.bpr(5.0, 50.0)),
               Link(4, 3, 4, LatencyFn.bpr(5.0, 50.0))),
        stations=(Station(1, 1, 2, 1.0, 30.0, 2.0, "open"),
                  Station(2, 1, 3, 1.0, 30.0, 2.0, "open")),
        providers=(Provider(1, "incumbent", 0.1, 0.0),
                   Provider(2, "entrant", 0.1, 1.0)),
        demand=(DemandEntry("ev", 1, 4, 20.0), DemandEntry("nonev", 1, 4, 10.0)),
        params=EconomicParams(1.0, 1.0, 60.0, 0.0, 10.0, 11),
    ))


s = pigou()
fs = solve_user_equilibrium(s, (), {}, SolveOptions())
print("pigou:", fs.link_flow["nonev"], "iters", fs.iterations, "gap", fs.gap, "conv", fs.converged)
aug = build_augmented_network(s, (), {})
p, c = shortest_generalized_path(aug, "nonev", 1, 2, fs)
print("pigou sp:", p, c)

s = braess(True)
fs = solve_user_equilibrium(s, (), {})
print("braess:", fs.link_flow["nonev"], fs.iterations, fs.gap)
aug = build_augmented_network(s, (), {})
p, c = shortest_generalized_path(aug, "nonev", 1, 4, fs)
print("braess cost:", c, "path", p.nodes)

s = braess(False)
fs = solve_user_equilibrium(s, (), {})
print("braess nocut:", fs.link_flow["nonev"], fs.iterations, fs.gap)
aug = build_augmented_network(s, (), {})
p, c = shortest_generalized_path(aug, "nonev", 1, 4, fs)
print("braess nocut cost:", c, "path", p.nodes)

s = ev_two_station()
fs = solve_user_equilibrium(s, (1, 2), {1: 2.0, 2: 2.0})
print("ev2:", fs.station_flow, "optout", fs.opt_out, "iters", fs.iterations, "gap", fs.gap)
print("ev2 link flows ev:", fs.link_flow["ev"])
print("nonev:", fs.link_flow["nonev"])
aug = build_augmented_network(s, (1, 2), {1: 2.0, 2: 2.0})
p, c = shortest_generalized_path(aug, "ev", 1, 4, fs)
print("ev path:", p, c)
import chargemarket.assignment as A
print("recomputed gap:", A.relative_gap(fs, aug))

# exogenous vs endogenous with zero nonev demand must be identical
from dataclasses import replace
s0 = validate_scenario(replace(s, demand=(DemandEntry("ev", 1, 4, 20.0), DemandEntry("nonev", 1, 4, 0.0))))
a = solve_user_equilibrium(s0, (1, 2), {1: 2.0, 2: 2.0}, SolveOptions(mode="endogenous"))
b = solve_user_equilibrium(s0, (1, 2), {1: 2.0, 2: 2.0}, SolveOptions(mode="exogenous"))
print("reduction equal:", a == b)

# exogenous with nonev demand
e = solve_user_equilibrium(s, (1, 2), {1: 2.0, 2: 2.0}, SolveOptions(mode="exogenous"))
print("exo:", e.station_flow, e.link_flow["nonev"], e.converged)
print("preload:", freeze_background(s))
