"""Search small instances for endogenous/exogenous placement divergence.

Topology: EV origin 1 -> dest 3. Short corridor via node 2 (candidate A),
long corridor via node 4 (candidate B), plus a direct relief link 1->3 that
only non-EV traffic can meaningfully use. Non-EV background loads the short
corridor when EVs are absent; endogenously it yields to charging traffic.
"""
import itertools
import time

from chargemarket import *

P_MIN, P_MAX, GRID = 0.0, 12.0, 49


def make(t_direct, cap_a, d_n, d_e, outside, kappa, t_b_extra, site_cost):
    params = EconomicParams(vot=1.0, energy=1.0, outside_cost=outside,
                            p_min=P_MIN, p_max=P_MAX, grid=GRID)
    links = (
        Link(1, 1, 2, LatencyFn.bpr(2.0, cap_a, 0.5, 2.0)),
        Link(2, 2, 3, LatencyFn.bpr(2.0, cap_a, 0.5, 2.0)),
        Link(3, 1, 4, LatencyFn.bpr(2.0 + t_b_extra, 60.0, 0.15, 2.0)),
        Link(4, 4, 3, LatencyFn.bpr(2.0 + t_b_extra, 60.0, 0.15, 2.0)),
        Link(5, 1, 3, LatencyFn.bpr(t_direct, 60.0, 0.15, 2.0)),
    )
    return validate_scenario(Scenario(
        nodes=tuple(Node(i) for i in (1, 2, 3, 4)),
        links=links,
        stations=(Station(1, 1, 2, 1.0, kappa, 2.0, "candidate"),
                  Station(2, 1, 4, 1.0, kappa, 2.0, "candidate")),
        providers=(Provider(1, "entrant", 0.5, site_cost),),
        demand=(DemandEntry("ev", 1, 3, d_e), DemandEntry("nonev", 1, 3, d_n)),
        params=params,
    ))


popt = PricingOptions(damping=1.0, refinement=20)
sopt = SolveOptions(gap_tol=1e-7, max_iter=20000)

grid = {
    "t_direct": [5.0, 6.0],
    "cap_a": [20.0, 30.0],
    "d_n": [30.0, 45.0],
    "d_e": [15.0, 25.0],
    "outside": [18.0, 24.0],
    "kappa": [25.0],
    "t_b_extra": [2.0, 4.0],
    "site_cost": [5.0],
}
keys = list(grid)
hits = []
t_start = time.time()
for combo in itertools.product(*(grid[k] for k in keys)):
    kw = dict(zip(keys, combo))
    sc = make(**kw)
    try:
        rep = run_endogeneity_comparison(sc, 1, popt, sopt)
    except ValueError as exc:
        print("skip", kw, exc)
        continue
    conv = all(r.converged for side in (rep.endogenous, rep.exogenous) for r in side.table)
    tag = ""
    if not rep.same_placement and abs(rep.profit_delta_rel) >= 0.05 and conv:
        tag = "  <== HIT"
        hits.append(kw)
    print({k: kw[k] for k in ("t_direct", "cap_a", "d_n", "d_e", "outside", "t_b_extra")},
          "endo", rep.endogenous.best.ids, round(rep.endogenous.profit, 2),
          "exo", rep.exogenous.best.ids, round(rep.exogenous.profit, 2),
          "rel %.3f" % rep.profit_delta_rel, "conv", conv, tag)
print("hits:", len(hits), "in %.0fs" % (time.time() - t_start))
