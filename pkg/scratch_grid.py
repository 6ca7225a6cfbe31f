"""Generate grid5.scn and measure Frank-Wolfe convergence."""
import sys
import time

CAP = float(sys.argv[1]) if len(sys.argv) > 1 else 40.0
BETA = float(sys.argv[2]) if len(sys.argv) > 2 else 2.0
ALPHA = 0.15


def node(r, c):
    return 5 * r + c + 1


def build(path):
    lines = ["version 1",
             "# 5x5 grid, bidirectional streets, two incumbents and four candidate sites.",
             "[params]", "vot 1", "energy 1", "outside_cost 40",
             "[nodes]"]
    for i in range(1, 26):
        lines.append(str(i))
    lines.append("[links]")
    lid = 0
    # deterministic free-flow variation breaks route-cost degeneracy
    def t0_for(a, b):
        return round(1.8 + 0.13 * ((3 * a + 5 * b) % 7), 2)
    for r in range(5):
        for c in range(5):
            u = node(r, c)
            if c < 4:
                v = node(r, c + 1)
                for a, b in ((u, v), (v, u)):
                    lid += 1
                    lines.append(f"{lid} {a} {b} bpr {t0_for(a,b)} {CAP} {ALPHA} {BETA}")
            if r < 4:
                v = node(r + 1, c)
                for a, b in ((u, v), (v, u)):
                    lid += 1
                    lines.append(f"{lid} {a} {b} bpr {t0_for(a,b)} {CAP} {ALPHA} {BETA}")
    lines += ["[providers]",
              "1 incumbent 0.5 0",
              "2 incumbent 0.5 0",
              "3 entrant 0.5 2",
              "[stations]",
              "1 1 13 1.5 35 2 open",
              "2 2 8 1.2 25 2 open",
              "3 2 18 1.8 30 2 open",
              "4 3 7 1.5 30 2 candidate",
              "5 3 9 1.5 30 2 candidate",
              "6 3 17 1.5 30 2 candidate",
              "7 3 19 1.5 30 2 candidate",
              "[demand]",
              "ev 1 25 15",
              "ev 21 5 12",
              "ev 3 23 10",
              "ev 11 15 8",
              "ev 5 21 10",
              "nonev 1 25 20",
              "nonev 25 1 15",
              "nonev 21 5 15",
              "nonev 6 10 10",
              "nonev 16 20 10",
              "[pricing]",
              "p_min 0",
              "p_max 10",
              "grid 21"]
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


build("/root/pkg/src/chargemarket/scenarios/grid5.scn")

from chargemarket import *

sc = load_bundled("grid5")
prices = {1: 5.0, 2: 5.0, 3: 5.0}
t0 = time.time()
fs = solve_user_equilibrium(sc, sc.open_station_ids(), prices,
                            SolveOptions(gap_tol=1e-6, max_iter=10000))
dt = time.time() - t0
print(f"cap={CAP} beta={BETA}: iters={fs.iterations} gap={fs.gap:.2e} conv={fs.converged} {dt:.1f}s")
print("stations", {k: round(v, 2) for k, v in fs.station_flow.items()},
      "optout", {k: round(v, 2) for k, v in fs.opt_out.items()})
tr = fs.beckmann_trace
print("descent ok:", all(b <= a + 1e-9 * max(1, abs(a)) for a, b in zip(tr, tr[1:])))
vc = max((fs.link_flow['ev'][l.id]+fs.link_flow['nonev'][l.id])/l.latency.capacity for l in sc.links)
print("max v/c:", round(vc, 3))
