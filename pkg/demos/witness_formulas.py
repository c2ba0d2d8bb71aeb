"""Distances are attained by formulas.

For each pair the witness is a closed positive formula whose value gap
matches the simulation distance up to the requested slack.
"""

from gamemetrics import builtin_game, evaluate, iterate_metric
from gamemetrics.qmu import format_formula, witness_report

for name, player in (("fig2", 2), ("fig4", 1)):
    g = builtin_game(name).game
    n = iterate_metric(g, "apriori-sim", player).iterations
    for s, t in (("s", "t"), ("t", "s")):
        w = witness_report(g, s, t, n, eps=0.05, player=player)
        v = evaluate(g, w.formula).as_dict(g)
        text = format_formula(w.formula)
        if len(text) > 70:
            text = text[:67] + "..."
        print(f"{name} player {player} ({s},{t}): d = {w.target:.3f}, gap = {v[s] - v[t]:.3f}, size {w.size}")
        print("   ", text)
