"""When the valuation is fixed matters.

On fig1 the a priori distance from s to t is zero, yet once the valuation
may be chosen after the moves the distance becomes 1/18.  The same game
shows the a posteriori distance is not symmetric in the players.
"""

import numpy as np

from gamemetrics import builtin_game, evaluate, iterate_metric, parse_formula

g = builtin_game("fig1").game
print(builtin_game("fig1").notes["summary"])

for kind in ("apriori-sim", "aposteriori-sim"):
    for player in (1, 2):
        rep = iterate_metric(g, kind, player)
        print(f"{kind:16s} player {player}: (s,t) = {rep['s', 't']:.4f}  (t,s) = {rep['t', 's']:.4f}"
              f"  error <= {rep.certified_error:.3f}")

# the one-step reason for the (t,s) gap: player 1 secures more w-mass at t
v = evaluate(g, parse_formula("pre1(w_flag)")).as_dict(g)
print("pre1(w_flag):", {s: round(x, 4) for s, x in v.items()})

# both players put weight alpha on their first move at t; alpha = 1/2 reproduces s
w = g.index["w"]
T = g.tensors["t"][:, :, w]
print("first moves at t:", g.moves1["t"][0], g.moves2["t"][0])
for alpha in np.linspace(0, 1, 5):
    x = np.array([alpha, 1 - alpha])
    print(f"alpha = {alpha:.2f}: mass to w = {x @ T @ x:.4f}")
