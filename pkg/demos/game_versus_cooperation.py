"""Game distances against cooperative ones.

fig2 and fig3 separate the game bisimulation metric from the metric in
which both players pick moves together; fig4 does the same for simulation.
"""

from gamemetrics import builtin_game, classical_bisim_kernel, game_bisim_kernel, iterate_metric

for name in ("fig2", "fig3"):
    g = builtin_game(name).game
    game = iterate_metric(g, "apriori-bisim")["s", "t"]
    coop = iterate_metric(g, "coop-bisim")["s", "t"]
    print(f"{name}: game {game:.3f}, cooperative {coop:.3f}")
    print("   game blocks:     ", game_bisim_kernel(g).blocks)
    print("   classical blocks:", classical_bisim_kernel(g).blocks)

g = builtin_game("fig4").game
for kind in ("apriori-sim", "coop-sim"):
    rep = iterate_metric(g, kind)
    print(f"fig4 {kind}: (s,t) = {rep['s', 't']:.3f}, (t,s) = {rep['t', 's']:.3f}")
