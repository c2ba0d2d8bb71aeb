"""Pure alternating simulation and the game kernel disagree both ways."""

from gamemetrics import alt_sim_pure, builtin_game, compare_relations, evaluate, parse_formula

reach = parse_formula("mu X. (u_flag | pre1(X))")
for name in ("fig5", "fig6"):
    g = builtin_game(name).game
    rep = compare_relations(g)
    print(f"{name}: alternating (s,t): {('s', 't') in alt_sim_pure(g)}, "
          f"game (s,t): {('s', 't') in rep.relations['game-sim']}")
    for mode in ("mixed", "pure"):
        v = evaluate(g, reach, mode=mode).as_dict(g)
        print(f"   reach u, {mode:5s}: s = {v['s']:.4f}, t = {v['t']:.4f}")
    for sep in rep.separations:
        if {sep["relation_a"], sep["relation_b"]} == {"game-sim", "alt-sim-pure"}:
            print("  ", sep["direction"], f"({sep['relation_a']} vs {sep['relation_b']})")
