"""Random game structures for property checks."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..game import GameStructure


def _random_distribution(rng: np.random.Generator, states, deterministic: bool, denom: int = 6) -> dict:
    if deterministic:
        return {states[rng.integers(len(states))]: 1}
    # integer compositions keep the probabilities exact
    cuts = np.sort(rng.integers(0, denom + 1, size=len(states) - 1))
    parts = np.diff(np.concatenate([[0], cuts, [denom]]))
    return {s: str(Fraction(int(p), denom)) for s, p in zip(states, parts) if p > 0}


def random_game(
    rng: np.random.Generator,
    n_states: int = 3,
    max_moves: int = 2,
    mdp_for: int | None = None,
    deterministic: bool = False,
    n_vars: int = 1,
    name: str = "random",
) -> GameStructure:
    """A random valid game.

    ``mdp_for=i`` gives the opponent of player ``i`` a single move everywhere.
    Observation values are drawn from {0, 1/2, 1}.
    """
    states = [f"q{i}" for i in range(n_states)]
    variables = {
        f"x{v}": {s: str(Fraction(int(rng.integers(3)), 2)) for s in states} for v in range(n_vars)
    }
    moves1, moves2, delta = {}, {}, {}
    for s in states:
        n1 = 1 + int(rng.integers(max_moves))
        n2 = 1 + int(rng.integers(max_moves))
        if mdp_for == 1:
            n2 = 1
        elif mdp_for == 2:
            n1 = 1
        moves1[s] = [f"a{i}" for i in range(n1)]
        moves2[s] = [f"b{j}" for j in range(n2)]
        delta[s] = {
            a1: {a2: _random_distribution(rng, states, deterministic) for a2 in moves2[s]}
            for a1 in moves1[s]
        }
    return GameStructure(states, variables, moves1, moves2, delta, name=name)
