"""Random closed formulas for property testing."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .syntax import And, Const, Fix, Formula, Not, Obs, Or, Pre, Shift, Var

_CONSTS = (0.0, 0.25, 0.5, 0.75, 1.0)


def random_formula(
    rng: np.random.Generator,
    variables: Sequence[str],
    depth: int = 3,
    players: Sequence[int] = (1, 2),
    positive: bool = False,
    fixpoints: bool = True,
) -> Formula:
    """A closed formula of operator depth at most ``depth``.

    ``positive`` restricts negation to observation variables; ``players``
    lists the allowed ``pre`` operators.  Bound variables only appear under
    an even number of negations below their binder.
    """
    variables = list(variables)
    players = list(players)

    def leaf(bound: list[tuple[str, int]], parity: int) -> Formula:
        usable = [x for x, p in bound if p == parity]
        roll = rng.random()
        if usable and roll < 0.4:
            return Var(usable[rng.integers(len(usable))])
        if variables and roll < 0.8:
            v = Obs(variables[rng.integers(len(variables))])
            return Not(v) if positive and rng.random() < 0.3 else v
        return Const(float(_CONSTS[rng.integers(len(_CONSTS))]))

    def go(d: int, bound: list[tuple[str, int]], parity: int) -> Formula:
        if d == 0 or rng.random() < 0.15:
            return leaf(bound, parity)
        ops = ["or", "and", "shift"]
        if players:
            ops += ["pre", "pre"]
        if not positive:
            ops.append("not")
        if fixpoints and len(bound) < 2:
            ops.append("fix")
        op = ops[rng.integers(len(ops))]
        if op == "or":
            return Or(go(d - 1, bound, parity), go(d - 1, bound, parity))
        if op == "and":
            return And(go(d - 1, bound, parity), go(d - 1, bound, parity))
        if op == "shift":
            amount = float(_CONSTS[1 + rng.integers(3)])
            return Shift(go(d - 1, bound, parity), amount, bool(rng.random() < 0.5))
        if op == "pre":
            return Pre(int(players[rng.integers(len(players))]), go(d - 1, bound, parity))
        if op == "not":
            return Not(go(d - 1, bound, 1 - parity))
        name = "XYZ"[len(bound)]
        kind = "mu" if rng.random() < 0.5 else "nu"
        return Fix(kind, name, go(d - 1, bound + [(name, parity)], parity))

    return go(depth, [], 0)
