"""One-step predecessor operators and evaluation of mu-calculus formulas."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..game import GameStructure
from ..linopt import game_value
from .syntax import (
    And,
    Const,
    Fix,
    Formula,
    FormulaError,
    Not,
    Obs,
    Or,
    Pre,
    Shift,
    Var,
    free_variables,
)

MIXED = "mixed"
PURE = "pure"


def _payoffs(g: GameStructure, s: str, player: int, k: np.ndarray) -> np.ndarray:
    return g.player_tensor(s, player) @ k


def pre(g: GameStructure, player: int, k) -> np.ndarray:
    """Value player ``player`` can guarantee for the expectation of ``k`` after one step."""
    k = np.asarray(k, dtype=float)
    return np.array([game_value(_payoffs(g, s, player, k)) for s in g.states])


def dpre(g: GameStructure, player: int, k) -> np.ndarray:
    """:func:`pre` with both players restricted to pure moves."""
    k = np.asarray(k, dtype=float)
    return np.array([_payoffs(g, s, player, k).min(axis=1).max() for s in g.states])


@dataclass
class FixpointStats:
    kind: str
    var: str
    runs: int = 0
    max_iterations: int = 0
    last_delta: float = 0.0
    converged: bool = True


@dataclass
class Evaluation:
    values: np.ndarray
    fixpoints: list[FixpointStats] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return all(fp.converged for fp in self.fixpoints)

    def as_dict(self, g: GameStructure) -> dict[str, float]:
        return {s: float(v) for s, v in zip(g.states, self.values)}


def evaluate(
    g: GameStructure,
    f: Formula,
    env: Mapping[str, np.ndarray] | None = None,
    mode: str = MIXED,
    tol: float = 1e-6,
    max_iters: int = 10000,
) -> Evaluation:
    """Valuation defined by ``f`` on ``g``.

    Fixpoints are computed by Picard iteration: ``mu`` from the all-zero
    valuation, ``nu`` from the all-one valuation, until the sup-norm change
    drops below ``tol`` or ``max_iters`` is reached.  Non-convergence is
    reported in the returned statistics, never raised.  ``mode="pure"`` uses
    :func:`dpre` for the ``pre`` operators.
    """
    if mode not in (MIXED, PURE):
        raise ValueError(f"unknown semantics {mode!r}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    env = {k: np.asarray(v, dtype=float) for k, v in (env or {}).items()}
    missing = free_variables(f) - set(env)
    if missing:
        raise FormulaError(f"unbound calculus variable {sorted(missing)[0]!r}")
    step = dpre if mode == PURE else pre
    n = g.n
    obs_rows = {v: g.obs[i] for i, v in enumerate(g.var_interp)}
    stats: dict[int, FixpointStats] = {}
    closed_cache: dict[int, np.ndarray] = {}
    free_memo: dict[int, bool] = {}

    def is_closed(h: Formula) -> bool:
        key = id(h)
        if key not in free_memo:
            free_memo[key] = not free_variables(h)
        return free_memo[key]

    def ev(h: Formula, xi: dict[str, np.ndarray]) -> np.ndarray:
        cacheable = not isinstance(h, (Const, Obs, Var)) and is_closed(h)
        if cacheable and id(h) in closed_cache:
            return closed_cache[id(h)]
        out = _ev(h, xi)
        if cacheable:
            closed_cache[id(h)] = out
        return out

    def _ev(h: Formula, xi: dict[str, np.ndarray]) -> np.ndarray:
        if isinstance(h, Const):
            return np.full(n, float(h.value))
        if isinstance(h, Obs):
            if h.name not in obs_rows:
                raise FormulaError(f"unknown observation variable {h.name!r}")
            return obs_rows[h.name]
        if isinstance(h, Var):
            return xi[h.name]
        if isinstance(h, Not):
            return 1.0 - ev(h.body, xi)
        if isinstance(h, Or):
            return np.maximum(ev(h.left, xi), ev(h.right, xi))
        if isinstance(h, And):
            return np.minimum(ev(h.left, xi), ev(h.right, xi))
        if isinstance(h, Shift):
            delta = h.amount if h.up else -h.amount
            return np.clip(ev(h.body, xi) + delta, 0.0, 1.0)
        if isinstance(h, Pre):
            return step(g, h.player, ev(h.body, xi))
        if isinstance(h, Fix):
            st = stats.setdefault(id(h), FixpointStats(h.kind, h.var))
            cur = np.zeros(n) if h.kind == "mu" else np.ones(n)
            delta = np.inf
            it = 0
            while it < max_iters:
                nxt = ev(h.body, {**xi, h.var: cur})
                it += 1
                delta = float(np.abs(nxt - cur).max())
                cur = nxt
                if delta < tol:
                    break
            st.runs += 1
            st.max_iterations = max(st.max_iterations, it)
            st.last_delta = max(st.last_delta, delta) if st.runs > 1 else delta
            st.converged = st.converged and delta < tol
            return cur
        raise TypeError(f"not a formula: {h!r}")

    values = ev(f, env)
    return Evaluation(np.array(values, dtype=float), list(stats.values()))
