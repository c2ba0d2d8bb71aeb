"""Formulas that witness a priori simulation distances.

Given a valuation ``k`` in ``C(d_n)`` that realizes the one-step distance
at ``(s, t)``, a formula whose value is squeezed between ``k`` and
``k + slack`` on all successors is assembled from depth-``n`` witnesses:

* for each pair ``(s', t')`` the witness for ``(s', t')`` is shifted so it
  takes the value ``k(s')`` at ``s'``; it is then at most ``k(t')`` at
  ``t'`` (or the constant ``k(s')`` is used when already ``<= k(t')``);
* the conjunction over ``t'`` is exactly ``k(s')`` at ``s'``;
* the disjunction over ``s'`` follows ``k`` on the successors;
* one ``pre_i`` on top carries the gap to ``(s, t)``.

Subformulas are shared across pairs, so the result is a DAG whose size grows
polynomially with the depth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..game import GameStructure
from ..metrics import DEFAULT_MESH, apriori_sup, iterate_metric, observation_metric
from .semantics import pre
from .syntax import And, Const, Formula, Not, Obs, Or, Pre, formula_size, shift


@dataclass
class Witness:
    formula: Formula
    gap: float  # value at s minus value at t
    target: float  # d_n(s, t)
    size: int


def synthesize_witness(
    g: GameStructure,
    s: str,
    t: str,
    n: int,
    eps: float = 0.05,
    player: int = 1,
    mesh: float = DEFAULT_MESH,
) -> Formula:
    """Closed positive player-``player`` formula separating ``s`` from ``t``.

    Its value at ``s`` exceeds its value at ``t`` by at least
    ``d_n(s, t) - eps``, where ``d_n`` is the ``n``-th a priori simulation
    iterate for ``player`` (``d_0`` is the observation distance).  The
    ``pre`` nesting depth is at most ``n``.
    """
    return witness_report(g, s, t, n, eps, player, mesh).formula


def witness_report(
    g: GameStructure,
    s: str,
    t: str,
    n: int,
    eps: float = 0.05,
    player: int = 1,
    mesh: float = DEFAULT_MESH,
) -> Witness:
    """:func:`synthesize_witness` together with the achieved gap and the target distance."""
    if n < 0:
        raise ValueError("depth must be nonnegative")
    if not eps > 0:
        raise ValueError("eps must be positive")
    if s == t:
        raise ValueError("witness needs two distinct states")
    report = iterate_metric(g, "apriori-sim", player, iters=n, tol=1e-12, mesh=mesh)
    history = report.history
    obs = observation_metric(g)
    memo: dict[tuple[int, int, int], tuple[Formula, np.ndarray]] = {}

    def level_metric(m: int) -> np.ndarray:
        return history[min(m, len(history) - 1)]

    def base(a: int, b: int) -> tuple[Formula, np.ndarray]:
        if not g.var_interp:
            return Const(0.0), np.zeros(g.n)
        diffs = g.obs[:, a] - g.obs[:, b]
        v = int(np.argmax(np.abs(diffs)))
        name = g.variables[v]
        if diffs[v] >= 0:
            return Obs(name), g.obs[v].copy()
        return Not(Obs(name)), 1.0 - g.obs[v]

    def build(a: int, b: int, m: int) -> tuple[Formula, np.ndarray]:
        key = (a, b, m)
        if key in memo:
            return memo[key]
        out = base(a, b)
        if m > 0:
            d = level_metric(m - 1)
            pv = apriori_sup(g, d, g.states[a], g.states[b], player, mesh)
            if pv.value > obs[a, b] + 1e-12:
                k = pv.k
                R = sorted(set(g.successors[g.states[a]]) | set(g.successors[g.states[b]]))
                disj: list[tuple[Formula, np.ndarray]] = []
                for u in R:
                    conj: list[tuple[Formula, np.ndarray]] = []
                    for w in R:
                        if k[u] <= k[w] + 1e-12:
                            conj.append((Const(float(k[u])), np.full(g.n, float(k[u]))))
                            continue
                        f, val = build(u, w, m - 1)
                        amount = float(k[u] - val[u])
                        conj.append((shift(f, amount), np.clip(val + amount, 0.0, 1.0)))
                    disj.append(_fold(conj, And, np.minimum))
                body, body_val = _fold(disj, Or, np.maximum)
                out = (Pre(player, body), pre(g, player, body_val))
        memo[key] = out
        return out

    a, b = g.index[s], g.index[t]
    f, val = build(a, b, n)
    return Witness(f, float(val[a] - val[b]), float(level_metric(n)[a, b]), formula_size(f))


def _fold(parts, node, op):
    """Combine with ``node``, dropping neutral constants and repeats (value-preserving)."""
    unit, absorb = (1.0, 0.0) if node is And else (0.0, 1.0)
    kept: list[tuple[Formula, np.ndarray]] = []
    for f, v in parts:
        if isinstance(f, Const) and f.value == absorb:
            return f, v
        if isinstance(f, Const) and f.value == unit:
            continue
        if all(f != k for k, _ in kept):
            kept.append((f, v))
    if not kept:  # every part was the unit constant
        return parts[0]
    f, v = kept[0]
    for g, w in kept[1:]:
        f, v = node(f, g), op(v, w)
    return f, v
