"""Simulation and bisimulation metrics on game structures.

Three one-step transformers are provided:

* :func:`apriori_step` -- ``[s=t] max sup_{k in C(d)} (pre_i(k)(s) - pre_i(k)(t))``;
* :func:`aposteriori_step` -- the move-by-move form where the valuation is
  picked after all four mixed moves, i.e. a trans-shipping distance;
* :func:`coop_step` -- both players cooperate on each side.

``C(d)`` is the set of valuations ``k`` in ``[0,1]^S`` with
``k(u) - k(v) <= d(u, v)``.

Exact and approximate parts
---------------------------
The a priori supremum is not concave in ``k``.  For every fixed pair
(maximizer mix at ``s``, minimizer mix at ``t``) the remaining problem over
``k`` is a linear program, so those two mixes are enumerated on a simplex
grid and each grid point is solved exactly.  Every grid value is attained by
an actual valuation, so the result is a lower bound; the certified error is
half the L1 covering radius of each grid used (expectations of ``[0,1]``
valuations are 1/2-Lipschitz in L1).  When the opponent has a single move at
``s`` (resp. the maximizer has a single move at ``t``) the optimum sits at a
pure move and that grid collapses to the vertices, making the step exact.

The a posteriori step grids only the first mix; the remaining
``inf sup inf`` is one linear program because the opponent's best reply at
``t`` can be taken pure (the inner objective is convex in it).

:func:`brute_force_sup_over_C` enumerates ``k`` itself on a mesh and is kept
as an independent check of :func:`apriori_step`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .game import GameStructure, observation_metric
from .linopt import FEAS_TOL, LpProblem, game_value, solve_lp

DEFAULT_MESH = 0.05
DEFAULT_METRIC_ITERS = 50
KINDS = (
    "apriori-sim",
    "apriori-bisim",
    "aposteriori-sim",
    "aposteriori-bisim",
    "coop-sim",
    "coop-bisim",
)


# ---------------------------------------------------------------------------
# Directed metrics
# ---------------------------------------------------------------------------


def tighten(d) -> np.ndarray:
    """Shortest-path closure of ``d``.

    The result is the largest directed metric below ``d`` and defines the
    same constraint set ``C(d)``.
    """
    d = np.array(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("distance matrix must be square")
    if np.any(d < 0):
        raise ValueError("distance matrix has a negative entry")
    if np.any(np.abs(np.diag(d)) > 0):
        raise ValueError("distance matrix has a nonzero diagonal")
    for m in range(d.shape[0]):
        d = np.minimum(d, d[:, m, None] + d[None, m, :])
    return d


def opposite(d) -> np.ndarray:
    return np.asarray(d, dtype=float).T.copy()


def triangle_violation(d) -> float:
    """Largest amount by which ``d(s,u) <= d(s,t) + d(t,u)`` fails (0 if it holds)."""
    d = np.asarray(d, dtype=float)
    via = (d[:, :, None] + d[None, :, :]).min(axis=1)
    return float(max(0.0, (d - via).max()))


def in_C(k, d, tol: float = 1e-9) -> bool:
    k = np.asarray(k, dtype=float)
    if np.any(k < -tol) or np.any(k > 1 + tol):
        return False
    return bool(np.all(k[:, None] - k[None, :] <= np.asarray(d) + tol))


def extend_valuation(partial: dict[int, float], d: np.ndarray) -> np.ndarray:
    """Extend ``k`` given on some states to a member of ``C(d)`` (``d`` tightened)."""
    n = d.shape[0]
    idx = np.array(sorted(partial), dtype=int)
    vals = np.array([partial[i] for i in idx])
    k = np.maximum(0.0, (vals[:, None] - d[idx, :]).max(axis=0)) if idx.size else np.zeros(n)
    k[idx] = vals
    return np.clip(k, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Trans-shipping
# ---------------------------------------------------------------------------


@dataclass
class TransshipPlan:
    flow: np.ndarray
    cost: float


def transship_distance(p, q, d) -> tuple[float, TransshipPlan]:
    """Cheapest way to ship ``p`` into ``q`` when moving a unit from u to v costs ``d[u, v]``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d = np.asarray(d, dtype=float)
    n = p.shape[0]
    rows = np.flatnonzero(p > 0)
    cols = np.flatnonzero(q > 0)
    nr, nc = rows.size, cols.size
    cost = d[np.ix_(rows, cols)].ravel()
    A = []
    b = []
    for a, u in enumerate(rows):
        r = np.zeros(nr * nc)
        r[a * nc:(a + 1) * nc] = 1.0
        A.append(r)
        b.append(p[u])
    for c, v in enumerate(cols):
        r = np.zeros(nr * nc)
        r[c::nc] = 1.0
        A.append(r)
        b.append(q[v])
    res = solve_lp(LpProblem(cost, np.array(A), ("=",) * len(A), np.array(b)))
    if not res.optimal:  # pragma: no cover - the product plan is always feasible
        raise RuntimeError(f"trans-shipping LP returned {res.status}")
    flow = np.zeros((n, n))
    flow[np.ix_(rows, cols)] = res.x.reshape(nr, nc)
    value = float((flow * d).sum())
    return value, TransshipPlan(flow, value)


def dual_transship_by_vertices(p, q, d, max_states: int = 5) -> float:
    """``max_{k in C(d)} sum (p - q) k`` by enumerating every vertex of ``C(d)``.

    Exponential; intended as an independent check on small instances.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d = np.asarray(d, dtype=float)
    n = p.shape[0]
    if n > max_states:
        raise ValueError(f"vertex enumeration limited to {max_states} states")
    rows, rhs = [], []
    for a in range(n):
        e = np.zeros(n)
        e[a] = 1.0
        rows += [e, -e]
        rhs += [1.0, 0.0]
        for b in range(n):
            if a != b:
                r = np.zeros(n)
                r[a], r[b] = 1.0, -1.0
                rows.append(r)
                rhs.append(d[a, b])
    G = np.array(rows)
    h = np.array(rhs)
    w = p - q
    best = -np.inf
    for subset in itertools.combinations(range(len(rows)), n):
        M = G[list(subset)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        k = np.linalg.solve(M, h[list(subset)])
        if np.all(G @ k <= h + 1e-9):
            best = max(best, float(w @ k))
    return best


# ---------------------------------------------------------------------------
# Simplex grids
# ---------------------------------------------------------------------------


def grid_steps(mesh: float) -> int:
    if not mesh > 0:
        raise ValueError("mesh must be positive")
    return max(1, math.ceil(1.0 / mesh - 1e-9))


@lru_cache(maxsize=None)
def simplex_grid(n: int, steps: int) -> np.ndarray:
    """All points of the ``n``-vertex simplex with coordinates in multiples of ``1/steps``."""
    if n == 1:
        return np.ones((1, 1))
    pts = []
    for bars in itertools.combinations(range(steps + n - 1), n - 1):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(steps + n - 1 - prev - 1)
        pts.append(parts)
    out = np.array(pts, dtype=float) / steps
    out.setflags(write=False)
    return out


def simplex_radius(n: int, steps: int) -> float:
    """L1 distance within which every point of the simplex has a grid point."""
    if n == 1:
        return 0.0
    lo, hi = n // 2, n - n // 2
    return 2.0 * lo * hi / n / steps


def _mixes(n: int, steps: int, need_grid: bool) -> tuple[np.ndarray, float]:
    """Candidate mixes and the certified value error (half the L1 radius)."""
    if n == 1:
        return np.ones((1, 1)), 0.0
    if not need_grid:
        return np.eye(n), 0.0
    return simplex_grid(n, steps), simplex_radius(n, steps) / 2.0


# ---------------------------------------------------------------------------
# A priori transformer
# ---------------------------------------------------------------------------


@dataclass
class PairValue:
    value: float
    error: float = 0.0
    k: np.ndarray | None = None
    mixes: tuple = ()


def _relevant(g: GameStructure, s: str, t: str) -> np.ndarray:
    return np.array(sorted(set(g.successors[s]) | set(g.successors[t])), dtype=int)


def apriori_sup(
    g: GameStructure, d: np.ndarray, s: str, t: str, player: int = 1, mesh: float = DEFAULT_MESH
) -> PairValue:
    """``sup_{k in C(d)} pre_i(k)(s) - pre_i(k)(t)``, without the observation term.

    ``d`` must be a directed metric (see :func:`tighten`).  Returns the best
    value found, its certified error and an optimal valuation on all states.
    """
    j = 3 - player
    R = _relevant(g, s, t)
    r = R.size
    Ts = g.player_tensor(s, player)[:, :, R]  # (n_i(s), n_j(s), r)
    Tt = g.player_tensor(t, player)[:, :, R]  # (n_i(t), n_j(t), r)
    ni_s, nj_s = Ts.shape[:2]
    ni_t, nj_t = Tt.shape[:2]
    steps = grid_steps(mesh)
    xs, ex = _mixes(ni_s, steps, nj_s > 1)
    ys, ey = _mixes(nj_t, steps, ni_t > 1)

    # Fixed part of the LP: variables (k_R, z1, z2); maximize z1 - z2.
    dR = d[np.ix_(R, R)]
    diff_rows = []
    diff_rhs = []
    for a in range(r):
        for b in range(r):
            if a != b and dR[a, b] < 1.0:
                row = np.zeros(r + 2)
                row[a], row[b] = 1.0, -1.0
                diff_rows.append(row)
                diff_rhs.append(dR[a, b])
    c = np.zeros(r + 2)
    c[r], c[r + 1] = 1.0, -1.0
    bounds = tuple((0.0, 1.0) for _ in range(r)) + ((-np.inf, np.inf),) * 2
    n_rows = nj_s + ni_t + len(diff_rows)
    A = np.zeros((n_rows, r + 2))
    A[:nj_s, r] = 1.0
    A[nj_s:nj_s + ni_t, r + 1] = -1.0
    if diff_rows:
        A[nj_s + ni_t:] = np.array(diff_rows)
    b = np.zeros(n_rows)
    b[nj_s + ni_t:] = diff_rhs
    senses = ("<=",) * n_rows

    best = PairValue(0.0, ex + ey, None)
    best_val = -np.inf
    Ps = np.einsum("xa,abr->xbr", xs, Ts)  # per x: (nj_s, r)
    Qt = np.einsum("yb,abr->yar", ys, Tt)  # per y: (ni_t, r)
    for xi in range(xs.shape[0]):
        A[:nj_s, :r] = -Ps[xi]
        for yi in range(ys.shape[0]):
            A[nj_s:nj_s + ni_t, :r] = Qt[yi]
            res = solve_lp(LpProblem(c, A.copy(), senses, b, bounds, maximize=True))
            if res.value > best_val + 1e-12:
                best_val = res.value
                best = PairValue(res.value, ex + ey, res.x[:r].copy(), (xs[xi], ys[yi]))
    k_full = extend_valuation(dict(zip(R.tolist(), np.clip(best.k, 0, 1).tolist())), d)
    return PairValue(max(0.0, best.value), ex + ey, k_full, best.mixes)


@dataclass
class StepResult:
    values: np.ndarray
    errors: np.ndarray
    witnesses: dict = field(default_factory=dict)

    @property
    def certified_error(self) -> float:
        return float(self.errors.max()) if self.errors.size else 0.0


class _PairCache:
    """Memo of pair computations keyed by the distance entries they depend on."""

    def __init__(self):
        self.data: dict = {}

    def get(self, key, compute):
        if key not in self.data:
            self.data[key] = compute()
        return self.data[key]


def _key(tag, g, d, s, t, player, mesh, R=None):
    if R is None:
        R = _relevant(g, s, t)
    sub = np.round(d[np.ix_(R, R)], 12)
    return (tag, s, t, player, mesh, sub.tobytes())


def _step(g, d, pair_fn, tag, player, mesh, cache):
    d = np.asarray(d, dtype=float)
    obs = observation_metric(g)
    n = g.n
    values = obs.copy()
    errors = np.zeros((n, n))
    witnesses = {}
    for a, s in enumerate(g.states):
        for b, t in enumerate(g.states):
            if a == b or obs[a, b] >= 1.0:
                continue
            if cache is not None:
                pv = cache.get(_key(tag, g, d, s, t, player, mesh), lambda: pair_fn(g, d, s, t, player, mesh))
            else:
                pv = pair_fn(g, d, s, t, player, mesh)
            values[a, b] = max(obs[a, b], min(1.0, pv.value))
            errors[a, b] = pv.error
            witnesses[(s, t)] = pv
    return StepResult(values, errors, witnesses)


def apriori_step(g: GameStructure, d, player: int = 1, mesh: float = DEFAULT_MESH, cache=None) -> StepResult:
    """One application of the a priori simulation transformer for ``player``."""
    return _step(g, d, apriori_sup, "prio", player, mesh, cache)


# ---------------------------------------------------------------------------
# A posteriori transformer
# ---------------------------------------------------------------------------


def aposteriori_sup(
    g: GameStructure, d: np.ndarray, s: str, t: str, player: int = 1, mesh: float = DEFAULT_MESH
) -> PairValue:
    """``sup_{x_i} inf_{y_i} sup_{y_j} inf_{x_j} D(delta(s,x), delta(t,y))(d)`` (no observation term)."""
    Rs = np.array(g.successors[s], dtype=int)
    Rt = np.array(g.successors[t], dtype=int)
    Ts = g.player_tensor(s, player)[:, :, Rs]  # (ni_s, nj_s, |Rs|)
    Tt = g.player_tensor(t, player)[:, :, Rt]  # (ni_t, nj_t, |Rt|)
    ni_s, nj_s = Ts.shape[:2]
    ni_t, nj_t = Tt.shape[:2]
    ns, nt = Rs.size, Rt.size
    cost = d[np.ix_(Rs, Rt)].ravel()
    steps = grid_steps(mesh)
    xs, ex = _mixes(ni_s, steps, nj_s > 1)

    # variables: y (ni_t) | per b in nj_t: w_b (nj_s), lam_b (ns*nt) | z
    block = nj_s + ns * nt
    nvar = ni_t + nj_t * block + 1
    zi = nvar - 1
    c = np.zeros(nvar)
    c[zi] = 1.0
    rows, senses, rhs = [], [], []

    def new_row():
        return np.zeros(nvar)

    r = new_row()
    r[:ni_t] = 1.0
    rows.append(r), senses.append("="), rhs.append(1.0)
    marg_rows = []  # rows whose w-coefficients depend on x
    for bj in range(nj_t):
        off = ni_t + bj * block
        w = slice(off, off + nj_s)
        lam = off + nj_s
        r = new_row()
        r[w] = 1.0
        rows.append(r), senses.append("="), rhs.append(1.0)
        r = new_row()
        r[zi] = 1.0
        r[lam:lam + ns * nt] = -cost
        rows.append(r), senses.append(">="), rhs.append(0.0)
        for u in range(ns):
            r = new_row()
            r[lam + u * nt:lam + (u + 1) * nt] = 1.0
            marg_rows.append((len(rows), w, u))
            rows.append(r), senses.append("="), rhs.append(0.0)
        for v in range(nt):
            r = new_row()
            r[lam + v:lam + ns * nt:nt] = 1.0
            r[:ni_t] = -Tt[:, bj, v]
            rows.append(r), senses.append("="), rhs.append(0.0)
    A = np.array(rows)
    b = np.array(rhs)
    senses = tuple(senses)

    best_val, best_x = -np.inf, None
    Px = np.einsum("xa,abu->xbu", xs, Ts)  # per x: (nj_s, ns)
    for xi in range(xs.shape[0]):
        for row, w, u in marg_rows:
            A[row, w] = -Px[xi, :, u]
        res = solve_lp(LpProblem(c, A.copy(), senses, b))
        if res.value > best_val + 1e-12:
            best_val, best_x = res.value, xs[xi]
    return PairValue(max(0.0, best_val), ex, None, (best_x,))


def aposteriori_step(g: GameStructure, d, player: int = 1, mesh: float = DEFAULT_MESH, cache=None) -> StepResult:
    """One application of the a posteriori simulation transformer for ``player``."""
    d = np.asarray(d, dtype=float)
    return _step(g, d, aposteriori_sup, "post", player, mesh, cache)


# ---------------------------------------------------------------------------
# Cooperative transformer
# ---------------------------------------------------------------------------


def coop_sup(g: GameStructure, d: np.ndarray, s: str, t: str, player: int = 1, mesh: float = DEFAULT_MESH) -> PairValue:
    """``sup_k sup_{x1,x2} inf_{y1,y2} E_s(k) - E_t(k)``: exact, no grids.

    For a fixed ``k`` the joint sup and inf are attained at pure move pairs;
    swapping ``sup_k`` with the min over ``t``'s pure pairs turns each pure
    pair at ``s`` into a trans-shipping problem against the convex hull of
    ``t``'s successor distributions.
    """
    Rs = np.array(g.successors[s], dtype=int)
    Rt = np.array(g.successors[t], dtype=int)
    Ts = g.tensors[s][:, :, Rs].reshape(-1, Rs.size)
    Tt = g.tensors[t][:, :, Rt].reshape(-1, Rt.size)
    ns, nt = Rs.size, Rt.size
    m = Tt.shape[0]
    cost = d[np.ix_(Rs, Rt)].ravel()
    nvar = m + ns * nt
    c = np.zeros(nvar)
    c[m:] = cost
    rows, rhs_idx = [], []
    r = np.zeros(nvar)
    r[:m] = 1.0
    rows.append(r)
    for u in range(ns):
        r = np.zeros(nvar)
        r[m + u * nt:m + (u + 1) * nt] = 1.0
        rows.append(r)
    for v in range(nt):
        r = np.zeros(nvar)
        r[m + v::nt] = 1.0
        r[:m] = -Tt[:, v]
        rows.append(r)
    A = np.array(rows)
    senses = ("=",) * len(rows)
    best = 0.0
    for p in Ts:
        b = np.concatenate([[1.0], p, np.zeros(nt)])
        res = solve_lp(LpProblem(c, A, senses, b))
        best = max(best, res.value)
    return PairValue(best, 0.0)


def coop_step(g: GameStructure, d, player: int = 1, mesh: float = DEFAULT_MESH, cache=None) -> StepResult:
    """One application of the cooperative simulation transformer (``player`` is ignored)."""
    return _step(g, np.asarray(d, dtype=float), coop_sup, "coop", 0, mesh, cache)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

BRUTE_FORCE_LIMIT = 10**7


def brute_force_sup_over_C(
    g: GameStructure, d, s: str, t: str, player: int = 1, mesh: float = DEFAULT_MESH
) -> tuple[float, float]:
    """Bracket ``sup_{k in C(d)} pre_i(k)(s) - pre_i(k)(t)`` by enumerating ``k``.

    Each mesh point of ``[0,1]^m`` (``m`` = successor states of ``s`` and
    ``t``, with zero-distance states merged) is moved to the nearest point of
    ``C(d)`` in sup-norm.  The best value is a lower bound; adding one mesh
    width gives an upper bound, because every ``k`` in ``C(d)`` lies, up to a
    constant shift, within half a mesh width of some projected point and the
    difference of two ``pre`` values is 2-Lipschitz.
    """
    d = tighten(d)
    R = _relevant(g, s, t)
    groups: list[list[int]] = []
    for a in R:
        for grp in groups:
            if d[a, grp[0]] <= 1e-12 and d[grp[0], a] <= 1e-12:
                grp.append(int(a))
                break
        else:
            groups.append([int(a)])
    reps = np.array([grp[0] for grp in groups])
    steps = grid_steps(mesh)
    m = reps.size
    if (steps + 1) ** m > BRUTE_FORCE_LIMIT:
        raise ValueError(f"grid of {(steps + 1) ** m} points exceeds the brute-force limit")
    axis = np.arange(steps + 1) / steps
    pts = np.array(list(itertools.product(axis, repeat=m)))
    dR = d[np.ix_(reps, reps)]
    eps = np.maximum(0.0, (pts[:, :, None] - pts[:, None, :] - dR[None]).max(axis=(1, 2)) / 2.0)
    proj = np.maximum(0.0, (pts[:, :, None] - eps[:, None, None] - dR[None]).max(axis=1))
    K = np.zeros((pts.shape[0], g.n))
    for col, grp in enumerate(groups):
        K[:, grp] = proj[:, col:col + 1]
    Ms = np.einsum("abx,px->pab", g.player_tensor(s, player), K)
    Mt = np.einsum("abx,px->pab", g.player_tensor(t, player), K)
    best = 0.0
    for P, Q in zip(Ms, Mt):
        best = max(best, game_value(P) - game_value(Q))
    return best, best + 1.0 / steps


# ---------------------------------------------------------------------------
# Picard iteration
# ---------------------------------------------------------------------------

_STEPS = {"apriori": apriori_step, "aposteriori": aposteriori_step, "coop": coop_step}


@dataclass
class MetricReport:
    kind: str
    player: int
    states: tuple[str, ...]
    metric: np.ndarray
    iterations: int
    last_delta: float
    converged: bool
    mesh: float
    certified_error: float
    history: list[np.ndarray] = field(default_factory=list)
    raw_last: np.ndarray | None = None

    def __getitem__(self, pair: tuple[str, str]) -> float:
        s, t = pair
        return float(self.metric[self.states.index(s), self.states.index(t)])

    def zero_set(self, threshold: float | None = None) -> set[tuple[str, str]]:
        thr = self.certified_error + 1e-6 if threshold is None else threshold
        return {
            (s, t)
            for a, s in enumerate(self.states)
            for b, t in enumerate(self.states)
            if self.metric[a, b] <= thr
        }

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "player": self.player,
            "states": list(self.states),
            "matrix": self.metric.tolist(),
            "iterations": self.iterations,
            "last_delta": self.last_delta,
            "converged": self.converged,
            "mesh": self.mesh,
            "certified_error": self.certified_error,
        }


def iterate_metric(
    g: GameStructure,
    kind: str = "apriori-bisim",
    player: int = 1,
    iters: int = DEFAULT_METRIC_ITERS,
    tol: float = 1e-6,
    mesh: float = DEFAULT_MESH,
) -> MetricReport:
    """Picard iteration of the chosen transformer from the bottom metric.

    The first step from the all-zero metric always yields the observation
    distance, so iteration starts there and ``iters`` counts further steps
    (``iters=0`` returns the observation distance).  Bisimulation kinds
    symmetrize every step with its opposite; every iterate is tightened.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown metric kind {kind!r}; expected one of {', '.join(KINDS)}")
    if player not in (1, 2):
        raise ValueError("player must be 1 or 2")
    if iters < 0 or tol <= 0 or mesh <= 0:
        raise ValueError("iters must be >= 0, tol and mesh positive")
    family, flavour = kind.split("-")
    step = _STEPS[family]
    cache = _PairCache()
    d = tighten(observation_metric(g))
    history = [d]
    delta = 0.0 if iters == 0 else np.inf
    err = 0.0
    raw = None
    n_done = 0
    for _ in range(iters):
        res = step(g, d, player, mesh, cache)
        raw = res.values
        errs = res.errors
        if flavour == "bisim":
            raw = np.maximum(raw, raw.T)
            errs = np.maximum(errs, errs.T)
        err = max(err, float(errs.max()))
        new = tighten(raw)
        delta = float(np.abs(new - d).max())
        d = new
        history.append(d)
        n_done += 1
        if delta < tol:
            break
    return MetricReport(
        kind=kind,
        player=player,
        states=g.states,
        metric=d,
        iterations=n_done,
        last_delta=delta,
        converged=bool(delta < tol),
        mesh=mesh,
        certified_error=err,
        history=history,
        raw_last=raw,
    )
