"""Dense two-phase simplex and zero-sum matrix games.

Problems solved here are tiny (tens of variables), so a dense tableau with
Bland's anti-cycling rule is used throughout.  Results are deterministic for
identical input.

Two tolerances are global:

``PIVOT_TOL``
    entries smaller than this are treated as zero when choosing pivots and
    reduced costs.
``FEAS_TOL``
    slack allowed when declaring a point feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_SENSES = ("<=", "=", ">=")


class LpError(ValueError):
    """Malformed linear program."""


@dataclass(frozen=True)
class LpProblem:
    """``min`` (or ``max``) ``c @ x`` subject to tagged rows and bounds.

    ``senses[i]`` is one of ``"<="``, ``"="``, ``">="``.  ``bounds`` holds one
    ``(lo, hi)`` pair per variable; ``None`` or infinities mean unbounded on
    that side.  Default bounds are ``(0, inf)``.
    """

    c: np.ndarray
    A: np.ndarray
    senses: tuple[str, ...]
    b: np.ndarray
    bounds: tuple[tuple[float, float], ...] | None = None
    maximize: bool = False

    @classmethod
    def build(
        cls,
        c: Sequence[float],
        rows: Sequence[tuple[Sequence[float], str, float]] = (),
        bounds: Sequence[tuple[float | None, float | None]] | None = None,
        maximize: bool = False,
    ) -> "LpProblem":
        c = np.asarray(c, dtype=float)
        n = c.shape[0]
        A = np.array([r[0] for r in rows], dtype=float).reshape(len(rows), n)
        senses = tuple(r[1] for r in rows)
        b = np.array([r[2] for r in rows], dtype=float)
        if bounds is not None:
            bounds = tuple(
                (-np.inf if lo is None else float(lo), np.inf if hi is None else float(hi))
                for lo, hi in bounds
            )
        return cls(c, A, senses, b, bounds, maximize)

    def check(self) -> None:
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 1:
            raise LpError("objective must be a vector")
        n = c.shape[0]
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2 or A.shape[1] != n:
            raise LpError(f"constraint matrix has shape {A.shape}, expected (m, {n})")
        if len(self.senses) != A.shape[0] or np.asarray(self.b).shape != (A.shape[0],):
            raise LpError("senses / right-hand side do not match the constraint rows")
        bad = [s for s in self.senses if s not in _SENSES]
        if bad:
            raise LpError(f"unknown constraint sense {bad[0]!r}")
        if self.bounds is not None and len(self.bounds) != n:
            raise LpError("one (lo, hi) bound pair is required per variable")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(self.b))):
            raise LpError("coefficients must be finite")


@dataclass
class LpResult:
    status: str
    value: float = float("nan")
    x: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Row-reduced tableau for ``min c@x, A x = b, x >= 0, b >= 0``."""

    def __init__(self, A: np.ndarray, b: np.ndarray, basis: list[int]):
        m, n = A.shape
        self.T = np.zeros((m + 1, n + 1))
        self.T[:m, :n] = A
        self.T[:m, n] = b
        self.basis = list(basis)

    def set_objective(self, c: np.ndarray) -> None:
        m = len(self.basis)
        obj = np.zeros(self.T.shape[1])
        obj[: c.shape[0]] = c
        for i, j in enumerate(self.basis):
            if obj[j] != 0.0:
                obj -= obj[j] * self.T[i]
        self.T[m] = obj

    def pivot(self, r: int, col: int) -> None:
        T = self.T
        T[r] /= T[r, col]
        factors = T[:, col].copy()
        factors[r] = 0.0
        T -= np.outer(factors, T[r])
        self.basis[r] = col

    def run(self, allowed: int) -> str:
        """Bland's rule on the first ``allowed`` columns."""
        T = self.T
        m = len(self.basis)
        while True:
            costs = T[m, :allowed]
            candidates = np.flatnonzero(costs < -PIVOT_TOL)
            if candidates.size == 0:
                return OPTIMAL
            col = int(candidates[0])
            column = T[:m, col]
            rows = np.flatnonzero(column > PIVOT_TOL)
            if rows.size == 0:
                return UNBOUNDED
            ratios = T[rows, -1] / column[rows]
            best = ratios.min()
            tied = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
            r = int(min(tied, key=lambda i: self.basis[i]))
            self.pivot(r, col)


def _standard_form(p: LpProblem):
    """Map ``p`` onto ``min c'@z, A' z = b', z >= 0``.

    Returns the standard-form data plus a recovery map ``x = offset + R @ z``.
    """
    c = np.asarray(p.c, dtype=float)
    if p.maximize:
        c = -c
    A = np.asarray(p.A, dtype=float)
    b = np.asarray(p.b, dtype=float).copy()
    n = c.shape[0]
    bounds = p.bounds or tuple((0.0, np.inf) for _ in range(n))

    cols = []  # each structural column: (original index, sign)
    offset = np.zeros(n)
    extra_rows = []
    for j, (lo, hi) in enumerate(bounds):
        if lo > hi + FEAS_TOL:
            return None
        if np.isfinite(lo):
            offset[j] = lo
            cols.append((j, 1.0))
            if np.isfinite(hi):
                extra_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            offset[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))

    k = len(cols)
    R = np.zeros((n, k))
    for idx, (j, sgn) in enumerate(cols):
        R[j, idx] = sgn
    A_s = A @ R
    b = b - A @ offset
    c_s = c @ R
    senses = list(p.senses)
    if extra_rows:
        ub = np.zeros((len(extra_rows), k))
        for r, (idx, width) in enumerate(extra_rows):
            ub[r, idx] = 1.0
        A_s = np.vstack([A_s, ub])
        b = np.concatenate([b, [w for _, w in extra_rows]])
        senses += ["<="] * len(extra_rows)

    m = A_s.shape[0]
    n_slack = sum(1 for s in senses if s != "=")
    A_full = np.zeros((m, k + n_slack))
    A_full[:, :k] = A_s
    slack_of_row = [-1] * m
    col = k
    for i, s in enumerate(senses):
        if s == "<=":
            A_full[i, col] = 1.0
        elif s == ">=":
            A_full[i, col] = -1.0
        if s != "=":
            slack_of_row[i] = col
            col += 1
    for i in range(m):
        if b[i] < 0:
            A_full[i] *= -1.0
            b[i] = -b[i]
    c_full = np.zeros(k + n_slack)
    c_full[:k] = c_s
    return A_full, b, c_full, slack_of_row, R, offset


def solve_lp(p: LpProblem) -> LpResult:
    """Solve ``p`` by two-phase simplex with Bland's rule."""
    p.check()
    form = _standard_form(p)
    if form is None:
        return LpResult(INFEASIBLE)
    A, b, c, slack_of_row, R, offset = form
    m, n = A.shape

    # Rows whose slack enters with +1 can start with it in the basis.
    basis = []
    art_rows = []
    for i in range(m):
        s = slack_of_row[i]
        if s >= 0 and A[i, s] > 0:
            basis.append(s)
        else:
            basis.append(-1)
            art_rows.append(i)
    n_art = len(art_rows)
    A_aug = np.hstack([A, np.zeros((m, n_art))])
    for a, i in enumerate(art_rows):
        A_aug[i, n + a] = 1.0
        basis[i] = n + a
    tab = _Tableau(A_aug, b, basis)

    if n_art:
        phase1 = np.zeros(n + n_art)
        phase1[n:] = 1.0
        tab.set_objective(phase1)
        tab.run(n + n_art)
        if -tab.T[m, -1] > FEAS_TOL:
            return LpResult(INFEASIBLE)
        # Drive zero-level artificials out of the basis; drop redundant rows.
        keep = []
        for i in range(m):
            if tab.basis[i] >= n:
                row = tab.T[i, :n]
                nz = np.flatnonzero(np.abs(row) > PIVOT_TOL)
                if nz.size:
                    tab.pivot(i, int(nz[0]))
                    keep.append(i)
            else:
                keep.append(i)
        if len(keep) < m:
            tab.T = np.vstack([tab.T[keep], tab.T[m:]])
            tab.basis = [tab.basis[i] for i in keep]
            m = len(keep)
        tab.T = np.hstack([tab.T[:, :n], tab.T[:, -1:]])

    tab.set_objective(c)
    status = tab.run(n)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED)
    z = np.zeros(n)
    for i, j in enumerate(tab.basis):
        z[j] = tab.T[i, -1]
    z = np.maximum(z, 0.0)
    x = offset + R @ z[: R.shape[1]]
    value = float(np.asarray(p.c, dtype=float) @ x)
    return LpResult(OPTIMAL, value, x)


def check_feasibility(p: LpProblem) -> tuple[bool, np.ndarray | None]:
    """Feasibility of ``p`` with its objective ignored."""
    zero = LpProblem(np.zeros_like(np.asarray(p.c, dtype=float)), p.A, p.senses, p.b, p.bounds)
    res = solve_lp(zero)
    if res.status == INFEASIBLE:
        return False, None
    return True, res.x


def is_feasible_point(p: LpProblem, x: np.ndarray, tol: float = FEAS_TOL) -> bool:
    A = np.asarray(p.A, dtype=float)
    lhs = A @ x if A.size else np.zeros(0)
    for v, s, r in zip(lhs, p.senses, p.b):
        if s == "<=" and v > r + tol:
            return False
        if s == ">=" and v < r - tol:
            return False
        if s == "=" and abs(v - r) > tol:
            return False
    if p.bounds is not None:
        for xi, (lo, hi) in zip(x, p.bounds):
            if xi < lo - tol or xi > hi + tol:
                return False
    elif np.any(x < -tol):
        return False
    return True


# ---------------------------------------------------------------------------
# Matrix games
# ---------------------------------------------------------------------------


def _maximin_lp(M: np.ndarray) -> tuple[float, np.ndarray]:
    """Row player's optimal mix for payoff ``M`` (rows maximize)."""
    n_rows, n_cols = M.shape
    # variables: x_1..x_r, v (free); maximize v
    c = np.zeros(n_rows + 1)
    c[-1] = 1.0
    A = np.zeros((n_cols + 1, n_rows + 1))
    A[:n_cols, :n_rows] = -M.T
    A[:n_cols, -1] = 1.0  # v - x@M[:, j] <= 0
    A[n_cols, :n_rows] = 1.0
    senses = ("<=",) * n_cols + ("=",)
    b = np.zeros(n_cols + 1)
    b[-1] = 1.0
    bounds = tuple((0.0, np.inf) for _ in range(n_rows)) + ((-np.inf, np.inf),)
    res = solve_lp(LpProblem(c, A, senses, b, bounds, maximize=True))
    if not res.optimal:  # pragma: no cover - a matrix game always has a value
        raise RuntimeError(f"matrix game LP returned {res.status}")
    x = np.maximum(res.x[:n_rows], 0.0)
    x /= x.sum()
    return float(res.x[-1]), x


def _pure_saddle(M: np.ndarray):
    row_mins = M.min(axis=1)
    col_maxs = M.max(axis=0)
    lo = row_mins.max()
    hi = col_maxs.min()
    if hi - lo <= PIVOT_TOL:
        return lo, int(row_mins.argmax()), int(col_maxs.argmin())
    return None


def game_value(M: np.ndarray) -> float:
    """Value of the zero-sum game ``M`` (rows maximize, columns minimize)."""
    M = np.asarray(M, dtype=float)
    r, c = M.shape
    if r == 1:
        return float(M.min())
    if c == 1:
        return float(M.max())
    saddle = _pure_saddle(M)
    if saddle is not None:
        return float(saddle[0])
    if r == 2 and c == 2:
        a, b_, c_, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
        return float((a * d - b_ * c_) / (a + d - b_ - c_))
    return _maximin_lp(M)[0]


def matrix_game_value(M) -> tuple[float, np.ndarray, np.ndarray]:
    """Value and optimal mixed strategies of the zero-sum game ``M``.

    Rows belong to the maximizer, columns to the minimizer.  Returns
    ``(value, row_mix, col_mix)``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.size == 0:
        raise ValueError("payoff matrix must be a nonempty 2-d array")
    if not np.all(np.isfinite(M)):
        raise ValueError("payoff entries must be finite")
    r, c = M.shape
    saddle = _pure_saddle(M)
    if saddle is not None:
        v, i, j = saddle
        x = np.zeros(r)
        x[i] = 1.0
        y = np.zeros(c)
        y[j] = 1.0
        return float(v), x, y
    v, x = _maximin_lp(M)
    w, y = _maximin_lp(-M.T)
    return v, x, y
