"""Built-in example games and the end-to-end verification suite."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .. import kernel as K
from .. import metrics as M
from ..game import (
    GameStructure,
    classify_structure,
    expectation,
    observation_distance,
    successor_distribution,
    valuation,
    validate_structure,
)
from ..io import loads_game
from ..linopt import game_value
from ..qmu import dpre, evaluate, parse_formula, pre, witness_report
from .generate import random_game
from .registry import EXPECTED, CorpusEntry, ExpectedResult

NAMES = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6")

__all__ = [
    "NAMES",
    "CorpusEntry",
    "ExpectedResult",
    "SuiteRow",
    "SuiteReport",
    "builtin_game",
    "corpus_text",
    "random_game",
    "run_suite",
]


def corpus_text(name: str) -> str:
    if name not in NAMES:
        raise KeyError(f"unknown corpus game {name!r}; available: {', '.join(NAMES)}")
    return resources.files(__name__).joinpath("data", f"{name}.json").read_text()


def builtin_game(name: str) -> CorpusEntry:
    text = corpus_text(name)
    doc = json.loads(text)
    return CorpusEntry(name, loads_game(text, name), doc.get("notes", {}), tuple(EXPECTED.get(name, ())))


# ---------------------------------------------------------------------------
# Measuring registry quantities
# ---------------------------------------------------------------------------


class _Context:
    """Per-game memo of expensive computations within one suite run."""

    def __init__(self, g: GameStructure, mesh: float, tol: float):
        self.g = g
        self.mesh = mesh
        self.tol = tol
        self.reports: dict = {}
        self.kernels: dict = {}

    def metric(self, kind: str, player: int) -> M.MetricReport:
        key = (kind, player)
        if key not in self.reports:
            self.reports[key] = M.iterate_metric(self.g, kind, player, tol=self.tol, mesh=self.mesh)
        return self.reports[key]

    def kernel(self, name: str, *args):
        key = (name, args)
        if key not in self.kernels:
            self.kernels[key] = getattr(K, name)(self.g, *args)
        return self.kernels[key]


def _measure(ctx: _Context, q: str, a: dict) -> tuple[object, float]:
    """(measured value, certified error of the computation)."""
    g = ctx.g
    if q == "valid":
        return not validate_structure(g), 0.0
    if q == "classify":
        return classify_structure(g).describe(), 0.0
    if q == "mdp_for":
        return classify_structure(g).is_mdp_for(a["player"]), 0.0
    if q == "turn_based":
        return classify_structure(g).is_turn_based, 0.0
    if q == "successor_mass":
        dist = successor_distribution(g, a["s"], a["x1"], a["x2"])
        return float(dist[g.index[a["target"]]]), 0.0
    if q == "expectation":
        return expectation(g, a["s"], a["x1"], a["x2"], valuation(g, a["k"])), 0.0
    if q == "obs_distance":
        return observation_distance(g, a["s"], a["t"]), 0.0
    if q in ("pre", "dpre"):
        op = pre if q == "pre" else dpre
        return float(op(g, a["player"], valuation(g, a["k"]))[g.index[a["state"]]]), 0.0
    if q == "matrix_game":
        return game_value(np.array(a["payoff"], dtype=float)), 0.0
    if q == "eval":
        ev = evaluate(g, parse_formula(a["formula"]), mode=a["mode"], tol=ctx.tol)
        return float(ev.values[g.index[a["state"]]]), 0.0
    if q == "metric":
        rep = ctx.metric(a["kind"], a["player"])
        return rep[a["s"], a["t"]], rep.certified_error
    if q == "reciprocity":
        r1 = ctx.metric("apriori-sim", 1)
        r2 = ctx.metric("apriori-sim", 2)
        return abs(r1[a["s"], a["t"]] - r2[a["t"], a["s"]]), 0.0
    if q in ("brute_force_lower", "brute_force_upper"):
        rep = ctx.metric(a["kind"], a["player"])
        d = rep.history[-2] if len(rep.history) > 1 else rep.metric
        lo, hi = M.brute_force_sup_over_C(g, d, a["s"], a["t"], a["player"], ctx.mesh)
        return (lo if q.endswith("lower") else hi), hi - lo
    if q == "witness_gap":
        w = witness_report(g, a["s"], a["t"], a["n"], player=a["player"], mesh=ctx.mesh)
        return w.gap, ctx.metric("apriori-sim", a["player"]).certified_error
    if q == "game_sim_contains":
        rel = ctx.kernel("game_sim_kernel", a["player"], ctx.mesh)
        pair = (a["s"], a["t"])
        return pair in rel, (ctx.mesh if pair in rel.within_margin else 0.0)
    if q == "alt_sim_contains":
        return (a["s"], a["t"]) in ctx.kernel("alt_sim_pure", a["player"]), 0.0
    if q == "game_bisim_same_block":
        return ctx.kernel("game_bisim_kernel", ctx.mesh).same_block(a["s"], a["t"]), 0.0
    if q == "classical_same_block":
        return ctx.kernel("classical_bisim_kernel").same_block(a["s"], a["t"]), 0.0
    if q == "game_equals_classical":
        game = ctx.kernel("game_bisim_kernel", ctx.mesh).pairs()
        return game == ctx.kernel("classical_bisim_kernel").pairs(), 0.0
    if q == "lift":
        rel = np.zeros((g.n, g.n), dtype=bool)
        for u, v in a["pairs"]:
            rel[g.index[u], g.index[v]] = True
        return K.lift_compare(valuation(g, a["p"]), valuation(g, a["q"]), rel)[0], 0.0
    raise ValueError(f"unknown quantity {q!r}")


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------


@dataclass
class SuiteRow:
    entry: str
    quantity: str
    args: dict
    relation: str
    expected: object
    measured: object
    tolerance: float
    certified_error: float
    status: str  # PASS, FAIL or APPROX-FAIL
    origin: str = ""
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "entry": self.entry,
            "quantity": self.quantity,
            "args": self.args,
            "relation": self.relation,
            "expected": self.expected,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "certified_error": self.certified_error,
            "status": self.status,
            "origin": self.origin,
            "message": self.message,
        }


@dataclass
class SuiteReport:
    rows: list[SuiteRow] = field(default_factory=list)
    mesh: float = M.DEFAULT_MESH
    tol: float = 1e-6

    @property
    def passed(self) -> bool:
        return all(r.status == "PASS" for r in self.rows)

    def counts(self) -> dict[str, int]:
        out = {"PASS": 0, "FAIL": 0, "APPROX-FAIL": 0}
        for r in self.rows:
            out[r.status] += 1
        return out

    def to_dict(self) -> dict:
        return {
            "mesh": self.mesh,
            "tol": self.tol,
            "passed": self.passed,
            "counts": self.counts(),
            "rows": [r.to_dict() for r in self.rows],
        }


def _check(exp: ExpectedResult, measured, err: float) -> tuple[bool, float]:
    tol = err + 1e-3 if exp.tolerance is None else exp.tolerance
    if exp.relation == "is":
        return measured == exp.expected, 0.0
    if exp.relation == "==":
        return abs(measured - exp.expected) <= tol, tol
    if exp.relation == ">=":
        return measured >= exp.expected - tol, tol
    if exp.relation == "<=":
        return measured <= exp.expected + tol, tol
    raise ValueError(f"unknown relation {exp.relation!r}")


def _row(entry, exp: ExpectedResult, measured, err: float) -> SuiteRow:
    ok, tol = _check(exp, measured, err)
    if ok:
        status, msg = "PASS", ""
    elif err > 0:
        status = "APPROX-FAIL"
        msg = f"grid approximation with certified error {err:.3g} cannot decide at this tolerance"
    else:
        status, msg = "FAIL", ""
    return SuiteRow(entry, exp.quantity, exp.args, exp.relation, exp.expected, measured, tol, err,
                    status, exp.origin, msg)


def _property_rows(mesh: float, tol: float, seed: int = 2024) -> list[SuiteRow]:
    """A small random-game pass over the metric properties."""
    rng = np.random.default_rng(seed)
    rows = []

    def add(name, ok, measured, err=0.0, msg=""):
        status = "PASS" if ok else ("APPROX-FAIL" if err > 0 else "FAIL")
        rows.append(SuiteRow("random", name, {}, "property", True, measured, 0.0, err, status, "property", msg))

    # one-player games: a priori and a posteriori steps agree
    worst, err = 0.0, 0.0
    for _ in range(5):
        g = random_game(rng, 3, 3, mdp_for=1)
        d = M.tighten(rng.uniform(0, 1, (g.n, g.n)) * (1 - np.eye(g.n)))
        a = M.apriori_step(g, d, 1, mesh)
        b = M.aposteriori_step(g, d, 1, mesh)
        worst = max(worst, float(np.abs(a.values - b.values).max()))
        err = max(err, a.certified_error + b.certified_error)
    add("mdp-collapse", worst <= err + 1e-6, worst, err)

    # metric fixpoints satisfy the triangle inequality
    worst, err = 0.0, 0.0
    for _ in range(3):
        g = random_game(rng, 3, 2)
        rep = M.iterate_metric(g, "apriori-bisim", 1, iters=4, tol=tol, mesh=max(mesh, 0.25))
        worst = max(worst, M.triangle_violation(rep.raw_last if rep.raw_last is not None else rep.metric))
        err = max(err, rep.certified_error)
    add("triangle", worst <= 2 * err + 1e-6, worst, err)

    # trans-shipping primal equals vertex-enumerated dual
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 5))
        p, q = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        d = M.tighten(rng.uniform(0, 1, (n, n)) * (1 - np.eye(n)))
        worst = max(worst, abs(M.transship_distance(p, q, d)[0] - M.dual_transship_by_vertices(p, q, d)))
    add("transship-duality", worst <= 1e-6, worst)

    # pre of one player is the complement of pre of the other
    worst = 0.0
    for _ in range(5):
        g = random_game(rng, 4, 3)
        k = rng.uniform(0, 1, g.n)
        worst = max(worst, float(np.abs(pre(g, 1, k) - (1 - pre(g, 2, 1 - k))).max()))
    add("pre-determinacy", worst <= 1e-6, worst)
    return rows


def run_suite(
    mesh: float = M.DEFAULT_MESH,
    tol: float = 1e-6,
    only: str | None = None,
    properties: bool = True,
) -> SuiteReport:
    """Check every expected result of every corpus entry, then the random property pass.

    ``only`` restricts the run to one corpus entry (and skips the property
    pass).  Rows are ordered by entry name, then registry order.
    """
    names = NAMES if only is None else (only,)
    report = SuiteReport(mesh=mesh, tol=tol)
    for name in names:
        entry = builtin_game(name)
        ctx = _Context(entry.game, mesh, tol)
        for exp in entry.expected:
            measured, err = _measure(ctx, exp.quantity, exp.args)
            report.rows.append(_row(name, exp, measured, err))
    if properties and only is None:
        report.rows.extend(_property_rows(mesh, tol))
    return report


def suite_table(report: SuiteReport) -> str:
    lines = []
    for r in report.rows:
        args = ", ".join(f"{k}={v}" for k, v in r.args.items() if k not in ("payoff",))
        measured = f"{r.measured:.6g}" if isinstance(r.measured, float) else str(r.measured)
        expected = f"{r.expected:.6g}" if isinstance(r.expected, float) else str(r.expected)
        line = f"{r.status:<11} {r.entry:<6} {r.quantity}({args}) {r.relation} {expected}: measured {measured}"
        if r.message:
            line += f"  [{r.message}]"
        lines.append(line)
    c = report.counts()
    lines.append(f"{c['PASS']} passed, {c['FAIL']} failed, {c['APPROX-FAIL']} approximate failures")
    return "\n".join(lines)

