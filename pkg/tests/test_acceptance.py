"""Acceptance criteria, one test each.

Every test prints a ``PASS criterion N: ...`` or ``FAIL criterion N: ...``
line straight to the terminal.  Run this file alone with
``pytest tests/test_acceptance.py -v`` or as a script.
"""

import subprocess
import sys
import time

import numpy as np

from gamemetrics.corpus import NAMES, builtin_game, random_game
from gamemetrics.game import classify_structure, observation_metric
from gamemetrics.kernel import alt_sim_pure, classical_bisim_kernel, game_bisim_kernel, game_sim_kernel
from gamemetrics.metrics import (
    KINDS,
    aposteriori_step,
    apriori_step,
    dual_transship_by_vertices,
    iterate_metric,
    tighten,
    transship_distance,
)
from gamemetrics.qmu import evaluate, parse_formula, random_formula, witness_report

MESH = 0.05


def corpus(name):
    return builtin_game(name).game


def report(capsys, n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


def excess_triangle(d, err):
    via = (d[:, :, None] + d[None, :, :]).min(axis=1)
    return float((d - via - 2 * err).max())


def test_criterion_01_fig1_separation(capsys):
    g = corpus("fig1")
    start = time.perf_counter()
    prio = iterate_metric(g, "apriori-sim", 1, mesh=MESH)
    post = iterate_metric(g, "aposteriori-sim", 1, mesh=MESH)
    elapsed = time.perf_counter() - start
    p, q = prio[("s", "t")], post[("s", "t")]
    ok = p <= 0.06 and q >= 0.02 and elapsed < 10
    detail = f"fig1 apriori-sim(s,t)={p:.4f} <= 0.06, aposteriori-sim(s,t)={q:.4f} >= 0.02, {elapsed:.2f}s < 10s"
    assert report(capsys, 1, ok, detail)


def test_criterion_02_reciprocity(capsys):
    g = corpus("fig1")
    post2 = iterate_metric(g, "aposteriori-sim", 2, mesh=MESH)[("t", "s")]
    post1 = iterate_metric(g, "aposteriori-sim", 1, mesh=MESH)[("s", "t")]
    prio1 = iterate_metric(g, "apriori-sim", 1, mesh=MESH)
    prio2 = iterate_metric(g, "apriori-sim", 2, mesh=MESH)
    gap = max(abs(prio1[(s, t)] - prio2[(t, s)]) for s in g.states for t in g.states)
    ok = post2 <= 0.06 and post1 >= 0.02 and gap <= 0.02
    detail = (f"fig1 aposteriori p2(t,s)={post2:.4f} <= 0.06, p1(s,t)={post1:.4f} >= 0.02, "
              f"max |prio1(s,t) - prio2(t,s)|={gap:.4f} <= 0.02")
    assert report(capsys, 2, ok, detail)


def test_criterion_03_caption_values(capsys):
    checks = [
        ("fig2", "apriori-bisim", "s", "t", 0.5, 0.06),
        ("fig2", "coop-bisim", "s", "t", 0.0, 0.01),
        ("fig3", "apriori-bisim", "s", "t", 0.0, 0.06),
        ("fig3", "coop-bisim", "s", "t", 1.0, 0.01),
        ("fig4", "apriori-sim", "s", "t", 0.0, 0.06),
        ("fig4", "apriori-sim", "t", "s", 1.0, 0.06),
        ("fig4", "coop-sim", "s", "t", 1.0, 0.06),
        ("fig4", "coop-sim", "t", "s", 0.0, 0.06),
    ]
    parts, ok = [], True
    for name, kind, s, t, want, tol in checks:
        got = iterate_metric(corpus(name), kind, 1, mesh=MESH)[(s, t)]
        ok &= abs(got - want) <= tol
        parts.append(f"{name} {kind}({s},{t})={got:.3f}")
    assert report(capsys, 3, ok, "; ".join(parts))


def test_criterion_04_mdp_collapse(capsys):
    rng = np.random.default_rng(4)
    start = time.perf_counter()
    worst = -np.inf
    for _ in range(50):
        g = random_game(rng, int(rng.integers(2, 5)), int(rng.integers(1, 4)), mdp_for=1)
        d = np.maximum(observation_metric(g), rng.uniform(0, 1, (g.n, g.n)))
        np.fill_diagonal(d, 0)
        d = tighten(d)
        a = apriori_step(g, d, 1, MESH)
        b = aposteriori_step(g, d, 1, MESH)
        err = a.errors + b.errors
        worst = max(worst, float((np.abs(a.values - b.values) - err).max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-7 and elapsed < 60
    detail = f"50 random 1-MDPs, max(|prio - post| - error)={worst:.2e}, {elapsed:.2f}s < 60s"
    assert report(capsys, 4, ok, detail)


def test_criterion_05_triangle(capsys):
    worst, count = -np.inf, 0
    for name in NAMES:
        g = corpus(name)
        for kind in KINDS:
            for player in (1, 2):
                rep = iterate_metric(g, kind, player, mesh=MESH)
                for d in (rep.metric, rep.raw_last):
                    if d is not None:
                        worst = max(worst, excess_triangle(d, rep.certified_error))
                count += 1
    rng = np.random.default_rng(5)
    for _ in range(50):
        g = random_game(rng, 3, 2)
        rep = iterate_metric(g, str(rng.choice(KINDS)), int(rng.integers(1, 3)), mesh=0.25)
        for d in (rep.metric, rep.raw_last):
            if d is not None:
                worst = max(worst, excess_triangle(d, rep.certified_error))
        count += 1
    ok = worst <= 1e-9
    detail = f"{count} fixpoints (and their last untightened steps), max violation beyond 2*error={max(worst, 0):.2e}"
    assert report(capsys, 5, ok, detail)


def test_criterion_06_logical_bound(capsys):
    rng = np.random.default_rng(6)
    worst = -np.inf
    for name in NAMES:
        g = corpus(name)
        rep = iterate_metric(g, "apriori-bisim", 1, mesh=MESH)
        bound = rep.metric + 0.01 + rep.certified_error
        for _ in range(200):
            f = random_formula(rng, g.variables, depth=3)
            v = evaluate(g, f).values
            excess = np.abs(v[:, None] - v[None, :]) - bound
            np.fill_diagonal(excess, -np.inf)
            worst = max(worst, float(excess.max()))
    ok = worst <= 0
    detail = f"200 random formulas per corpus game, max(|f(s) - f(t)| - bisim - 0.01 - error)={worst:.4f} <= 0"
    assert report(capsys, 6, ok, detail)


def test_criterion_07_witness_attainment(capsys):
    worst, count = np.inf, 0
    for name in ("fig2", "fig4"):
        g = corpus(name)
        for player in (1, 2):
            n = iterate_metric(g, "apriori-sim", player, mesh=MESH).iterations
            for s in g.states:
                for t in g.states:
                    if s == t:
                        continue
                    w = witness_report(g, s, t, n, eps=0.05, player=player, mesh=MESH)
                    v = evaluate(g, w.formula).as_dict(g)
                    worst = min(worst, v[s] - v[t] - (w.target - 0.1))
                    count += 1
    ok = worst >= 0
    detail = f"{count} ordered pairs on fig2/fig4, min(gap - (d_n - 0.1))={worst:.4f} >= 0"
    assert report(capsys, 7, ok, detail)


def test_criterion_08_kernel_consistency(capsys):
    mismatches, tb = [], []
    for name in NAMES:
        g = corpus(name)
        rep = iterate_metric(g, "apriori-bisim", 1, mesh=MESH)
        if game_bisim_kernel(g, MESH).pairs() != frozenset(rep.zero_set()):
            mismatches.append(name)
        if classify_structure(g).is_turn_based:
            tb.append(name)
            if game_bisim_kernel(g, MESH).blocks != classical_bisim_kernel(g).blocks:
                mismatches.append(f"{name} (classical)")
    ok = not mismatches and tb
    detail = f"kernel = zero set on {len(NAMES)} games, game = classical on turn-based {tb}; mismatches: {mismatches or 'none'}"
    assert report(capsys, 8, ok, detail)


def test_criterion_09_alternating_separations(capsys):
    g5, g6 = corpus("fig5"), corpus("fig6")
    v = evaluate(g5, parse_formula("pre1(u_flag)")).as_dict(g5)
    ok5 = ("s", "t") in alt_sim_pure(g5) and ("s", "t") not in game_sim_kernel(g5, 1, MESH)
    ok5 &= abs(v["s"] - 0.5) <= 1e-9 and abs(v["t"] - 1 / 3) <= 1e-9
    ok6 = ("s", "t") in game_sim_kernel(g6, 1, MESH) and ("s", "t") not in alt_sim_pure(g6)
    detail = (f"fig5 alt-sim(s,t) and not game-sim(s,t), pre1(u)={v['s']:.4f} vs {v['t']:.4f}: {ok5}; "
              f"fig6 game-sim(s,t) and not alt-sim(s,t): {ok6}")
    assert report(capsys, 9, ok5 and ok6, detail)


def test_criterion_10_pure_semantics(capsys):
    rng = np.random.default_rng(10)
    worst, pairs = -np.inf, 0
    for name in ("fig5", "fig6"):
        g = corpus(name)
        rel = [(s, t) for s, t in alt_sim_pure(g, 1).pairs if s != t]
        pairs += len(rel)
        for _ in range(100):
            f = random_formula(rng, g.variables, depth=3, players=(1,), positive=True)
            v = evaluate(g, f, mode="pure").as_dict(g)
            for s, t in rel:
                worst = max(worst, v[s] - v[t])
    ok = worst <= 1e-6
    detail = f"100 positive player-1 formulas per game over {pairs} related pairs, max(f(s) - f(t))={max(worst, 0):.2e} <= 1e-6"
    assert report(capsys, 10, ok, detail)


def test_criterion_11_transship_duality(capsys):
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 5))
        p, q = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        d = tighten(rng.uniform(0, 1, (n, n)) * (1 - np.eye(n)))
        worst = max(worst, abs(transship_distance(p, q, d)[0] - dual_transship_by_vertices(p, q, d)))
    ok = worst <= 1e-6
    assert report(capsys, 11, ok, f"100 instances, max |primal - dual|={worst:.2e} <= 1e-6")


def test_criterion_12_suite_command(capsys):
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "gamemetrics", "suite"], capture_output=True, text=True)
    elapsed = time.perf_counter() - start
    ok = proc.returncode == 0 and elapsed < 120
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()
    detail = f"suite exit {proc.returncode} in {elapsed:.2f}s < 120s ({summary})"
    assert report(capsys, 12, ok, detail)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn(None)
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
