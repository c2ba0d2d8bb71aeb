import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import frozen
import oracles
from conftest import make_random_game
from gamemetrics.game import observation_metric
from gamemetrics.metrics import (
    KINDS,
    aposteriori_step,
    aposteriori_sup,
    apriori_step,
    apriori_sup,
    brute_force_sup_over_C,
    coop_sup,
    dual_transship_by_vertices,
    extend_valuation,
    grid_steps,
    in_C,
    iterate_metric,
    simplex_grid,
    simplex_radius,
    tighten,
    transship_distance,
    triangle_violation,
)


def random_directed(rng, n):
    d = rng.choice([0.0, 0.25, 0.5, 1.0], size=(n, n)) * rng.uniform(0.5, 1, (n, n))
    np.fill_diagonal(d, 0.0)
    return d


def obs_d(g):
    return tighten(observation_metric(g))


# -- directed metrics -----------------------------------------------------------


def test_tighten_example():
    d = np.array([[0, 1, 0.2], [1, 0, 1], [0.2, 0.3, 0]])
    out = tighten(d)
    assert out[0, 1] == pytest.approx(0.5)
    assert out[1, 0] == 1.0 and out[2, 1] == pytest.approx(0.3)
    assert triangle_violation(out) == 0.0
    assert triangle_violation(d) == pytest.approx(0.5)


def test_tighten_one_relaxation():
    d = np.array([[0, 0.2, 1], [1, 0, 0.2], [1, 1, 0]])
    assert tighten(d)[0, 2] == pytest.approx(0.4)
    assert np.array_equal(tighten(tighten(d)), tighten(d))


@pytest.mark.parametrize(
    "bad", [np.zeros((2, 3)), np.array([[0, -0.1], [0, 0]]), np.array([[0.1, 0], [0, 0]])]
)
def test_tighten_rejects(bad):
    with pytest.raises(ValueError):
        tighten(bad)


@given(st.integers(0, 2**31), st.integers(2, 5))
def test_tighten_idempotent_and_below(seed, n):
    d = random_directed(np.random.default_rng(seed), n)
    t = tighten(d)
    assert np.all(t <= d + 1e-12)
    assert np.allclose(tighten(t), t)
    assert triangle_violation(t) <= 1e-12


@given(st.integers(0, 2**31), st.integers(2, 4))
def test_tighten_keeps_constraint_set(seed, n):
    # probe C(d) and C(tighten(d)) along a random direction with an external LP
    rng = np.random.default_rng(seed)
    d = random_directed(rng, n)
    w = rng.uniform(-1, 1, n)
    zero = np.zeros(n)
    assert oracles.dual_transship(w, zero, d) == pytest.approx(oracles.dual_transship(w, zero, tighten(d)), abs=1e-7)


def test_extend_valuation_lands_in_C():
    d = tighten(np.array([[0, 0.3, 1], [0.2, 0, 1], [0.5, 0.5, 0]]))
    k = extend_valuation({0: 0.9}, d)
    assert k[0] == 0.9 and in_C(k, d)
    assert k[1] == pytest.approx(0.6)


# -- trans-shipping ----------------------------------------------------------------


def test_transship_examples(corpus):
    g = corpus["fig5"]
    d = obs_d(g)
    p = np.array([0, 0, 0.5, 0.5])
    q = np.array([0, 0, 1.0, 0])
    value, plan = transship_distance(p, q, d)
    assert value == pytest.approx(0.5)
    assert plan.flow[3, 2] == pytest.approx(0.5)
    assert plan.flow.sum(axis=1) == pytest.approx(p)
    assert plan.flow.sum(axis=0) == pytest.approx(q)
    assert transship_distance(p, p, d)[0] == pytest.approx(0.0)


@given(st.integers(0, 2**31), st.integers(1, 4))
def test_transship_primal_dual(seed, n):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
    d = tighten(random_directed(rng, n))
    primal = transship_distance(p, q, d)[0]
    assert primal == pytest.approx(oracles.transship(p, q, d), abs=1e-7)
    assert primal == pytest.approx(dual_transship_by_vertices(p, q, d), abs=1e-7)
    assert primal == pytest.approx(oracles.dual_transship(p, q, d), abs=1e-7)


def test_vertex_enumeration_size_guard():
    with pytest.raises(ValueError):
        dual_transship_by_vertices(np.ones(6) / 6, np.ones(6) / 6, np.zeros((6, 6)))


# -- grids -----------------------------------------------------------------------


def test_simplex_grid_and_radius():
    pts = simplex_grid(3, 4)
    assert pts.shape == (15, 3)
    assert np.allclose(pts.sum(axis=1), 1)
    assert simplex_radius(2, 20) == pytest.approx(0.05)
    assert simplex_radius(1, 20) == 0.0
    assert grid_steps(0.05) == 20 and grid_steps(0.3) == 4
    with pytest.raises(ValueError):
        grid_steps(0)


@given(st.integers(0, 2**31), st.integers(2, 4), st.integers(1, 6))
def test_simplex_radius_covers(seed, n, steps):
    x = np.random.default_rng(seed).dirichlet(np.ones(n))
    assert np.abs(simplex_grid(n, steps) - x).sum(axis=1).min() <= simplex_radius(n, steps) + 1e-12


# -- one-step transformers ------------------------------------------------------------


def test_apriori_fig1(corpus):
    g = corpus["fig1"]
    d = obs_d(g)
    for (s, t), ref in frozen.FIG1_PRIO1.items():
        pv = apriori_sup(g, d, s, t, 1, 0.05)
        assert ref - pv.error - 1e-7 <= pv.value <= ref + 1e-7
        assert in_C(pv.k, d)
    # player 1 has one move at s, so only the player-2 mix at t is gridded
    assert apriori_sup(g, d, "s", "t", 1, 0.05).error == pytest.approx(0.025)
    assert apriori_sup(g, d, "t", "s", 1, 0.05).value == pytest.approx(1 / 9, abs=1e-7)


def test_apriori_fig5(corpus):
    g = corpus["fig5"]
    pv = apriori_sup(g, obs_d(g), "s", "t", 1, 0.05)
    assert frozen.FIG5_PRIO1_ST - pv.error - 1e-7 <= pv.value <= frozen.FIG5_PRIO1_ST + 1e-7


def test_aposteriori_fig1(corpus):
    g = corpus["fig1"]
    d = obs_d(g)
    pv = aposteriori_sup(g, d, "s", "t", 1, 0.05)
    assert frozen.FIG1_POST1_ST - pv.error - 1e-7 <= pv.value <= frozen.FIG1_POST1_ST + 1e-7
    assert pv.value == pytest.approx(1 / 18, abs=1e-7)
    assert aposteriori_sup(g, d, "t", "s", 2, 0.05).value == pytest.approx(frozen.FIG1_POST2_TS, abs=1e-7)


def test_aposteriori_matches_full_grid_oracle(corpus):
    # the oracle grids the pure-reply side too; compare within both grid errors
    g = corpus["fig1"]
    d = obs_d(g)
    steps = 4
    pv = aposteriori_sup(g, d, "s", "t", 1, 1 / steps)
    ref = oracles.aposteriori_grid(g, d, "s", "t", 1, steps)
    assert abs(pv.value - ref) <= 3 * simplex_radius(2, steps) / 2 + 1e-7


def test_coop_examples(corpus):
    g = corpus["fig1"]
    d = obs_d(g)
    assert coop_sup(g, d, "t", "s").value == pytest.approx(2 / 9, abs=1e-7)
    g2 = corpus["fig2"]
    assert coop_sup(g2, obs_d(g2), "s", "t").value == pytest.approx(0.0, abs=1e-9)


def test_step_keeps_observation_floor(corpus):
    g = corpus["fig1"]
    res = apriori_step(g, obs_d(g), 1, 0.25)
    assert np.all(res.values >= observation_metric(g))
    assert np.all(np.diag(res.values) == 0)


# -- iteration -----------------------------------------------------------------------


def test_iterate_zero_is_observation(corpus):
    g = corpus["fig2"]
    rep = iterate_metric(g, "apriori-sim", 1, iters=0)
    assert np.array_equal(rep.metric, observation_metric(g))
    assert rep.iterations == 0 and rep.converged and len(rep.history) == 1


def test_iterate_examples(corpus):
    g = corpus["fig2"]
    rep = iterate_metric(g, "apriori-bisim", 1)
    assert rep[("s", "t")] == pytest.approx(0.5, abs=rep.certified_error + 1e-7)
    assert rep.converged and rep.iterations == len(rep.history) - 1
    assert np.allclose(rep.metric, rep.metric.T)
    assert set(rep.to_dict()) >= {"kind", "matrix", "states", "certified_error", "converged"}
    g4 = corpus["fig4"]
    sim = iterate_metric(g4, "apriori-sim", 1)
    assert sim[("s", "t")] == pytest.approx(0.0, abs=1e-7)
    assert sim[("t", "s")] == pytest.approx(1.0, abs=1e-7)


def test_iterate_rejects_bad_arguments(corpus):
    g = corpus["fig2"]
    with pytest.raises(ValueError):
        iterate_metric(g, "nearest")
    with pytest.raises(ValueError):
        iterate_metric(g, player=3)
    with pytest.raises(ValueError):
        iterate_metric(g, iters=-1)


def test_iteration_budget_reported(corpus):
    g = corpus["fig1"]
    rep = iterate_metric(g, "coop-sim", 1, iters=1)
    assert rep.iterations == 1
    assert not rep.converged


def test_brute_force_bracket(corpus):
    g = corpus["fig2"]
    lo, hi = brute_force_sup_over_C(g, obs_d(g), "t", "s", 1, 0.05)
    assert lo <= 0.5 + 1e-9 <= hi
    assert lo >= 0.45


def test_brute_force_size_guard(corpus):
    g = corpus["fig1"]
    with pytest.raises(ValueError):
        brute_force_sup_over_C(g, obs_d(g), "s", "t", 1, 1e-4)


@given(st.integers(0, 2**31), st.integers(1, 2))
def test_apriori_inside_brute_force_bracket(seed, player):
    g = make_random_game(seed, n_states=3, max_moves=2)
    d = tighten(np.maximum(observation_metric(g), random_directed(np.random.default_rng(seed), 3)))
    s, t = g.states[0], g.states[1]
    pv = apriori_sup(g, d, s, t, player, 0.25)
    lo, hi = brute_force_sup_over_C(g, d, s, t, player, 0.1)
    assert pv.value <= hi + 1e-7
    assert lo <= pv.value + pv.error + 1e-7


@given(st.integers(0, 2**31))
def test_reciprocity_of_apriori_step(seed):
    g = make_random_game(seed, n_states=3, max_moves=2)
    d = tighten(np.maximum(observation_metric(g), random_directed(np.random.default_rng(seed), 3)))
    one = apriori_step(g, d, 1, 0.25)
    two = apriori_step(g, d.T, 2, 0.25)
    err = one.errors + two.errors.T
    assert np.all(np.abs(one.values - two.values.T) <= err + 1e-7)


@given(st.integers(0, 2**31), st.integers(1, 2))
def test_apriori_below_aposteriori(seed, player):
    g = make_random_game(seed, n_states=3, max_moves=2)
    d = tighten(np.maximum(observation_metric(g), random_directed(np.random.default_rng(seed), 3)))
    prio = apriori_step(g, d, player, 0.25)
    post = aposteriori_step(g, d, player, 0.25)
    assert np.all(prio.values <= post.values + post.errors + 1e-7)


@given(st.integers(0, 2**31))
def test_one_player_games_collapse(seed):
    g = make_random_game(seed, n_states=4, max_moves=3, mdp_for=1)
    d = tighten(np.maximum(observation_metric(g), random_directed(np.random.default_rng(seed), 4)))
    prio = apriori_step(g, d, 1, 0.25)
    post = aposteriori_step(g, d, 1, 0.25)
    assert prio.certified_error == 0 and post.certified_error == 0
    assert np.allclose(prio.values, post.values, atol=1e-7)


@given(st.integers(0, 2**31), st.sampled_from(KINDS))
def test_fixpoints_are_directed_metrics(seed, kind):
    g = make_random_game(seed, n_states=3, max_moves=2)
    rep = iterate_metric(g, kind, 1, iters=6, mesh=0.25)
    assert triangle_violation(rep.metric) <= 1e-9
    assert triangle_violation(rep.raw_last) <= 2 * rep.certified_error + 1e-7
    assert np.all(rep.metric >= observation_metric(g) - 1e-12)
    assert np.all((rep.metric >= 0) & (rep.metric <= 1))
    if kind.endswith("bisim"):
        assert np.allclose(rep.metric, rep.metric.T)


@given(st.integers(0, 2**31), st.sampled_from(["apriori-sim", "aposteriori-sim", "coop-sim"]))
def test_iterates_increase(seed, kind):
    g = make_random_game(seed, n_states=3, max_moves=2)
    rep = iterate_metric(g, kind, 1, iters=5, mesh=0.25)
    for a, b in zip(rep.history, rep.history[1:]):
        assert np.all(a <= b + 1e-9)


@given(st.integers(0, 2**31))
def test_coop_equals_apriori_on_one_player_games(seed):
    # with a single opponent move, cooperating changes nothing
    g = make_random_game(seed, n_states=3, max_moves=3, mdp_for=1)
    prio = iterate_metric(g, "apriori-sim", 1, iters=4, mesh=0.25)
    coop = iterate_metric(g, "coop-sim", 1, iters=4)
    assert prio.certified_error == 0
    assert np.allclose(prio.metric, coop.metric, atol=1e-7)


def test_turn_based_collapse(corpus):
    g = corpus["fig6"]
    prio = iterate_metric(g, "apriori-bisim", 1)
    coop = iterate_metric(g, "coop-bisim", 1)
    assert np.allclose(prio.metric, coop.metric, atol=prio.certified_error + 1e-7)
