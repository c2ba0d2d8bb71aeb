import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_random_game
from gamemetrics.game import indicator
from gamemetrics.metrics import iterate_metric
from gamemetrics.qmu import (
    Const,
    Fix,
    FormulaError,
    Not,
    Obs,
    Or,
    Pre,
    Var,
    check_wellformed,
    dpre,
    evaluate,
    format_formula,
    parse_formula,
    pre,
    random_formula,
    synthesize_witness,
    witness_report,
)

REACH = "mu X. (u_flag | pre1(X))"


# -- syntax ------------------------------------------------------------------


def test_parse_reachability():
    f = parse_formula("mu X. (goal | pre1(X))")
    assert f == Fix("mu", "X", Or(Obs("goal"), Pre(1, Var("X"))))


def test_parse_safety():
    f = parse_formula("nu X. (safe & pre1(X))")
    assert isinstance(f, Fix) and f.kind == "nu"


def test_negative_polarity_rejected():
    with pytest.raises(FormulaError):
        parse_formula("mu X. ~X")
    assert parse_formula("mu X. ~~X") == Fix("mu", "X", Not(Not(Var("X"))))


@pytest.mark.parametrize(
    "text, pos",
    [("pre1(x", 6), ("x | ", 4), ("1.5", 0), ("x $ y", 2), ("mu x. x", 3), ("x y", 2)],
)
def test_syntax_errors_carry_positions(text, pos):
    with pytest.raises(FormulaError) as info:
        parse_formula(text)
    assert info.value.pos == pos


def test_precedence():
    f = parse_formula("~a (+) 0.5 & b | c")
    assert format_formula(f) == "~a (+) 0.5 & b | c"
    assert parse_formula("a | b & c") == Or(Obs("a"), parse_formula("b & c"))
    # binders extend to the right
    assert parse_formula("mu X. a | X") == Fix("mu", "X", Or(Obs("a"), Var("X")))


def test_wellformedness_examples():
    r = check_wellformed(parse_formula("pre1(0.5)"))
    assert r.is_closed and r.is_positive and r.player_restriction == 1
    assert check_wellformed(parse_formula("pre1(pre2(x))")).player_restriction == "none"
    r = check_wellformed(parse_formula("mu X. (x | pre1(X))"))
    assert r.is_closed and r.is_positive and r.player_restriction == 1
    assert not check_wellformed(parse_formula("pre1(X)")).is_closed
    assert not check_wellformed(parse_formula("~pre1(x)")).is_positive
    assert check_wellformed(parse_formula("~x & 0.2")).is_positive


@given(st.integers(0, 2**31), st.booleans())
def test_print_parse_round_trip(seed, positive):
    f = random_formula(np.random.default_rng(seed), ["x", "y_flag"], depth=4, positive=positive)
    text = format_formula(f)
    assert parse_formula(text) == f
    assert format_formula(parse_formula(text)) == text


@given(st.integers(0, 2**31))
def test_random_positive_formulas_are_positive(seed):
    f = random_formula(np.random.default_rng(seed), ["x"], depth=4, players=[1], positive=True)
    r = check_wellformed(f)
    assert r.is_closed and r.is_positive and r.player_restriction in (1, "both")


# -- pre operators -------------------------------------------------------------


def test_pre_examples(corpus):
    g5 = corpus["fig5"]
    u = indicator(g5, "u")
    assert pre(g5, 1, u)[g5.index["s"]] == pytest.approx(1 / 2)
    assert pre(g5, 1, u)[g5.index["t"]] == pytest.approx(1 / 3)
    assert dpre(g5, 1, u)[g5.index["s"]] == 0.0
    g1 = corpus["fig1"]
    assert pre(g1, 1, indicator(g1, "w"))[g1.index["t"]] == pytest.approx(4 / 9)
    for op in (pre, dpre):
        assert np.allclose(op(g1, 2, np.full(4, 0.3)), 0.3)


@given(st.integers(0, 2**31), st.integers(1, 2))
def test_pre_monotone_and_nonexpansive(seed, player):
    g = make_random_game(seed, n_states=4, max_moves=3)
    rng = np.random.default_rng(seed)
    k = rng.uniform(0, 1, g.n)
    kp = np.clip(k + rng.uniform(0, 0.3, g.n), 0, 1)
    assert np.all(pre(g, player, k) <= pre(g, player, kp) + 1e-9)
    other = rng.uniform(0, 1, g.n)
    gap = np.abs(pre(g, player, k) - pre(g, player, other)).max()
    assert gap <= np.abs(k - other).max() + 1e-7


@given(st.integers(0, 2**31))
def test_pre_complement_duality(seed):
    g = make_random_game(seed, n_states=4, max_moves=3)
    k = np.random.default_rng(seed).uniform(0, 1, g.n)
    assert np.allclose(pre(g, 1, k), 1 - pre(g, 2, 1 - k), atol=1e-6)


@given(st.integers(0, 2**31), st.integers(1, 2))
def test_dpre_below_pre(seed, player):
    g = make_random_game(seed, n_states=4, max_moves=3)
    k = np.random.default_rng(seed).uniform(0, 1, g.n)
    assert np.all(dpre(g, player, k) <= pre(g, player, k) + 1e-9)


def test_dpre_equals_pre_on_one_player_games():
    for seed in range(10):
        g = make_random_game(seed, n_states=4, max_moves=3, mdp_for=1)
        k = np.random.default_rng(seed).uniform(0, 1, g.n)
        assert np.allclose(dpre(g, 1, k), pre(g, 1, k))


# -- evaluation ---------------------------------------------------------------


def test_constant_evaluates_everywhere(corpus):
    ev = evaluate(corpus["fig3"], parse_formula("0.3"))
    assert np.allclose(ev.values, 0.3)


def test_reachability_mixed_and_pure(corpus):
    g = corpus["fig5"]
    mixed = evaluate(g, parse_formula(REACH)).as_dict(g)
    assert mixed == pytest.approx({"s": 1 / 2, "t": 1 / 3, "u": 1.0, "v": 0.0})
    pure = evaluate(g, parse_formula(REACH), mode="pure").as_dict(g)
    assert pure == pytest.approx({"s": 0.0, "t": 0.0, "u": 1.0, "v": 0.0})


def test_shifts_clamp(corpus):
    g = corpus["fig5"]
    assert np.allclose(evaluate(g, parse_formula("u_flag (+) 0.5")).values, [0.5, 0.5, 1, 0.5])
    assert np.allclose(evaluate(g, parse_formula("u_flag (-) 0.5")).values, [0, 0, 0.5, 0])


def test_nu_starts_from_top(corpus):
    g = corpus["fig5"]
    assert np.allclose(evaluate(g, parse_formula("nu X. pre1(X)")).values, 1.0)
    assert np.allclose(evaluate(g, parse_formula("mu X. pre1(X)")).values, 0.0)


def test_unbound_and_unknown_names(corpus):
    g = corpus["fig5"]
    with pytest.raises(FormulaError):
        evaluate(g, parse_formula("pre1(X)"))
    with pytest.raises(FormulaError):
        evaluate(g, parse_formula("nope"))
    env = {"X": np.full(4, 0.25)}
    assert np.allclose(evaluate(g, parse_formula("X"), env).values, 0.25)


def test_nonconvergence_reported(corpus):
    g = corpus["fig1"]
    # the w-mass from t under repeated pre converges geometrically, not in one step
    f = parse_formula("mu X. (w_flag | pre1(X) (-) 0.01)")
    ev = evaluate(g, f, max_iters=1)
    assert not ev.converged
    assert ev.fixpoints[0].max_iterations == 1
    assert evaluate(g, f).converged


def test_invalid_arguments(corpus):
    with pytest.raises(ValueError):
        evaluate(corpus["fig1"], Const(0.5), mode="fuzzy")
    with pytest.raises(ValueError):
        evaluate(corpus["fig1"], Const(0.5), tol=0)


@given(st.integers(0, 2**31))
def test_semantics_in_unit_interval_and_double_negation(seed):
    g = make_random_game(seed, n_states=3, max_moves=2)
    f = random_formula(np.random.default_rng(seed), g.variables, depth=3)
    v = evaluate(g, f, max_iters=500).values
    assert np.all((v >= 0) & (v <= 1))
    # 1 - (1 - v) is v up to one rounding
    assert np.allclose(evaluate(g, Not(Not(f)), max_iters=500).values, v, rtol=0, atol=1e-15)


# -- witnesses ------------------------------------------------------------------


def test_witness_base_case(corpus):
    g = corpus["fig5"]
    w = witness_report(g, "v", "u", 0)
    assert w.formula == Not(Obs("u_flag")) or w.formula == Obs("v_flag")
    assert w.gap == 1.0


def test_witness_separates_fig2(corpus):
    g = corpus["fig2"]
    f = synthesize_witness(g, "s", "t", 1, 0.05, player=2)
    v = evaluate(g, f).as_dict(g)
    assert v["s"] - v["t"] >= 0.45
    r = check_wellformed(f)
    assert r.is_closed and r.is_positive and r.player_restriction == 2


def test_witness_gap_bounded_when_distance_zero(corpus):
    g = corpus["fig1"]
    for n in range(3):
        f = synthesize_witness(g, "s", "t", n, 0.01)
        v = evaluate(g, f).as_dict(g)
        assert v["s"] - v["t"] <= 0.01


def test_witness_rejects_bad_arguments(corpus):
    with pytest.raises(ValueError):
        synthesize_witness(corpus["fig1"], "s", "s", 1)
    with pytest.raises(ValueError):
        synthesize_witness(corpus["fig1"], "s", "t", -1)


@given(st.integers(0, 2**31), st.integers(0, 2))
def test_witness_sound_both_ways(seed, n):
    g = make_random_game(seed, n_states=3, max_moves=2, mdp_for=1)
    rng = np.random.default_rng(seed)
    a, b = rng.choice(g.n, 2, replace=False)
    s, t = g.states[a], g.states[b]
    w = witness_report(g, s, t, n, eps=0.05, mesh=0.25)
    v = evaluate(g, w.formula).values
    gap = v[a] - v[b]
    assert gap == pytest.approx(w.gap, abs=1e-6)
    # reaches the distance ...
    assert gap >= w.target - 0.05
    # ... and never exceeds it (exact on one-player games)
    d = iterate_metric(g, "apriori-sim", 1, iters=n, tol=1e-12, mesh=0.25)
    assert gap <= d.metric[a, b] + 1e-6


def test_witness_drops_neutral_constants(corpus):
    g = corpus["fig4"]
    w = witness_report(g, "t", "s", 1)
    assert w.formula == parse_formula("pre1(u_flag)")
    assert w.gap == pytest.approx(1.0) and w.size == 2
