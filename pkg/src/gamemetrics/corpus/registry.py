"""Expected results for the built-in games."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

# Relations understood by ``ExpectedResult.relation``:
#   "==" measured value within tolerance of expected
#   ">=" / "<=" one-sided bound, tolerance added in the lenient direction
#   "is" exact equality of a flag or structure
AUTO = None  # tolerance = certified error of the computation + 1e-3


@dataclass(frozen=True)
class ExpectedResult:
    quantity: str
    args: dict[str, Any]
    expected: Any
    relation: str = "=="
    tolerance: float | None = AUTO
    origin: str = "stated"  # "stated": value given with the example; "derived": computed by hand
    note: str = ""


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    game: Any
    notes: dict = field(default_factory=dict)
    expected: tuple[ExpectedResult, ...] = ()


def E(quantity, expected, relation="==", tolerance=AUTO, origin="stated", note="", **args):
    return ExpectedResult(quantity, args, expected, relation, tolerance, origin, note)


EXPECTED: dict[str, list[ExpectedResult]] = {
    "fig1": [
        E("valid", True, "is", note="every transition row sums to one"),
        E("classify", "concurrent; probabilistic", "is", origin="derived"),
        E("successor_mass", 5 / 9, s="t", x1={"c": 0, "b": 1}, x2={"f": 0, "g": 1}, target="w",
          note="alpha = 0 on the mixed segment"),
        E("successor_mass", 1 / 2, s="t", x1={"c": 0.5, "b": 0.5}, x2={"f": 0.5, "g": 0.5}, target="w",
          note="alpha = 1/2: transitions to w equal those from s"),
        E("expectation", 1 / 9, s="t", x1="b", x2="f", k={"w": 1}),
        E("expectation", 2 / 3, s="s", x1="a", x2="g", k={"w": 1}),
        E("obs_distance", 1.0, s="u", t="w"),
        E("obs_distance", 0.0, s="s", t="t"),
        E("pre", 4 / 9, player=1, k={"w": 1}, state="t", origin="derived"),
        E("pre", 1 / 3, player=1, k={"w": 1}, state="s", origin="derived"),
        E("metric", 0.06, "<=", 0.0, kind="apriori-sim", player=1, s="s", t="t"),
        E("metric", 0.02, ">=", 0.0, kind="aposteriori-sim", player=1, s="s", t="t"),
        E("metric", 1 / 18, kind="aposteriori-sim", player=1, s="s", t="t", origin="derived",
          note="attained by the even mix at s"),
        E("metric", 0.06, "<=", 0.0, kind="aposteriori-sim", player=2, s="t", t="s"),
        E("metric", 1 / 9, kind="apriori-sim", player=1, s="t", t="s", origin="derived",
          note="pre1 of the w indicator is 4/9 at t and 1/3 at s"),
        E("reciprocity", 0.02, "<=", 0.0, s="s", t="t"),
        E("reciprocity", 0.02, "<=", 0.0, s="t", t="s"),
        E("game_sim_contains", True, "is", player=1, s="s", t="t"),
        E("game_sim_contains", False, "is", player=1, s="t", t="s", origin="derived"),
        E("game_bisim_same_block", False, "is", s="s", t="t", origin="derived",
          note="the reverse direction has distance 1/9"),
        E("brute_force_upper", 0.05, "<=", 1e-9, kind="apriori-sim", player=1, s="s", t="t"),
    ],
    "fig2": [
        E("valid", True, "is"),
        E("classify", "concurrent; deterministic", "is", origin="derived"),
        E("metric", 0.5, kind="apriori-bisim", player=1, s="s", t="t"),
        E("metric", 0.0, kind="coop-bisim", player=1, s="s", t="t"),
        E("metric", 0.5, kind="apriori-sim", player=1, s="t", t="s", origin="derived"),
        E("metric", 0.0, kind="apriori-sim", player=1, s="s", t="t", origin="derived"),
        E("metric", 0.5, kind="apriori-sim", player=2, s="s", t="t", origin="derived"),
        E("game_bisim_same_block", False, "is", s="s", t="t"),
        E("classical_same_block", True, "is", s="s", t="t"),
        E("brute_force_lower", 0.45, ">=", 0.0, kind="apriori-sim", player=1, s="t", t="s"),
        E("brute_force_upper", 0.55, "<=", 0.0, kind="apriori-sim", player=1, s="t", t="s"),
        E("witness_gap", 0.45, ">=", 0.0, s="s", t="t", n=1, player=2),
        E("witness_gap", 0.45, ">=", 0.0, s="t", t="s", n=1, player=1),
    ],
    "fig3": [
        E("valid", True, "is"),
        E("metric", 0.0, kind="apriori-bisim", player=1, s="s", t="t"),
        E("metric", 1.0, kind="coop-bisim", player=1, s="s", t="t"),
        E("game_bisim_same_block", True, "is", s="s", t="t"),
        E("classical_same_block", False, "is", s="s", t="t"),
    ],
    "fig4": [
        E("valid", True, "is"),
        E("mdp_for", True, "is", player=2),
        E("classify", "concurrent; 2-MDP; deterministic", "is", origin="derived"),
        E("metric", 0.0, kind="apriori-sim", player=1, s="s", t="t"),
        E("metric", 1.0, kind="apriori-sim", player=1, s="t", t="s"),
        E("metric", 1.0, kind="coop-sim", player=1, s="s", t="t"),
        E("metric", 0.0, kind="coop-sim", player=1, s="t", t="s"),
        E("game_sim_contains", True, "is", player=1, s="s", t="t"),
        E("game_sim_contains", False, "is", player=1, s="t", t="s"),
        E("witness_gap", 0.9, ">=", 0.0, s="t", t="s", n=1, player=1),
    ],
    "fig5": [
        E("valid", True, "is"),
        E("matrix_game", 0.5, payoff=[[1, 0], [0, 1]]),
        E("matrix_game", 1 / 3, payoff=[[1, 0, 0], [0, 1, 0], [0, 0, 1]]),
        E("pre", 0.5, player=1, k={"u": 1}, state="s"),
        E("pre", 1 / 3, player=1, k={"u": 1}, state="t"),
        E("dpre", 0.0, player=1, k={"u": 1}, state="s", origin="derived"),
        E("eval", 0.5, formula="mu X. (u_flag | pre1(X))", mode="mixed", state="s", origin="derived"),
        E("eval", 1 / 3, formula="mu X. (u_flag | pre1(X))", mode="mixed", state="t", origin="derived"),
        E("eval", 0.0, formula="mu X. (u_flag | pre1(X))", mode="pure", state="s", origin="derived"),
        E("eval", 0.0, formula="mu X. (u_flag | pre1(X))", mode="pure", state="t", origin="derived"),
        E("alt_sim_contains", True, "is", player=1, s="s", t="t"),
        E("game_sim_contains", False, "is", player=1, s="s", t="t"),
    ],
    "fig6": [
        E("valid", True, "is"),
        E("turn_based", True, "is"),
        E("game_bisim_same_block", True, "is", s="s", t="t"),
        E("alt_sim_contains", False, "is", player=1, s="s", t="t"),
        E("lift", False, "is", p={"u": 0.5, "v": 0.5}, q={"u": 1}, pairs=[["u", "u"], ["v", "v"]],
          origin="derived"),
        E("game_equals_classical", True, "is"),
    ],
}
