"""Concurrent stochastic game structures.

A game has an ordered list of states, observation variables valued in
[0, 1], per-state move sets for both players and a transition function
mapping ``(state, move1, move2)`` to a distribution over states.  Input order
of states and moves fixes every matrix layout used elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

MASS_TOL = 1e-9

Distribution = Mapping[str, float]


def parse_probability(value) -> Fraction:
    """Exact rational from an int, a decimal string, a ``"p/q"`` string or a float.

    Floats are converted exactly from their binary value.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"not a probability: {value!r}")
    if isinstance(value, (int, float)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a number: {value!r}") from exc
    raise ValueError(f"not a number: {value!r}")


class GameStructure:
    """Two-player concurrent game structure.

    Construction only checks that the document is well typed (known states,
    parsable numbers).  Semantic invariants such as distributions summing to
    one are reported by :func:`validate_structure`; the numeric methods
    assume a valid game.
    """

    def __init__(
        self,
        states: Sequence[str],
        variables: Mapping[str, Mapping[str, object]],
        moves1: Mapping[str, Sequence[str]],
        moves2: Mapping[str, Sequence[str]],
        delta: Mapping[str, Mapping[str, Mapping[str, Mapping[str, object]]]],
        name: str | None = None,
    ):
        self.states: tuple[str, ...] = tuple(str(s) for s in states)
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state identifiers")
        self.index = {s: i for i, s in enumerate(self.states)}
        self.name = name

        self.var_interp: dict[str, dict[str, Fraction]] = {}
        for var, row in variables.items():
            unknown = set(row) - set(self.index)
            if unknown:
                raise ValueError(f"variable {var!r} mentions unknown state {sorted(unknown)[0]!r}")
            self.var_interp[var] = {s: parse_probability(row.get(s, 0)) for s in self.states}

        self.moves1 = {s: tuple(moves1.get(s, ())) for s in self.states}
        self.moves2 = {s: tuple(moves2.get(s, ())) for s in self.states}

        self.delta: dict[tuple[str, str, str], dict[str, Fraction]] = {}
        for s, by_a1 in delta.items():
            if s not in self.index:
                raise ValueError(f"transition from unknown state {s!r}")
            for a1, by_a2 in by_a1.items():
                for a2, dist in by_a2.items():
                    parsed = {}
                    for t, p in dist.items():
                        if t not in self.index:
                            raise ValueError(f"transition {s}/{a1}/{a2} targets unknown state {t!r}")
                        parsed[t] = parse_probability(p)
                    self.delta[(s, a1, a2)] = parsed

    # -- basic accessors -------------------------------------------------

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<GameStructure{label} with {len(self.states)} states>"

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(self.var_interp)

    def moves(self, player: int, s: str) -> tuple[str, ...]:
        return self.moves1[s] if player == 1 else self.moves2[s]

    @cached_property
    def obs(self) -> np.ndarray:
        """Observation matrix, shape ``(n_vars, n_states)``."""
        return np.array(
            [[float(self.var_interp[v][s]) for s in self.states] for v in self.var_interp],
            dtype=float,
        ).reshape(len(self.var_interp), self.n)

    @cached_property
    def tensors(self) -> dict[str, np.ndarray]:
        """``tensors[s][a1, a2, t]`` = probability of ``s -> t`` under ``(a1, a2)``."""
        out = {}
        for s in self.states:
            T = np.zeros((len(self.moves1[s]), len(self.moves2[s]), self.n))
            for i, a1 in enumerate(self.moves1[s]):
                for j, a2 in enumerate(self.moves2[s]):
                    for t, p in self.delta.get((s, a1, a2), {}).items():
                        T[i, j, self.index[t]] = float(p)
            T.setflags(write=False)
            out[s] = T
        return out

    def player_tensor(self, s: str, player: int) -> np.ndarray:
        """Transition tensor at ``s`` with ``player``'s moves on the first axis."""
        T = self.tensors[s]
        return T if player == 1 else T.transpose(1, 0, 2)

    @cached_property
    def successors(self) -> dict[str, tuple[int, ...]]:
        """Indices of states reachable in one step, per state."""
        out = {}
        for s in self.states:
            mass = self.tensors[s].sum(axis=(0, 1))
            out[s] = tuple(int(i) for i in np.flatnonzero(mass > 0))
        return out

    def to_dict(self) -> dict:
        def num(q: Fraction):
            return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else q.numerator

        delta: dict = {}
        for (s, a1, a2), dist in self.delta.items():
            delta.setdefault(s, {}).setdefault(a1, {})[a2] = {t: num(p) for t, p in dist.items()}
        return {
            "states": list(self.states),
            "variables": {v: {s: num(q) for s, q in row.items()} for v, row in self.var_interp.items()},
            "moves1": {s: list(m) for s, m in self.moves1.items()},
            "moves2": {s: list(m) for s, m in self.moves2.items()},
            "delta": delta,
        }


@dataclass(frozen=True)
class Violation:
    kind: str
    where: tuple[str, ...]
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} at {'/'.join(self.where)}: {self.detail}"


@dataclass(frozen=True)
class StructureClass:
    is_turn_based: bool
    mdp_players: frozenset[int]
    is_deterministic: bool

    def is_mdp_for(self, player: int) -> bool:
        return player in self.mdp_players

    def describe(self) -> str:
        shape = "turn-based" if self.is_turn_based else "concurrent"
        if self.mdp_players:
            shape += "; " + ", ".join(f"{i}-MDP" for i in sorted(self.mdp_players))
        kind = "deterministic" if self.is_deterministic else "probabilistic"
        return f"{shape}; {kind}"


def validate_structure(g: GameStructure) -> list[Violation]:
    """Every invariant violation of ``g``; an empty list means valid."""
    out: list[Violation] = []
    for var, row in g.var_interp.items():
        for s, q in row.items():
            if not 0 <= q <= 1:
                out.append(Violation("value out of [0,1]", (var, s), f"{float(q)}"))
    for s in g.states:
        for player, moves in ((1, g.moves1[s]), (2, g.moves2[s])):
            if not moves:
                out.append(Violation("empty move set", (s,), f"player {player} has no moves"))
            elif len(set(moves)) != len(moves):
                out.append(Violation("duplicate move", (s,), f"player {player}"))
        for a1 in g.moves1[s]:
            for a2 in g.moves2[s]:
                dist = g.delta.get((s, a1, a2))
                if dist is None:
                    out.append(Violation("missing transition", (s, a1, a2), "no distribution given"))
                    continue
                negative = [t for t, p in dist.items() if p < 0]
                if negative:
                    out.append(Violation("negative probability", (s, a1, a2), f"towards {negative[0]}"))
                total = sum(dist.values(), Fraction(0))
                if abs(total - 1) > MASS_TOL:
                    out.append(Violation("mass != 1", (s, a1, a2), f"total mass {float(total):.12g}"))
    for (s, a1, a2) in g.delta:
        if a1 not in g.moves1[s] or a2 not in g.moves2[s]:
            out.append(Violation("unexpected transition", (s, a1, a2), "move pair not available"))
    return out


def classify_structure(g: GameStructure) -> StructureClass:
    mdp = frozenset(
        i for i in (1, 2) if all(len(g.moves(3 - i, s)) == 1 for s in g.states)
    )
    deterministic = all(
        sorted(p for p in dist.values() if p != 0) == [1] for dist in g.delta.values()
    )
    turn_based = False
    turn = g.var_interp.get("turn")
    if turn is not None and all(v in (0, 1) for v in turn.values()):
        turn_based = all(
            (len(g.moves2[s]) == 1) if turn[s] == 1 else (len(g.moves1[s]) == 1)
            for s in g.states
        )
    return StructureClass(turn_based, mdp, deterministic)


# ---------------------------------------------------------------------------
# Mixed moves and expectations
# ---------------------------------------------------------------------------


def as_mix(g: GameStructure, s: str, player: int, x) -> np.ndarray:
    """Normalize a mixed move given as a move->prob mapping, a move name or a vector."""
    moves = g.moves(player, s)
    if isinstance(x, str):
        x = {x: 1.0}
    if isinstance(x, Mapping):
        unknown = [a for a in x if a not in moves]
        if unknown:
            raise ValueError(f"move {unknown[0]!r} is not available to player {player} at {s!r}")
        vec = np.array([float(x.get(a, 0.0)) for a in moves])
    else:
        vec = np.asarray(x, dtype=float)
        if vec.shape != (len(moves),):
            raise ValueError(f"mixed move at {s!r} must have {len(moves)} entries")
    if np.any(vec < -MASS_TOL) or abs(vec.sum() - 1.0) > MASS_TOL:
        raise ValueError(f"not a distribution over the moves of player {player} at {s!r}")
    return vec


def successor_distribution(g: GameStructure, s: str, x1, x2) -> np.ndarray:
    """Next-state distribution at ``s`` under mixed moves ``x1``, ``x2`` (indexed by state)."""
    v1 = as_mix(g, s, 1, x1)
    v2 = as_mix(g, s, 2, x2)
    return np.einsum("i,j,ijt->t", v1, v2, g.tensors[s])


def expectation(g: GameStructure, s: str, x1, x2, k) -> float:
    """Expected value of valuation ``k`` one step from ``s``."""
    return float(successor_distribution(g, s, x1, x2) @ np.asarray(k, dtype=float))


def observation_distance(g: GameStructure, s: str, t: str) -> float:
    """Largest difference of any observation variable between ``s`` and ``t``."""
    if not g.var_interp:
        return 0.0
    i, j = g.index[s], g.index[t]
    return float(np.abs(g.obs[:, i] - g.obs[:, j]).max())


def observation_metric(g: GameStructure) -> np.ndarray:
    """All-pairs :func:`observation_distance`."""
    if not g.var_interp:
        return np.zeros((g.n, g.n))
    O = g.obs
    return np.abs(O[:, :, None] - O[:, None, :]).max(axis=0)


def valuation(g: GameStructure, values: Mapping[str, float] | Sequence[float]) -> np.ndarray:
    """Valuation vector in state order from a mapping (missing states are 0)."""
    if isinstance(values, Mapping):
        return np.array([float(values.get(s, 0.0)) for s in g.states])
    v = np.asarray(values, dtype=float)
    if v.shape != (g.n,):
        raise ValueError(f"valuation needs {g.n} entries")
    return v


def indicator(g: GameStructure, *targets: str) -> np.ndarray:
    return valuation(g, {t: 1.0 for t in targets})
