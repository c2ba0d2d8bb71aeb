"""Simulation and bisimulation relations by iterated refinement.

Game (bi)simulation is the kernel of the a priori metric.  A pair ``(s, t)``
survives a refinement round when no valuation ``k`` that is monotone along
the current relation (``k(a) <= k(b)`` whenever ``a R b``) lets player ``i``
do better from ``s`` than from ``t``.  Such valuations are exactly ``C(d_R)``
with ``d_R`` equal to 0 on ``R`` and 1 elsewhere, so each check is one call
to the a priori sub-solver.  Its value is a certified lower bound, hence a
pair is only removed on a genuine violation; pairs kept while the solver used
a grid are flagged as decided within the margin.

Cooperative bisimulation and the pure alternating relations are decided
exactly with LP feasibility of liftings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .game import GameStructure, observation_metric
from .linopt import LpProblem, check_feasibility
from .metrics import DEFAULT_MESH, KINDS, apriori_sup, iterate_metric, tighten

VIOLATION_TOL = 1e-7


@dataclass(frozen=True)
class Partition:
    blocks: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        seen = [s for b in self.blocks for s in b]
        if len(seen) != len(set(seen)) or any(len(b) == 0 for b in self.blocks):
            raise ValueError("blocks must be nonempty and pairwise disjoint")

    def block_of(self, s: str) -> int:
        for i, b in enumerate(self.blocks):
            if s in b:
                return i
        raise KeyError(s)

    def same_block(self, s: str, t: str) -> bool:
        return self.block_of(s) == self.block_of(t)

    def pairs(self) -> frozenset[tuple[str, str]]:
        return frozenset((a, b) for blk in self.blocks for a in blk for b in blk)

    def to_dict(self) -> dict:
        return {"blocks": [list(b) for b in self.blocks]}

    @classmethod
    def from_relation(cls, states, related) -> "Partition":
        """Group states whose rows of ``related`` coincide (``related`` reflexive)."""
        blocks: dict[tuple, list[str]] = {}
        for s in states:
            sig = tuple(related(s, t) for t in states)
            blocks.setdefault(sig, []).append(s)
        return cls(tuple(tuple(b) for b in blocks.values()))


@dataclass(frozen=True)
class RelationSet:
    states: tuple[str, ...]
    pairs: frozenset[tuple[str, str]]
    within_margin: frozenset[tuple[str, str]] = frozenset()

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.pairs

    def is_reflexive(self) -> bool:
        return all((s, s) in self.pairs for s in self.states)

    def is_symmetric(self) -> bool:
        return all((t, s) in self.pairs for s, t in self.pairs)

    def is_transitive(self) -> bool:
        return all(
            (a, c) in self.pairs
            for a, b in self.pairs
            for b2, c in self.pairs
            if b == b2
        )

    def to_dict(self) -> dict:
        order = {s: i for i, s in enumerate(self.states)}

        def key(p):
            return order[p[0]], order[p[1]]

        return {
            "pairs": [list(p) for p in sorted(self.pairs, key=key)],
            "within_margin": [list(p) for p in sorted(self.within_margin, key=key)],
        }


# ---------------------------------------------------------------------------
# Liftings
# ---------------------------------------------------------------------------


def lift_compare(p, q, related) -> tuple[bool, np.ndarray | None]:
    """Is ``p`` below ``q`` in the lifting of a relation?

    ``related`` is a boolean matrix over state indices.  The lifting holds when
    some weight function on related pairs has row sums ``p`` and column sums
    ``q``; that weight function is returned.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    related = np.asarray(related, dtype=bool)
    rows = np.flatnonzero(p > 0)
    cols = np.flatnonzero(q > 0)
    cells = [(a, b) for a in rows for b in cols if related[a, b]]
    n = p.shape[0]
    if not cells:
        return (rows.size == 0 and cols.size == 0), None
    A, rhs = [], []
    for a in rows:
        A.append([1.0 if c[0] == a else 0.0 for c in cells])
        rhs.append(p[a])
    for b in cols:
        A.append([1.0 if c[1] == b else 0.0 for c in cells])
        rhs.append(q[b])
    ok, x = check_feasibility(LpProblem(np.zeros(len(cells)), np.array(A), ("=",) * len(A), np.array(rhs)))
    if not ok:
        return False, None
    delta = np.zeros((n, n))
    for (a, b), w in zip(cells, x):
        delta[a, b] = max(0.0, w)
    return True, delta


def _block_mass_match(target: np.ndarray, options: np.ndarray) -> bool:
    """Can a convex combination of the rows of ``options`` equal ``target``?"""
    m = options.shape[0]
    A = np.vstack([np.ones(m), options.T])
    b = np.concatenate([[1.0], target])
    ok, _ = check_feasibility(LpProblem(np.zeros(m), A, ("=",) * A.shape[0], b))
    return ok


# ---------------------------------------------------------------------------
# Game kernels
# ---------------------------------------------------------------------------


def _relation_metric(related: np.ndarray) -> np.ndarray:
    d = np.where(related, 0.0, 1.0)
    np.fill_diagonal(d, 0.0)
    return tighten(d)


def _initial(g: GameStructure) -> np.ndarray:
    return observation_metric(g) <= 0.0


def game_sim_kernel(g: GameStructure, player: int = 1, mesh: float = DEFAULT_MESH) -> RelationSet:
    """Largest relation ``R`` with equal observations on related pairs and
    ``pre_i(k)(s) <= pre_i(k)(t)`` for every ``k`` monotone along ``R``."""
    related = _initial(g)
    margin: dict[tuple[int, int], bool] = {}
    while True:
        d = _relation_metric(related)
        drop = []
        for a, b in zip(*np.nonzero(related)):
            if a == b:
                continue
            pv = apriori_sup(g, d, g.states[a], g.states[b], player, mesh)
            if pv.value > VIOLATION_TOL:
                drop.append((a, b))
            else:
                margin[(a, b)] = pv.error > 0
        if not drop:
            break
        for a, b in drop:
            related[a, b] = False
    pairs = {(g.states[a], g.states[b]) for a, b in zip(*np.nonzero(related))}
    flagged = {(g.states[a], g.states[b]) for (a, b), m in margin.items() if m and related[a, b]}
    return RelationSet(g.states, frozenset(pairs), frozenset(flagged))


def game_bisim_kernel(g: GameStructure, mesh: float = DEFAULT_MESH) -> Partition:
    """Partition into game-bisimilar classes.

    Valuations monotone along an equivalence are the block-constant ones.  A
    block is split whenever player 1 gains from one of two members against
    the other under such a valuation.  Player 2 needs no separate check: its
    one-step distance is the reverse of player 1's.
    """
    return _refine_partition(g, lambda d, s, t: max(
        apriori_sup(g, d, s, t, 1, mesh).value,
        apriori_sup(g, d, t, s, 1, mesh).value,
    ) > VIOLATION_TOL)


def _refine_partition(g: GameStructure, separated) -> Partition:
    related = _initial(g)
    while True:
        d = _relation_metric(related)
        new = related.copy()
        for a, b in itertools.combinations(range(g.n), 2):
            if related[a, b] and separated(d, g.states[a], g.states[b]):
                new[a, b] = new[b, a] = False
        part = Partition.from_relation(range(g.n), lambda x, y: bool(new[x, y]))
        new = np.zeros_like(related)
        for blk in part.blocks:
            new[np.ix_(blk, blk)] = True
        if np.array_equal(new, related):
            break
        related = new
    return Partition.from_relation(g.states, lambda s, t: bool(related[g.index[s], g.index[t]]))


def classical_bisim_kernel(g: GameStructure) -> Partition:
    """Probabilistic bisimulation when both players jointly pick the moves.

    Every joint move at one state must be matched, in block masses, by a
    combination of joint moves at the other, in both directions.
    """

    def separated(d, s, t):
        blocks = Partition.from_relation(range(g.n), lambda x, y: d[x, y] == 0.0).blocks
        proj = np.zeros((g.n, len(blocks)))
        for j, blk in enumerate(blocks):
            proj[list(blk), j] = 1.0
        ms = g.tensors[s].reshape(-1, g.n) @ proj
        mt = g.tensors[t].reshape(-1, g.n) @ proj
        return not (
            all(_block_mass_match(row, mt) for row in ms)
            and all(_block_mass_match(row, ms) for row in mt)
        )

    return _refine_partition(g, separated)


# ---------------------------------------------------------------------------
# Pure alternating relations
# ---------------------------------------------------------------------------


def _alt_step_ok(g: GameStructure, s: str, t: str, player: int, related: np.ndarray) -> bool:
    Ts = g.player_tensor(s, player)
    Tt = g.player_tensor(t, player)
    for ai in range(Ts.shape[0]):
        matched = False
        for bi in range(Tt.shape[0]):
            if all(
                any(lift_compare(Ts[ai, aj], Tt[bi, bj], related)[0] for aj in range(Ts.shape[1]))
                for bj in range(Tt.shape[1])
            ):
                matched = True
                break
        if not matched:
            return False
    return True


def alt_sim_pure(g: GameStructure, player: int = 1) -> RelationSet:
    """Largest pure-move alternating simulation for ``player``.

    ``(s, t)`` is kept when every pure move of player ``i`` at ``s`` has a
    pure answer at ``t`` such that every pure opponent move at ``t`` is
    answered by a pure opponent move at ``s`` whose successor distribution
    lifts into the one at ``t``.
    """
    related = _initial(g)
    while True:
        drop = [
            (a, b)
            for a, b in zip(*np.nonzero(related))
            if a != b and not _alt_step_ok(g, g.states[a], g.states[b], player, related)
        ]
        if not drop:
            break
        for a, b in drop:
            related[a, b] = False
    pairs = {(g.states[a], g.states[b]) for a, b in zip(*np.nonzero(related))}
    return RelationSet(g.states, frozenset(pairs))


def alt_bisim_pure(g: GameStructure, player: int = 1) -> Partition:
    """Symmetric counterpart of :func:`alt_sim_pure`, as a partition."""

    def separated(d, s, t):
        related = d == 0.0
        return not (_alt_step_ok(g, s, t, player, related) and _alt_step_ok(g, t, s, player, related))

    return _refine_partition(g, separated)


# ---------------------------------------------------------------------------
# Comparison report
# ---------------------------------------------------------------------------


@dataclass
class RelationReport:
    states: tuple[str, ...]
    relations: dict[str, frozenset]
    inclusions: dict[tuple[str, str], bool]
    separations: list[dict] = field(default_factory=list)
    within_margin: dict[str, list] = field(default_factory=dict)

    def to_dict(self) -> dict:
        order = {s: i for i, s in enumerate(self.states)}

        def srt(pairs):
            return [list(p) for p in sorted(pairs, key=lambda p: (order[p[0]], order[p[1]]))]

        return {
            "states": list(self.states),
            "relations": {k: srt(v) for k, v in self.relations.items()},
            "inclusions": [
                {"relation_a": a, "relation_b": b, "included": v}
                for (a, b), v in self.inclusions.items()
            ],
            "separations": self.separations,
            "within_margin": self.within_margin,
        }


def compare_relations(g: GameStructure, mesh: float = DEFAULT_MESH, player: int = 1) -> RelationReport:
    """Every relation on ``g`` side by side, with a witness pair for each strict separation.

    Metric relations are the zero sets (up to certified error) of the metric
    fixpoints.
    """
    rels: dict[str, frozenset] = {}
    margins: dict[str, list] = {}
    gs = game_sim_kernel(g, player, mesh)
    rels["game-sim"] = gs.pairs
    margins["game-sim"] = sorted(gs.within_margin)
    rels["game-bisim"] = game_bisim_kernel(g, mesh).pairs()
    rels["classical-bisim"] = classical_bisim_kernel(g).pairs()
    rels["alt-sim-pure"] = alt_sim_pure(g, player).pairs
    rels["alt-bisim-pure"] = alt_bisim_pure(g, player).pairs()
    for kind in KINDS:
        rep = iterate_metric(g, kind, player, mesh=mesh)
        rels[f"zero:{kind}"] = frozenset(rep.zero_set())
    names = list(rels)
    inclusions = {}
    separations = []
    order = {s: i for i, s in enumerate(g.states)}
    for a in names:
        for b in names:
            if a == b:
                continue
            extra = sorted(rels[a] - rels[b], key=lambda p: (order[p[0]], order[p[1]]))
            inclusions[(a, b)] = not extra
            if extra:
                separations.append(
                    {
                        "relation_a": a,
                        "relation_b": b,
                        "witness_pair": list(extra[0]),
                        "direction": f"{extra[0][0]} related to {extra[0][1]} in {a} but not in {b}",
                    }
                )
    return RelationReport(g.states, rels, inclusions, separations, margins)
