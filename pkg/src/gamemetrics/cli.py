"""Command-line interface for game refinement metrics and relations.

Exit status: 0 on success, 1 when a game violates an invariant or a suite
check fails, 2 on usage, file or formula errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import kernel as K
from . import metrics as M
from .corpus import NAMES, builtin_game, run_suite, suite_table
from .game import classify_structure, validate_structure, valuation
from .io import GameFileError, load_game, metric_to_tsv, to_json
from .qmu import FormulaError, check_wellformed, evaluate, parse_formula

RELATIONS = ("game-sim", "game-bisim", "classical-bisim", "alt-sim-pure", "alt-bisim-pure", "compare")


class UsageError(Exception):
    pass


def _num(x: float) -> str:
    return f"{float(x):.6g}"


def _game(args):
    if args.game and args.corpus:
        raise UsageError("give either --game or --corpus, not both")
    if args.corpus:
        if args.corpus not in NAMES:
            raise UsageError(f"unknown corpus game {args.corpus!r}; available: {', '.join(NAMES)}")
        return builtin_game(args.corpus).game
    if args.game:
        return load_game(args.game)
    raise UsageError("a game is required (--game PATH or --corpus NAME)")


def _matrix_table(states, matrix) -> str:
    width = max(8, *(len(s) for s in states)) + 2
    lines = ["".ljust(width) + "".join(s.rjust(width) for s in states)]
    for s, row in zip(states, matrix):
        lines.append(s.ljust(width) + "".join(_num(x).rjust(width) for x in row))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    g = _game(args)
    violations = validate_structure(g)
    cls = classify_structure(g) if not violations else None
    if args.out == "json":
        print(to_json({
            "valid": not violations,
            "violations": [{"kind": v.kind, "where": list(v.where), "detail": v.detail} for v in violations],
            "class": None if cls is None else {
                "turn_based": cls.is_turn_based,
                "mdp_for": sorted(cls.mdp_players),
                "deterministic": cls.is_deterministic,
            },
        }))
    elif violations:
        for v in violations:
            print(str(v))
    else:
        print(f"valid; {cls.describe()}")
    return 1 if violations else 0


def cmd_eval(args) -> int:
    g = _game(args)
    f = parse_formula(args.formula)
    wf = check_wellformed(f)
    if not wf.is_closed:
        raise FormulaError("formula has free calculus variables")
    iters = 10000 if args.iters is None else args.iters
    ev = evaluate(g, f, mode=args.semantics, tol=args.tol, max_iters=iters)
    fix = [
        {"kind": s.kind, "var": s.var, "runs": s.runs, "max_iterations": s.max_iterations,
         "last_delta": s.last_delta, "converged": s.converged}
        for s in ev.fixpoints
    ]
    if args.out == "json":
        print(to_json({"values": ev.as_dict(g), "semantics": args.semantics, "converged": ev.converged,
                       "fixpoints": fix}))
    elif args.out == "tsv":
        for s, v in zip(g.states, ev.values):
            print(f"{s}\t{float(v)!r}")
    else:
        for s, v in zip(g.states, ev.values):
            print(f"{s}: {_num(v)}")
        for fp in fix:
            status = "converged" if fp["converged"] else "NOT converged"
            print(f"# {fp['kind']} {fp['var']}: {fp['max_iterations']} iterations, "
                  f"last delta {_num(fp['last_delta'])}, {status}")
    return 0


def cmd_metric(args) -> int:
    g = _game(args)
    iters = M.DEFAULT_METRIC_ITERS if args.iters is None else args.iters
    rep = M.iterate_metric(g, args.kind, args.player, iters=iters, tol=args.tol, mesh=args.mesh)
    if args.out == "json":
        print(to_json(rep.to_dict()))
    elif args.out == "tsv":
        sys.stdout.write(metric_to_tsv(rep.states, rep.metric))
    else:
        print(_matrix_table(rep.states, rep.metric))
        status = "converged" if rep.converged else "NOT converged"
        print(f"# {rep.kind}, player {rep.player}: {rep.iterations} iterations, "
              f"last delta {_num(rep.last_delta)}, {status}; mesh {_num(rep.mesh)}, "
              f"certified error {_num(rep.certified_error)}")
    return 0


def cmd_kernel(args) -> int:
    g = _game(args)
    rel = args.relation
    if rel == "compare":
        out = K.compare_relations(g, args.mesh, args.player).to_dict()
    elif rel == "game-sim":
        out = K.game_sim_kernel(g, args.player, args.mesh).to_dict()
    elif rel == "alt-sim-pure":
        out = K.alt_sim_pure(g, args.player).to_dict()
    elif rel == "game-bisim":
        out = K.game_bisim_kernel(g, args.mesh).to_dict()
    elif rel == "classical-bisim":
        out = K.classical_bisim_kernel(g).to_dict()
    else:
        out = K.alt_bisim_pure(g, args.player).to_dict()
    if args.out == "json":
        print(to_json(out))
        return 0
    if "blocks" in out:
        for b in out["blocks"]:
            print("{" + ", ".join(b) + "}")
    elif "pairs" in out:
        margin = {tuple(p) for p in out["within_margin"]}
        for s, t in out["pairs"]:
            flag = "  (within margin)" if (s, t) in margin else ""
            print(f"{s} <= {t}{flag}")
    else:
        for (name, pairs) in out["relations"].items():
            shown = ", ".join(f"({s},{t})" for s, t in pairs if s != t) or "identity only"
            print(f"{name}: {shown}")
        for sep in out["separations"]:
            print(f"separation: {sep['relation_a']} vs {sep['relation_b']}: {sep['direction']}")
    return 0


def _distribution(g, text: str) -> np.ndarray:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"distribution must be a JSON object: {exc}") from exc
    if not isinstance(doc, dict) or any(s not in g.index for s in doc):
        raise UsageError("distribution must map state names to probabilities")
    p = valuation(g, doc)
    if np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
        raise UsageError("distribution must be nonnegative with total mass 1")
    return p


def cmd_transship(args) -> int:
    g = _game(args)
    if args.p is None or args.q is None:
        raise UsageError("transship needs --p and --q")
    p, q = _distribution(g, args.p), _distribution(g, args.q)
    if args.kind:
        iters = M.DEFAULT_METRIC_ITERS if args.iters is None else args.iters
        d = M.iterate_metric(g, args.kind, args.player, iters=iters, tol=args.tol, mesh=args.mesh).metric
    else:
        d = M.tighten(M.observation_metric(g))
    value, plan = M.transship_distance(p, q, d)
    flows = [
        {"from": g.states[a], "to": g.states[b], "mass": float(plan.flow[a, b])}
        for a, b in zip(*np.nonzero(plan.flow > 1e-12))
    ]
    if args.out == "json":
        print(to_json({"value": value, "flows": flows, "metric": args.kind or "observation"}))
    else:
        print(f"distance: {_num(value)}")
        for fl in flows:
            print(f"  {fl['from']} -> {fl['to']}: {_num(fl['mass'])}")
    return 0


def cmd_suite(args) -> int:
    if args.only is not None and args.only not in NAMES:
        raise UsageError(f"unknown corpus game {args.only!r}; available: {', '.join(NAMES)}")
    report = run_suite(mesh=args.mesh, tol=args.tol, only=args.only)
    if args.out == "json":
        print(to_json(report.to_dict()))
    else:
        print(suite_table(report))
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _positive(kind):
    def conv(text):
        try:
            x = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}")
        if x <= 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return x
    return conv


def _nonneg_int(text):
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if x < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text!r}")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gamemetrics", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, game=True, out=("table", "json")):
        if game:
            p.add_argument("--game", metavar="PATH", help="game file (JSON)")
            p.add_argument("--corpus", metavar="NAME", help=f"built-in game: {', '.join(NAMES)}")
        p.add_argument("--out", choices=out, default="table")

    def numeric(p):
        p.add_argument("--player", type=int, choices=(1, 2), default=1)
        p.add_argument("--mesh", type=_positive(float), default=M.DEFAULT_MESH)
        p.add_argument("--tol", type=_positive(float), default=1e-6)
        p.add_argument("--iters", type=_nonneg_int, default=None,
                       help="iteration budget (50 for metrics, 10000 for formula fixpoints)")

    p = sub.add_parser("validate", help="check game invariants and classify the structure")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("eval", help="evaluate a formula")
    common(p, out=("table", "json", "tsv"))
    p.add_argument("--formula", required=True)
    p.add_argument("--semantics", choices=("mixed", "pure"), default="mixed")
    p.add_argument("--tol", type=_positive(float), default=1e-6)
    p.add_argument("--iters", type=_nonneg_int, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("metric", help="compute a metric by Picard iteration")
    common(p, out=("table", "json", "tsv"))
    p.add_argument("--kind", choices=M.KINDS, default="apriori-bisim")
    numeric(p)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("kernel", help="compute a relation")
    common(p)
    p.add_argument("--relation", choices=RELATIONS, default="game-bisim")
    numeric(p)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("transship", help="trans-shipping distance between two distributions")
    common(p)
    p.add_argument("--p", help='JSON object, e.g. \'{"u": 0.5, "v": 0.5}\'')
    p.add_argument("--q")
    p.add_argument("--kind", choices=M.KINDS, default=None,
                   help="metric used as cost (default: observation distance)")
    numeric(p)
    p.set_defaults(func=cmd_transship)

    p = sub.add_parser("suite", help="run the corpus verification suite")
    common(p, game=False)
    p.add_argument("--mesh", type=_positive(float), default=M.DEFAULT_MESH)
    p.add_argument("--tol", type=_positive(float), default=1e-6)
    p.add_argument("--only", metavar="NAME", default=None)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GameFileError, FormulaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
