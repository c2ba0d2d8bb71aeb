"""Reading game files and writing metric and relation reports."""

from __future__ import annotations

import io as _io
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .game import GameStructure

GAME_KEYS = ("states", "variables", "moves1", "moves2", "delta")


class GameFileError(ValueError):
    """The document is not a well-typed game file."""


def game_from_dict(doc: dict, name: str | None = None) -> GameStructure:
    if not isinstance(doc, dict):
        raise GameFileError("game document must be a JSON object")
    missing = [k for k in GAME_KEYS if k not in doc]
    if missing:
        raise GameFileError(f"game document lacks key {missing[0]!r}")
    try:
        return GameStructure(
            doc["states"],
            doc["variables"],
            doc["moves1"],
            doc["moves2"],
            doc["delta"],
            name=name or doc.get("name"),
        )
    except (TypeError, AttributeError) as exc:
        raise GameFileError(f"malformed game document: {exc}") from exc
    except ValueError as exc:
        raise GameFileError(str(exc)) from exc


def loads_game(text: str, name: str | None = None) -> GameStructure:
    """Parse a game document; decimal literals are read exactly."""
    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise GameFileError(f"invalid JSON: {exc}") from exc
    return game_from_dict(doc, name)


def load_game(path) -> GameStructure:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise GameFileError(f"cannot read {path}: {exc.strerror}") from exc
    return loads_game(text, name=path.stem)


def dumps_game(g: GameStructure) -> str:
    return json.dumps(g.to_dict(), indent=2)


def metric_to_tsv(states, matrix) -> str:
    buf = _io.StringIO()
    buf.write("\t".join(["", *states]) + "\n")
    for s, row in zip(states, np.asarray(matrix)):
        buf.write("\t".join([s, *(repr(float(x)) for x in row)]) + "\n")
    return buf.getvalue()


def to_json(obj) -> str:
    """Deterministic JSON: sorted keys, full-precision floats."""
    return json.dumps(obj, indent=2, sort_keys=True, default=_default)


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, Fraction):
        return float(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")
