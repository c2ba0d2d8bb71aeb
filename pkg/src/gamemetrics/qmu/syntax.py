"""Abstract syntax, parser and printer for the quantitative mu-calculus.

Concrete grammar (ASCII)::

    phi ::= NUM | ident | IDENT | "~" phi | phi "|" phi | phi "&" phi
          | phi "(+)" NUM | phi "(-)" NUM | "pre1" "(" phi ")" | "pre2" "(" phi ")"
          | "mu" IDENT "." phi | "nu" IDENT "." phi | "(" phi ")"

Precedence from tightest: ``~``, then the postfix shifts ``(+)``/``(-)``,
then ``&``, then ``|``.  Binders extend as far right as possible.
Identifiers starting with a lowercase letter are observation variables;
uppercase ones are calculus (fixpoint) variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union


class FormulaError(ValueError):
    """Syntax or well-formedness error; ``pos`` is a character offset."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} (at position {pos})")


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Obs:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Shift:
    """``body (+) amount`` when ``up`` else ``body (-) amount``; results are clamped to [0, 1]."""

    body: "Formula"
    amount: float
    up: bool


@dataclass(frozen=True)
class Pre:
    player: int
    body: "Formula"


@dataclass(frozen=True)
class Fix:
    kind: str  # "mu" or "nu"
    var: str
    body: "Formula"


Formula = Union[Const, Obs, Var, Not, Or, And, Shift, Pre, Fix]


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Not, Shift, Pre, Fix)):
        return (f.body,)
    if isinstance(f, (Or, And)):
        return (f.left, f.right)
    return ()


def big_or(parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def big_and(parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def shift(f: Formula, amount: float) -> Formula:
    """``f`` moved by ``amount`` (either sign), or ``f`` itself for a zero shift."""
    if amount > 0:
        return Shift(f, float(amount), True)
    if amount < 0:
        return Shift(f, float(-amount), False)
    return f


# ---------------------------------------------------------------------------
# Lexer / parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<shift>\(\+\)|\(-\))
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[~|&().])
    """,
    re.VERBOSE,
)
_KEYWORDS = {"pre1", "pre2", "mu", "nu"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "ident" and value in _KEYWORDS:
                kind = "kw"
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise FormulaError(f"expected {want!r}, found {got!r}", tok[2])
        self.i += 1
        return tok

    def number(self) -> float:
        _, text, pos = self.take("num")
        value = float(text)
        if not 0.0 <= value <= 1.0:
            raise FormulaError(f"constant {text} outside [0, 1]", pos)
        return value

    def formula(self) -> Formula:
        left = self.conj()
        while self.peek()[1] == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.shifted()
        while self.peek()[1] == "&":
            self.take()
            left = And(left, self.shifted())
        return left

    def shifted(self) -> Formula:
        body = self.unary()
        while self.peek()[0] == "shift":
            up = self.take()[1] == "(+)"
            body = Shift(body, self.number(), up)
        return body

    def unary(self) -> Formula:
        if self.peek()[1] == "~":
            self.take()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "num":
            return Const(self.number())
        if kind == "ident":
            self.take()
            return Var(value) if value[0].isupper() else Obs(value)
        if kind == "kw" and value in ("pre1", "pre2"):
            self.take()
            self.take(value="(")
            body = self.formula()
            self.take(value=")")
            return Pre(int(value[-1]), body)
        if kind == "kw":
            self.take()
            _, name, npos = self.take("ident")
            if not name[0].isupper():
                raise FormulaError(f"bound variable {name!r} must start uppercase", npos)
            self.take(value=".")
            return Fix(value, name, self.formula())
        if value == "(":
            self.take()
            body = self.formula()
            self.take(value=")")
            return body
        raise FormulaError(f"unexpected {value or 'end of input'!r}", pos)


def parse_formula(text: str) -> Formula:
    """Parse ``text``; raises :class:`FormulaError` on syntax or polarity errors."""
    p = _Parser(text)
    f = p.formula()
    tok = p.peek()
    if tok[0] != "eof":
        raise FormulaError(f"unexpected trailing {tok[1]!r}", tok[2])
    bad = polarity_violations(f)
    if bad:
        raise FormulaError(f"bound variable {bad[0]!r} occurs under an odd number of negations")
    return f


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

_PREC = {Or: 1, And: 2, Shift: 3, Not: 4}


def _prec(f: Formula) -> int:
    if isinstance(f, Fix):
        return 0
    return _PREC.get(type(f), 5)


def _num(x: float) -> str:
    return repr(float(x))


def format_formula(f: Formula) -> str:
    """Concrete syntax that parses back to ``f``."""

    def wrap(g: Formula, ok: bool) -> str:
        s = fmt(g)
        return s if ok else f"({s})"

    def fmt(g: Formula) -> str:
        if isinstance(g, Const):
            return _num(g.value)
        if isinstance(g, (Obs, Var)):
            return g.name
        if isinstance(g, Not):
            return "~" + wrap(g.body, _prec(g.body) >= 4)
        if isinstance(g, Shift):
            op = "(+)" if g.up else "(-)"
            return f"{wrap(g.body, _prec(g.body) >= 3)} {op} {_num(g.amount)}"
        if isinstance(g, (Or, And)):
            p = _prec(g)
            op = " | " if isinstance(g, Or) else " & "
            return wrap(g.left, _prec(g.left) >= p) + op + wrap(g.right, _prec(g.right) > p)
        if isinstance(g, Pre):
            return f"pre{g.player}({fmt(g.body)})"
        if isinstance(g, Fix):
            return f"{g.kind} {g.var}. {fmt(g.body)}"
        raise TypeError(f"not a formula: {g!r}")

    return fmt(f)


# ---------------------------------------------------------------------------
# Structural queries
# ---------------------------------------------------------------------------


def iter_nodes(f: Formula) -> Iterator[Formula]:
    seen: set[int] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        yield g
        stack.extend(children(g))


def free_variables(f: Formula) -> frozenset[str]:
    memo: dict[int, frozenset[str]] = {}

    def go(g: Formula) -> frozenset[str]:
        key = id(g)
        if key in memo:
            return memo[key]
        if isinstance(g, Var):
            out = frozenset([g.name])
        elif isinstance(g, Fix):
            out = go(g.body) - {g.var}
        else:
            out = frozenset().union(*(go(c) for c in children(g))) if children(g) else frozenset()
        memo[key] = out
        return out

    return go(f)


def polarity_violations(f: Formula) -> list[str]:
    """Bound variables that occur under an odd number of negations below their binder."""
    bad: list[str] = []

    def go(g: Formula, bound: dict[str, int], negs: int) -> None:
        if isinstance(g, Var):
            if g.name in bound and (negs - bound[g.name]) % 2 == 1:
                bad.append(g.name)
            return
        if isinstance(g, Not):
            go(g.body, bound, negs + 1)
            return
        if isinstance(g, Fix):
            go(g.body, {**bound, g.var: negs}, negs)
            return
        for c in children(g):
            go(c, bound, negs)

    go(f, {}, 0)
    return bad


@dataclass(frozen=True)
class WellformednessReport:
    is_closed: bool
    is_positive: bool
    player_restriction: Union[int, str]  # 1, 2, "both" or "none"
    polarity_ok: bool = True


def check_wellformed(f: Formula) -> WellformednessReport:
    players = set()
    positive = True
    for g in iter_nodes(f):
        if isinstance(g, Pre):
            players.add(g.player)
        if isinstance(g, Not) and not isinstance(g.body, Obs):
            positive = False
    if players == {1, 2}:
        restriction: Union[int, str] = "none"
    elif players:
        restriction = players.pop()
    else:
        restriction = "both"
    return WellformednessReport(
        is_closed=not free_variables(f),
        is_positive=positive,
        player_restriction=restriction,
        polarity_ok=not polarity_violations(f),
    )


def formula_size(f: Formula) -> int:
    """Number of distinct nodes (shared subformulas are counted once)."""
    return sum(1 for _ in iter_nodes(f))


def pre_depth(f: Formula) -> int:
    memo: dict[int, int] = {}

    def go(g: Formula) -> int:
        if id(g) not in memo:
            inner = max((go(c) for c in children(g)), default=0)
            memo[id(g)] = inner + (1 if isinstance(g, Pre) else 0)
        return memo[id(g)]

    return go(f)
