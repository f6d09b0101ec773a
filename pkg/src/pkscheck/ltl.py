"""LTL syntax trees, concrete syntax, negation normal form and complement closure."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

COMPLEMENT_MARKER = "~"

_ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*~?\Z")


class Formula:
    """Base class of all LTL syntax tree nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class TrueConst(Formula):
    def __repr__(self):
        return "TRUE"


@dataclass(frozen=True, repr=False)
class FalseConst(Formula):
    def __repr__(self):
        return "FALSE"


TRUE = TrueConst()
FALSE = FalseConst()


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not _ATOM_RE.match(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")


@dataclass(frozen=True)
class NegAtom(Formula):
    """Negated literal as produced by NNF conversion."""

    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not _ATOM_RE.match(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Finally(Formula):
    operand: Formula


@dataclass(frozen=True)
class Globally(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


UNARY = (Not, Next, Finally, Globally)
BINARY = (And, Or, Implies, Until, Release)
TEMPORAL = (Next, Finally, Globally, Until, Release)


class LtlSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected=()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(sorted(expected))
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class NotInNNFError(ValueError):
    pass


# ---------------------------------------------------------------------------
# structural helpers


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, UNARY):
        return (f.operand,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    return ()


def subformulas(f: Formula) -> list[Formula]:
    """Distinct subformulas in post-order (children before parents)."""
    seen: set[Formula] = set()
    out: list[Formula] = []

    def visit(g):
        for c in children(g):
            visit(c)
        if g not in seen:
            seen.add(g)
            out.append(g)

    visit(f)
    return out


def atoms(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, (Atom, NegAtom)))


def depth(f: Formula) -> int:
    cs = children(f)
    return 0 if not cs else 1 + max(depth(c) for c in cs)


def is_nnf(f: Formula) -> bool:
    return not any(isinstance(g, (Not, Implies)) for g in subformulas(f))


def conj(parts) -> Formula:
    """Left-nested conjunction; empty input gives TRUE."""
    parts = [p for p in parts if p != TRUE]
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts) -> Formula:
    parts = [p for p in parts if p != FALSE]
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# ---------------------------------------------------------------------------
# printing

_PREC_IMPLIES, _PREC_OR, _PREC_AND, _PREC_UNTIL, _PREC_UNARY, _PREC_ATOM = range(1, 7)

_BIN_TOKEN = {And: "&", Or: "|", Implies: "->", Until: "U", Release: "R"}
_UNARY_TOKEN = {Not: "!", Next: "X", Finally: "F", Globally: "G"}


def _prec(f: Formula) -> int:
    if isinstance(f, Implies):
        return _PREC_IMPLIES
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    if isinstance(f, (Until, Release)):
        return _PREC_UNTIL
    if isinstance(f, UNARY) or isinstance(f, NegAtom):
        return _PREC_UNARY
    return _PREC_ATOM


def to_text(f: Formula) -> str:
    """Render in the concrete syntax accepted by :func:`parse_ltl`.

    Parentheses are emitted only where precedence or associativity needs them.
    """
    if isinstance(f, TrueConst):
        return "true"
    if isinstance(f, FalseConst):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, NegAtom):
        return "!" + f.name
    if isinstance(f, UNARY):
        inner = to_text(f.operand)
        if _prec(f.operand) < _PREC_UNARY:
            inner = f"({inner})"
        tok = _UNARY_TOKEN[type(f)]
        return tok + inner if tok == "!" else f"{tok} {inner}"
    if isinstance(f, BINARY):
        p = _prec(f)
        left, right = to_text(f.left), to_text(f.right)
        # & and | associate left; ->, U and R associate right
        if isinstance(f, (And, Or)):
            lwrap, rwrap = _prec(f.left) < p, _prec(f.right) <= p
        else:
            lwrap, rwrap = _prec(f.left) <= p, _prec(f.right) < p
        if lwrap:
            left = f"({left})"
        if rwrap:
            right = f"({right})"
        return f"{left} {_BIN_TOKEN[type(f)]} {right}"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*~?)
  | (?P<op>[!&|()])
    """,
    re.VERBOSE,
)
_UNARY_LETTERS = re.compile(r"[XFG]+\Z")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "atom", "true", "false", one of the operator tokens, or "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            bad = text[pos]
            if bad in "=<>-~":
                j = pos
                while j < len(text) and text[j] in "=<>-~&|":
                    j += 1
                raise LtlSyntaxError(f"unknown operator {text[pos:j]!r}", line, col)
            raise LtlSyntaxError(f"unexpected character {bad!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "ws":
            for i, ch in enumerate(lexeme):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        elif kind == "arrow":
            toks.append(_Tok("->", lexeme, line, col))
        elif kind == "op":
            toks.append(_Tok(lexeme, lexeme, line, col))
        elif lexeme in ("true", "false"):
            toks.append(_Tok(lexeme, lexeme, line, col))
        elif lexeme in ("U", "R"):
            toks.append(_Tok(lexeme, lexeme, line, col))
        elif _UNARY_LETTERS.match(lexeme):
            # "XF" reads as X F, the usual shorthand
            for i, ch in enumerate(lexeme):
                toks.append(_Tok(ch, ch, line, col + i))
        else:
            toks.append(_Tok("atom", lexeme, line, col))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


_PRIMARY_START = {"atom", "true", "false", "(", "!", "X", "F", "G"}


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.open_parens: list[_Tok] = []

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, expected):
        t = self.cur
        if t.kind == "eof" and self.open_parens:
            o = self.open_parens[-1]
            raise LtlSyntaxError(
                f"unbalanced parentheses: '(' opened at line {o.line}, column {o.col} is never closed",
                t.line, t.col, expected,
            )
        if t.kind == ")" and not self.open_parens:
            raise LtlSyntaxError("unbalanced parentheses: unmatched ')'", t.line, t.col, expected)
        shown = "end of input" if t.kind == "eof" else repr(t.text)
        raise LtlSyntaxError(f"unexpected {shown}", t.line, t.col, expected)

    def parse(self) -> Formula:
        f = self.implies()
        if self.cur.kind != "eof":
            self.fail({"->", "|", "&", "U", "R", "end of input"})
        return f

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.cur.kind == "->":
            self.advance()
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.cur.kind == "|":
            self.advance()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.until()
        while self.cur.kind == "&":
            self.advance()
            f = And(f, self.until())
        return f

    def until(self) -> Formula:
        left = self.unary()
        if self.cur.kind in ("U", "R"):
            op = Until if self.advance().kind == "U" else Release
            return op(left, self.until())
        return left

    def unary(self) -> Formula:
        t = self.cur
        if t.kind in ("!", "X", "F", "G"):
            self.advance()
            inner = self.unary()
            return {"!": Not, "X": Next, "F": Finally, "G": Globally}[t.kind](inner)
        return self.primary()

    def primary(self) -> Formula:
        t = self.cur
        if t.kind == "true":
            self.advance()
            return TRUE
        if t.kind == "false":
            self.advance()
            return FALSE
        if t.kind == "atom":
            self.advance()
            return Atom(t.text)
        if t.kind == "(":
            self.open_parens.append(self.advance())
            f = self.implies()
            if self.cur.kind != ")":
                self.fail({")", "->", "|", "&", "U", "R"})
            self.advance()
            self.open_parens.pop()
            return f
        self.fail(_PRIMARY_START)


def parse_ltl(text: str) -> Formula:
    """Parse LTL concrete syntax.

    Precedence from loosest to tightest: ``->`` (right-assoc), ``|``, ``&``,
    ``U``/``R`` (right-assoc), then the prefix operators ``! X F G``.

    >>> parse_ltl("G(edb -> F(cert | fl))")
    Globally(operand=Implies(left=Atom(name='edb'), right=Finally(operand=Or(left=Atom(name='cert'), right=Atom(name='fl')))))
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# rewriting


def to_nnf(f: Formula, negated: bool = False) -> Formula:
    """Push negations down to the literals and eliminate implications."""
    if isinstance(f, Not):
        return to_nnf(f.operand, not negated)
    if isinstance(f, TrueConst):
        return FALSE if negated else TRUE
    if isinstance(f, FalseConst):
        return TRUE if negated else FALSE
    if isinstance(f, Atom):
        return NegAtom(f.name) if negated else f
    if isinstance(f, NegAtom):
        return Atom(f.name) if negated else f
    if isinstance(f, And):
        op = Or if negated else And
        return op(to_nnf(f.left, negated), to_nnf(f.right, negated))
    if isinstance(f, Or):
        op = And if negated else Or
        return op(to_nnf(f.left, negated), to_nnf(f.right, negated))
    if isinstance(f, Implies):
        if negated:
            return And(to_nnf(f.left), to_nnf(f.right, True))
        return Or(to_nnf(f.left, True), to_nnf(f.right))
    if isinstance(f, Next):
        return Next(to_nnf(f.operand, negated))
    if isinstance(f, Finally):
        op = Globally if negated else Finally
        return op(to_nnf(f.operand, negated))
    if isinstance(f, Globally):
        op = Finally if negated else Globally
        return op(to_nnf(f.operand, negated))
    if isinstance(f, Until):
        op = Release if negated else Until
        return op(to_nnf(f.left, negated), to_nnf(f.right, negated))
    if isinstance(f, Release):
        op = Until if negated else Release
        return op(to_nnf(f.left, negated), to_nnf(f.right, negated))
    raise TypeError(f"not a formula: {f!r}")


def negate(f: Formula) -> Formula:
    return to_nnf(Not(f))


def bar(name: str) -> str:
    """Name of the complement partner of an atom (involutive)."""
    if name.endswith(COMPLEMENT_MARKER):
        return name[: -len(COMPLEMENT_MARKER)]
    return name + COMPLEMENT_MARKER


def is_barred(name: str) -> bool:
    return name.endswith(COMPLEMENT_MARKER)


def complement_close_formula(f: Formula) -> Formula:
    """Replace every negated literal ``!p`` by the positive barred atom ``p~``."""
    if not is_nnf(f):
        raise NotInNNFError(f"formula is not in negation normal form: {to_text(f)}")
    return _close(f)


def _close(f: Formula) -> Formula:
    if isinstance(f, NegAtom):
        return Atom(bar(f.name))
    if isinstance(f, UNARY):
        return type(f)(_close(f.operand))
    if isinstance(f, BINARY):
        return type(f)(_close(f.left), _close(f.right))
    return f


def iter_temporal(f: Formula) -> Iterator[Formula]:
    return (g for g in subformulas(f) if isinstance(g, TEMPORAL))
