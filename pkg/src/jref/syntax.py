"""Two-sorted justification language: terms, formulas, reference variables.

Terms are built from justification atoms by binary application `*`.
Formulas are built from `false`, propositional atoms, `->`, justification
assertions `t:F` and goal variables `v(t)`.  The sugar `~ & | <->` is
desugared by the parser; the AST only ever contains the core connectives.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


class ParseError(ValueError):
    """Raised on malformed input, with 1-based line/column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JustAtom:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"

    def __str__(self):
        return print_expr(self)


Term = Union[JustAtom, App]


@dataclass(frozen=True)
class Bottom:
    def __str__(self):
        return "false"


@dataclass(frozen=True)
class PropAtom:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"

    def __str__(self):
        return print_expr(self)


@dataclass(frozen=True)
class Holds:
    just: Term
    stmt: "Formula"

    def __str__(self):
        return print_expr(self)


@dataclass(frozen=True)
class Goal:
    index: Term

    def __str__(self):
        return print_expr(self)


Formula = Union[Bottom, PropAtom, Implies, Holds, Goal]
Expr = Union[Term, Formula]


@dataclass(frozen=True)
class PropVar:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class JustVar:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class GoalVar:
    index: Term

    def __str__(self):
        return f"v({print_expr(self.index)})"


VarRef = Union[PropVar, JustVar, GoalVar]


def is_term(e: Expr) -> bool:
    return isinstance(e, (JustAtom, App))


def is_formula(e: Expr) -> bool:
    return isinstance(e, (Bottom, PropAtom, Implies, Holds, Goal))


def var_expr(z: VarRef) -> Expr:
    """The atomic expression a variable stands for."""
    if isinstance(z, PropVar):
        return PropAtom(z.name)
    if isinstance(z, JustVar):
        return JustAtom(z.name)
    return Goal(z.index)


def expr_var(e: Expr) -> VarRef | None:
    """Inverse of var_expr on variable-shaped expressions, else None."""
    if isinstance(e, PropAtom):
        return PropVar(e.name)
    if isinstance(e, JustAtom):
        return JustVar(e.name)
    if isinstance(e, Goal):
        return GoalVar(e.index)
    return None


# ---------------------------------------------------------------------------
# Desugaring (the only definitions of ~ & | <-> in the system)
# ---------------------------------------------------------------------------

def neg(f: Formula) -> Formula:
    return Implies(f, Bottom())


def conj(a: Formula, b: Formula) -> Formula:
    return neg(Implies(a, neg(b)))


def disj(a: Formula, b: Formula) -> Formula:
    return Implies(neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(Implies(a, b), Implies(b, a))


# ---------------------------------------------------------------------------
# Variable and term collection
# ---------------------------------------------------------------------------

def vars_of(e: Expr) -> frozenset[VarRef]:
    """All variable occurrences; a goal v(t) contributes itself and t's variables."""
    out: set[VarRef] = set()
    _collect_vars(e, out)
    return frozenset(out)


def _collect_vars(e: Expr, out: set[VarRef]) -> None:
    if isinstance(e, JustAtom):
        out.add(JustVar(e.name))
    elif isinstance(e, App):
        _collect_vars(e.fun, out)
        _collect_vars(e.arg, out)
    elif isinstance(e, Bottom):
        pass
    elif isinstance(e, PropAtom):
        out.add(PropVar(e.name))
    elif isinstance(e, Implies):
        _collect_vars(e.lhs, out)
        _collect_vars(e.rhs, out)
    elif isinstance(e, Holds):
        _collect_vars(e.just, out)
        _collect_vars(e.stmt, out)
    elif isinstance(e, Goal):
        out.add(GoalVar(e.index))
        _collect_vars(e.index, out)
    else:
        raise TypeError(f"not an expression: {e!r}")


def terms_of(e: Expr) -> frozenset[Term]:
    """All terms occurring in e, closed under subterms (goal indices included)."""
    out: set[Term] = set()
    _collect_terms(e, out)
    return frozenset(out)


def _add_subterms(t: Term, out: set[Term]) -> None:
    out.add(t)
    if isinstance(t, App):
        _add_subterms(t.fun, out)
        _add_subterms(t.arg, out)


def _collect_terms(e: Expr, out: set[Term]) -> None:
    if is_term(e):
        _add_subterms(e, out)
    elif isinstance(e, (Bottom, PropAtom)):
        pass
    elif isinstance(e, Implies):
        _collect_terms(e.lhs, out)
        _collect_terms(e.rhs, out)
    elif isinstance(e, Holds):
        _add_subterms(e.just, out)
        _collect_terms(e.stmt, out)
    elif isinstance(e, Goal):
        _add_subterms(e.index, out)
    else:
        raise TypeError(f"not an expression: {e!r}")


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Implies):
        yield from subformulas(f.lhs)
        yield from subformulas(f.rhs)
    elif isinstance(f, Holds):
        yield from subformulas(f.stmt)


def has_goal(e: Expr) -> bool:
    return any(isinstance(z, GoalVar) for z in vars_of(e))


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

RESERVED = ("false", "v")

_PUNCT = {
    "->": "ARROW",
    "<->": "IFF",
    "*": "STAR",
    ":": "COLON",
    "~": "TILDE",
    "&": "AMP",
    "|": "PIPE",
    "(": "LP",
    ")": "RP",
}

# Unicode aliases accepted on input; ASCII is always emitted.
_UNICODE = {"⊥": "false", "→": "->", "·": "*"}


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    toks = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c in _UNICODE:
            alias = _UNICODE[c]
            kind = "FALSE" if alias == "false" else _PUNCT[alias]
            toks.append((kind, alias, line, col))
            i += 1
            col += 1
            continue
        if text.startswith("<->", i):
            toks.append(("IFF", "<->", line, col))
            i += 3
            col += 3
            continue
        if text.startswith("->", i):
            toks.append(("ARROW", "->", line, col))
            i += 2
            col += 2
            continue
        if c in _PUNCT:
            toks.append((_PUNCT[c], c, line, col))
            i += 1
            col += 1
            continue
        if c.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "FALSE" if word == "false" else "IDENT"
            toks.append((kind, word, line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(("EOF", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# Parser (recursive descent; JustF backtracks between term:atomic and atomic)
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int, int]:
        return self.toks[self.i]

    def next(self) -> tuple[str, str, int, int]:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, message: str) -> ParseError:
        _, _, line, col = self.peek()
        return ParseError(message, line, col)

    def expect(self, kind: str, what: str) -> tuple[str, str, int, int]:
        if self.peek()[0] != kind:
            raise self.error(f"expected {what}")
        return self.next()

    # Formula := Impl ; Impl := Or ("->" Impl | "<->" Or)?
    def formula(self) -> Formula:
        lhs = self.or_()
        kind = self.peek()[0]
        if kind == "ARROW":
            self.next()
            return Implies(lhs, self.formula())
        if kind == "IFF":
            self.next()
            rhs = self.or_()
            if self.peek()[0] in ("IFF", "ARROW"):
                raise self.error("'<->' is non-associative; parenthesize")
            return iff(lhs, rhs)
        return lhs

    def or_(self) -> Formula:
        f = self.and_()
        while self.peek()[0] == "PIPE":
            self.next()
            f = disj(f, self.and_())
        return f

    def and_(self) -> Formula:
        f = self.neg_()
        while self.peek()[0] == "AMP":
            self.next()
            f = conj(f, self.neg_())
        return f

    def neg_(self) -> Formula:
        negs = 0
        while self.peek()[0] == "TILDE":
            self.next()
            negs += 1
        f = self.justf()
        for _ in range(negs):
            f = neg(f)
        return f

    def justf(self) -> Formula:
        mark = self.i
        try:
            t = self.term()
            self.expect("COLON", "':'")
        except ParseError:
            self.i = mark
            return self.atomic()
        return Holds(t, self.atomic())

    def atomic(self) -> Formula:
        kind, word, _, _ = self.peek()
        if kind == "FALSE":
            self.next()
            return Bottom()
        if kind == "IDENT" and word == "v":
            self.next()
            self.expect("LP", "'(' after 'v'")
            t = self.term()
            self.expect("RP", "')'")
            return Goal(t)
        if kind == "IDENT":
            self.next()
            return PropAtom(word)
        if kind == "LP":
            self.next()
            f = self.formula()
            self.expect("RP", "')'")
            return f
        raise self.error("expected a formula")

    def term(self) -> Term:
        t = self.factor()
        while self.peek()[0] == "STAR":
            self.next()
            t = App(t, self.factor())
        return t

    def factor(self) -> Term:
        kind, word, _, _ = self.peek()
        if kind == "IDENT":
            if word in RESERVED:
                raise self.error(f"reserved word {word!r} in term position")
            self.next()
            return JustAtom(word)
        if kind == "LP":
            self.next()
            t = self.term()
            self.expect("RP", "')'")
            return t
        raise self.error("expected a term")


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek()[0] != "EOF":
        raise p.error("trailing input after formula")
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.peek()[0] != "EOF":
        raise p.error("trailing input after term")
    return t


def parse_expr(text: str) -> Expr:
    """Parse as a term if possible, otherwise as a formula.

    Bare atoms are ambiguous between the sorts; the formula reading wins,
    so use parse_term when a term is required.
    """
    try:
        return parse_term(text)
    except ParseError:
        return parse_formula(text)


# ---------------------------------------------------------------------------
# Printer (minimal parentheses; compound justifications are parenthesized)
# ---------------------------------------------------------------------------

def print_expr(e: Expr) -> str:
    if is_term(e):
        return _print_term(e)
    return _print_formula(e)


def _print_term(t: Term) -> str:
    if isinstance(t, JustAtom):
        return t.name
    left = _print_term(t.fun)
    right = _print_term(t.arg)
    if isinstance(t.arg, App):
        right = f"({right})"
    return f"{left}*{right}"


def _print_formula(f: Formula) -> str:
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, PropAtom):
        return f.name
    if isinstance(f, Goal):
        return f"v({_print_term(f.index)})"
    if isinstance(f, Holds):
        just = _print_term(f.just)
        if isinstance(f.just, App):
            just = f"({just})"
        stmt = _print_formula(f.stmt)
        if isinstance(f.stmt, (Implies, Holds)):
            stmt = f"({stmt})"
        return f"{just}:{stmt}"
    if isinstance(f, Implies):
        lhs = _print_formula(f.lhs)
        if isinstance(f.lhs, Implies):
            lhs = f"({lhs})"
        return f"{lhs} -> {_print_formula(f.rhs)}"
    raise TypeError(f"not a formula: {f!r}")
