"""Hilbert calculus: axiom schemes A0-A4, Modus ponens, proof checking.

Proof lines are structured (each cites its scheme and components), so the
non-A2 schemes are correct by construction and checking reduces to the A2
side condition, decided through the unifier, and Modus ponens bookkeeping.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .syntax import (
    App,
    Bottom,
    Formula,
    Goal,
    Holds,
    Implies,
    JustAtom,
    PropAtom,
    Term,
    conj,
    iff,
    parse_formula,
    parse_term,
)
from .unification import equal_mod, mgu, problem_from_assertions


class EmptyProof(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


@dataclass(frozen=True)
class AxiomA0:
    """Classical schemes: 1 is K, 2 is S, 3 is double negation elimination."""

    scheme: int
    a: Formula
    b: Optional[Formula] = None
    c: Optional[Formula] = None

    def __post_init__(self):
        needed = {1: ("b",), 2: ("b", "c"), 3: ()}
        if self.scheme not in needed:
            raise ValueError(f"A0 scheme must be 1..3, got {self.scheme}")
        for name in needed[self.scheme]:
            if getattr(self, name) is None:
                raise ValueError(f"A0 scheme {self.scheme} needs component {name}")


@dataclass(frozen=True)
class AxiomA1:
    s: Term
    t: Term
    f: Formula
    g: Formula


@dataclass(frozen=True)
class AxiomA2:
    asserts: tuple[tuple[Term, Formula], ...]
    f: Formula
    g: Formula

    def __post_init__(self):
        object.__setattr__(self, "asserts", tuple(tuple(p) for p in self.asserts))


@dataclass(frozen=True)
class AxiomA3:
    t: Term
    f: Formula


@dataclass(frozen=True)
class AxiomA4:
    s: Term
    t: Term


@dataclass(frozen=True)
class MP:
    major: int
    minor: int


ProofLine = Union[AxiomA0, AxiomA1, AxiomA2, AxiomA3, AxiomA4, MP]


def assertion_conjunction(asserts: Sequence[tuple[Term, Formula]]) -> Optional[Formula]:
    """t_1:F_1 & ... & t_n:F_n, associated to the right; None when empty."""
    formulas = [Holds(t, f) for t, f in asserts]
    if not formulas:
        return None
    out = formulas[-1]
    for g in reversed(formulas[:-1]):
        out = conj(g, out)
    return out


def render_line(line: ProofLine, earlier: Sequence[Formula] = ()) -> Formula:
    """The formula a proof line claims, fully desugared.  MP lines need the
    claims of the earlier lines."""
    if isinstance(line, AxiomA0):
        a, b, c = line.a, line.b, line.c
        if line.scheme == 1:
            return Implies(a, Implies(b, a))
        if line.scheme == 2:
            return Implies(
                Implies(a, Implies(b, c)),
                Implies(Implies(a, b), Implies(a, c)),
            )
        return Implies(Implies(Implies(a, Bottom()), Bottom()), a)
    if isinstance(line, AxiomA1):
        return Implies(
            Holds(line.s, Implies(line.f, line.g)),
            Implies(Holds(line.t, line.f), Holds(App(line.s, line.t), line.g)),
        )
    if isinstance(line, AxiomA2):
        body = iff(line.f, line.g)
        antecedent = assertion_conjunction(line.asserts)
        return body if antecedent is None else Implies(antecedent, body)
    if isinstance(line, AxiomA3):
        return Implies(Holds(line.t, line.f), Holds(line.t, Goal(line.t)))
    if isinstance(line, AxiomA4):
        st = App(line.s, line.t)
        return Implies(
            Holds(st, Goal(st)),
            conj(
                Holds(line.s, Implies(Goal(line.t), Goal(st))),
                Holds(line.t, Goal(line.t)),
            ),
        )
    if isinstance(line, MP):
        if not (0 <= line.major < len(earlier)) or not (0 <= line.minor < len(earlier)):
            raise IndexOutOfRange(f"MP({line.major},{line.minor}) out of range")
        major = earlier[line.major]
        if not isinstance(major, Implies) or major.lhs != earlier[line.minor]:
            raise ValueError("major premise does not apply to minor premise")
        return major.rhs
    raise TypeError(f"not a proof line: {line!r}")


def check_line(line: ProofLine, earlier: Sequence[Formula] = ()) -> bool:
    """Structured lines are schema-correct by construction; A2 carries the
    side condition F = G mod the assertions, MP the reference checks."""
    if isinstance(line, AxiomA2):
        return equal_mod(line.f, line.g, problem_from_assertions(line.asserts))
    if isinstance(line, MP):
        try:
            render_line(line, earlier)
        except (IndexOutOfRange, ValueError):
            return False
        return True
    return isinstance(line, (AxiomA0, AxiomA1, AxiomA3, AxiomA4))


@dataclass(frozen=True)
class ProofVerdict:
    ok: bool
    first_bad_line: Optional[int] = None
    theorem: Optional[Formula] = None


def check_proof(lines: Sequence[ProofLine]) -> ProofVerdict:
    if not lines:
        raise EmptyProof("a proof needs at least one line")
    claims: list[Formula] = []
    for i, line in enumerate(lines):
        if not check_line(line, claims):
            return ProofVerdict(False, first_bad_line=i)
        claims.append(render_line(line, claims))
    return ProofVerdict(True, theorem=claims[-1])


# ---------------------------------------------------------------------------
# Seeded instance generation (fuzzing support)
# ---------------------------------------------------------------------------

_ATOMS = ("p", "q", "r")
_JUSTS = ("x", "y", "z")


def _random_term(rng: random.Random, depth: int, justs: Sequence[str]) -> Term:
    if depth <= 1 or rng.random() < 0.5:
        return JustAtom(rng.choice(justs))
    return App(
        _random_term(rng, depth - 1, justs),
        _random_term(rng, depth - 1, justs),
    )


def _random_formula(
    rng: random.Random,
    depth: int,
    atoms: Sequence[str],
    justs: Sequence[str],
    allow_goal: bool = True,
) -> Formula:
    if depth <= 1:
        roll = rng.random()
        if roll < 0.15:
            return Bottom()
        if allow_goal and roll < 0.3:
            return Goal(_random_term(rng, 1, justs))
        return PropAtom(rng.choice(atoms))
    roll = rng.random()
    if roll < 0.45:
        return Implies(
            _random_formula(rng, depth - 1, atoms, justs, allow_goal),
            _random_formula(rng, depth - 1, atoms, justs, allow_goal),
        )
    if roll < 0.7:
        return Holds(
            _random_term(rng, max(depth - 1, 1), justs),
            _random_formula(rng, depth - 1, atoms, justs, allow_goal),
        )
    if allow_goal and roll < 0.8:
        return Goal(_random_term(rng, max(depth - 1, 1), justs))
    if roll < 0.9:
        return PropAtom(rng.choice(atoms))
    return Bottom()


def random_axiom_line(
    scheme: str,
    seed: int,
    max_depth: int = 2,
    atoms: Sequence[str] = _ATOMS,
    justs: Sequence[str] = _JUSTS,
) -> ProofLine:
    """A random well-sorted instance of a scheme, deterministic in seed.
    A2 instances are built so that the side condition holds."""
    rng = random.Random(f"{scheme}:{seed}")
    term = lambda: _random_term(rng, max_depth, justs)
    formula = lambda: _random_formula(rng, max_depth, atoms, justs)
    if scheme == "A0":
        which = rng.randrange(1, 4)
        return AxiomA0(which, formula(), formula(), formula())
    if scheme == "A1":
        return AxiomA1(term(), term(), formula(), formula())
    if scheme == "A3":
        return AxiomA3(term(), formula())
    if scheme == "A4":
        return AxiomA4(term(), term())
    if scheme == "A2":
        return _random_a2(rng, max_depth, atoms, justs)
    raise ValueError(f"unknown scheme {scheme!r}")


def _random_a2(rng, max_depth, atoms, justs) -> AxiomA2:
    n = rng.randrange(1, 4)
    asserts = tuple(
        (_random_term(rng, max_depth, justs), _random_formula(rng, max_depth, atoms, justs))
        for _ in range(n)
    )
    theta = mgu(problem_from_assertions(asserts))
    if theta is None or not theta.bindings:
        # Not unifiable (anything is equal mod it) or nothing forced: any
        # pair works in the first case, a syntactically equal one in the second.
        f = _random_formula(rng, max_depth, atoms, justs)
        g = f if theta is not None else _random_formula(rng, max_depth, atoms, justs)
    else:
        items = sorted(theta.bindings.items(), key=lambda kv: str(kv[0]))
        z, image = items[rng.randrange(len(items))]
        from .syntax import var_expr

        f, g = var_expr(z), image
        if rng.random() < 0.5:
            context = _random_formula(rng, max_depth, atoms, justs)
            f, g = Implies(context, f), Implies(context, g)
    line = AxiomA2(asserts, f, g)
    assert check_line(line), "generator must satisfy the A2 side condition"
    return line


def random_axiom_instance(
    scheme: str,
    seed: int,
    max_depth: int = 2,
    atoms: Sequence[str] = _ATOMS,
    justs: Sequence[str] = _JUSTS,
) -> Formula:
    return render_line(random_axiom_line(scheme, seed, max_depth, atoms, justs))


# ---------------------------------------------------------------------------
# JSON proof files
# ---------------------------------------------------------------------------

def line_from_json(data: dict) -> ProofLine:
    rule = data.get("rule")
    if rule == "A0":
        parts = {k: parse_formula(data[k]) for k in ("A", "B", "C") if k in data}
        return AxiomA0(int(data["scheme"]), parts.get("A"), parts.get("B"), parts.get("C"))
    if rule == "A1":
        return AxiomA1(
            parse_term(data["s"]), parse_term(data["t"]),
            parse_formula(data["F"]), parse_formula(data["G"]),
        )
    if rule == "A2":
        asserts = tuple(
            (parse_term(t), parse_formula(f)) for t, f in data.get("asserts", [])
        )
        return AxiomA2(asserts, parse_formula(data["F"]), parse_formula(data["G"]))
    if rule == "A3":
        return AxiomA3(parse_term(data["t"]), parse_formula(data["F"]))
    if rule == "A4":
        return AxiomA4(parse_term(data["s"]), parse_term(data["t"]))
    if rule == "MP":
        return MP(int(data["major"]), int(data["minor"]))
    raise ValueError(f"unknown proof rule {rule!r}")


def line_to_json(line: ProofLine) -> dict:
    from .syntax import print_expr

    if isinstance(line, AxiomA0):
        out = {"rule": "A0", "scheme": line.scheme, "A": print_expr(line.a)}
        if line.b is not None:
            out["B"] = print_expr(line.b)
        if line.c is not None:
            out["C"] = print_expr(line.c)
        return out
    if isinstance(line, AxiomA1):
        return {
            "rule": "A1", "s": print_expr(line.s), "t": print_expr(line.t),
            "F": print_expr(line.f), "G": print_expr(line.g),
        }
    if isinstance(line, AxiomA2):
        return {
            "rule": "A2",
            "asserts": [[print_expr(t), print_expr(f)] for t, f in line.asserts],
            "F": print_expr(line.f), "G": print_expr(line.g),
        }
    if isinstance(line, AxiomA3):
        return {"rule": "A3", "t": print_expr(line.t), "F": print_expr(line.f)}
    if isinstance(line, AxiomA4):
        return {"rule": "A4", "s": print_expr(line.s), "t": print_expr(line.t)}
    if isinstance(line, MP):
        return {"rule": "MP", "major": line.major, "minor": line.minor}
    raise TypeError(f"not a proof line: {line!r}")
