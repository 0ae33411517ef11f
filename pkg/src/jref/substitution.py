"""Finite parts of infinite idempotent comprehensive substitutions.

A substitution is stored as a support set V of variables together with a
finite binding map whose domain lies inside V.  Its action on the whole
language is the three-case extension: variables in V use their binding,
plain variables outside V are fixed, and a goal variable v(t) outside V
first rewrites its index and then looks the rewritten variable up.  The
constructor validates idempotence, conservativity and comprehension on
the support, so invalid substitutions are unrepresentable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .syntax import (
    App,
    Bottom,
    Expr,
    Goal,
    GoalVar,
    Holds,
    Implies,
    JustAtom,
    JustVar,
    ParseError,
    PropAtom,
    PropVar,
    Term,
    VarRef,
    is_formula,
    is_term,
    parse_formula,
    parse_term,
    print_expr,
    var_expr,
    vars_of,
)


class SubstitutionError(ValueError):
    pass


class SortClash(SubstitutionError):
    pass


class InvalidSubstitution(SubstitutionError):
    pass


def apply_term(bindings: Mapping[VarRef, Expr], t: Term) -> Term:
    """Apply bindings to a term; terms contain no goal variables, so the
    support plays no role here."""
    if isinstance(t, JustAtom):
        return bindings.get(JustVar(t.name), t)  # type: ignore[return-value]
    return App(apply_term(bindings, t.fun), apply_term(bindings, t.arg))


def apply_raw(support: frozenset[VarRef], bindings: Mapping[VarRef, Expr], e: Expr) -> Expr:
    """The three-case extension of a finite binding map, on raw data."""
    if isinstance(e, Bottom):
        return e
    if isinstance(e, PropAtom):
        return bindings.get(PropVar(e.name), e)
    if isinstance(e, JustAtom):
        return bindings.get(JustVar(e.name), e)
    if isinstance(e, App):
        return App(apply_raw(support, bindings, e.fun), apply_raw(support, bindings, e.arg))
    if isinstance(e, Implies):
        return Implies(apply_raw(support, bindings, e.lhs), apply_raw(support, bindings, e.rhs))
    if isinstance(e, Holds):
        return Holds(apply_raw(support, bindings, e.just), apply_raw(support, bindings, e.stmt))
    if isinstance(e, Goal):
        z = GoalVar(e.index)
        if z in support:
            return bindings.get(z, e)
        t2 = apply_term(bindings, e.index)
        return bindings.get(GoalVar(t2), Goal(t2))
    raise TypeError(f"not an expression: {e!r}")


def is_idempotent(support: Iterable[VarRef], bindings: Mapping[VarRef, Expr]) -> bool:
    sup = frozenset(support)
    for z in sup:
        once = apply_raw(sup, bindings, var_expr(z))
        if apply_raw(sup, bindings, once) != once:
            return False
    return True


def is_comprehensive_on(
    support: Iterable[VarRef],
    bindings: Mapping[VarRef, Expr],
    terms: Iterable[Term],
) -> bool:
    """Equal term images must give equal goal-variable images, over the
    given index terms."""
    sup = frozenset(support)
    ts = list(terms)
    for i, t1 in enumerate(ts):
        img1 = apply_raw(sup, bindings, t1)
        for t2 in ts[i + 1:]:
            if img1 == apply_raw(sup, bindings, t2):
                g1 = apply_raw(sup, bindings, Goal(t1))
                g2 = apply_raw(sup, bindings, Goal(t2))
                if g1 != g2:
                    return False
    return True


def _binding_sort_ok(z: VarRef, img: Expr) -> bool:
    if isinstance(z, JustVar):
        return is_term(img)
    return is_formula(img)


@dataclass(frozen=True)
class Substitution:
    """Validated finite part (support, bindings) of an infinite substitution."""

    support: frozenset[VarRef]
    bindings: dict[VarRef, Expr] = field(default_factory=dict)

    def __post_init__(self):
        for z, img in self.bindings.items():
            if not _binding_sort_ok(z, img):
                raise SortClash(f"binding {z} -> {print_expr(img)} mixes sorts")
        # Enlarge the support with variables occurring in images whenever
        # that cannot change the action: plain variables always, goal
        # variables only when their index is fixed by the bindings.
        support = set(self.support)
        for img in self.bindings.values():
            for z in vars_of(img):
                if isinstance(z, GoalVar):
                    if z not in self.bindings and apply_term(self.bindings, z.index) == z.index:
                        support.add(z)
                else:
                    support.add(z)
        object.__setattr__(self, "support", frozenset(support))
        object.__setattr__(self, "bindings", dict(self.bindings))
        missing = set(self.bindings) - self.support
        if missing:
            raise InvalidSubstitution(f"bound variables outside support: {missing}")
        if not is_idempotent(self.support, self.bindings):
            raise InvalidSubstitution("not idempotent")
        if not self._is_conservative():
            raise InvalidSubstitution("not conservative")
        goal_indices = [z.index for z in self.support if isinstance(z, GoalVar)]
        if not is_comprehensive_on(self.support, self.bindings, goal_indices):
            raise InvalidSubstitution("not comprehensive on support")

    def _is_conservative(self) -> bool:
        occurring: set[VarRef] = set(self.bindings)
        for img in self.bindings.values():
            occurring |= vars_of(img)
        allowed = set(self.support)
        for z in self.support:
            if isinstance(z, GoalVar):
                allowed.add(GoalVar(apply_term(self.bindings, z.index)))
        return occurring <= allowed

    @classmethod
    def identity(cls) -> "Substitution":
        return cls(frozenset(), {})

    @property
    def domain(self) -> frozenset[VarRef]:
        return frozenset(self.bindings)

    def apply(self, e: Expr) -> Expr:
        return apply_raw(self.support, self.bindings, e)

    def compose(self, other: "Substitution") -> "Substitution":
        """Substitution acting as self followed by other on expressions whose
        variables lie in the union of the supports.

        Raises InvalidSubstitution when the composite has no valid finite
        part (e.g. the composed action is not idempotent).
        """
        union = self.support | other.support
        bindings: dict[VarRef, Expr] = {}
        for z in sorted(union, key=_var_order):
            image = other.apply(self.apply(var_expr(z)))
            if image != var_expr(z):
                bindings[z] = image
        return Substitution(frozenset(union), bindings)

    def extends_to(self, other: "Substitution") -> bool:
        """Finite-part domain inclusion, the ordering used by saturation."""
        return set(self.bindings) <= set(other.bindings)

    def to_json_dict(self) -> dict:
        names: dict[str, None] = {}
        for z in sorted(self.support, key=_var_order):
            names.setdefault(str(z), None)
        images: dict[str, str] = {}
        for z, img in sorted(self.bindings.items(), key=lambda kv: _var_order(kv[0])):
            key, text = str(z), print_expr(img)
            if images.get(key, text) != text:
                raise SubstitutionError(
                    f"textual form cannot distinguish the two sorts of {key!r}")
            images[key] = text
        return {"support": list(names), "bindings": images}

    @staticmethod
    def from_json_dict(data: dict) -> "Substitution":
        support: set[VarRef] = set()
        for s in data.get("support", []):
            support.update(_parse_var(s))
        bindings: dict[VarRef, Expr] = {}
        for key, img_text in data.get("bindings", {}).items():
            for z, img in _parse_binding(key, img_text):
                bindings[z] = img
        support |= set(bindings)
        return Substitution(frozenset(support), bindings)


def _var_order(z: VarRef) -> tuple[int, str]:
    """Fixed total order: goal variables above plain ones, then printed form."""
    if isinstance(z, PropVar):
        return (0, z.name)
    if isinstance(z, JustVar):
        return (1, z.name)
    return (2, str(z))


def _parse_var(text: str) -> list[VarRef]:
    """A bare identifier denotes the variable of both sorts (positional
    sorting keeps them distinct); v(t) denotes a goal variable."""
    text = text.strip()
    if text.startswith("v("):
        f = parse_formula(text)
        if not isinstance(f, Goal):
            raise SubstitutionError(f"not a variable: {text!r}")
        return [GoalVar(f.index)]
    if not _is_ident(text):
        raise SubstitutionError(f"not a variable: {text!r}")
    return [PropVar(text), JustVar(text)]


def _is_ident(text: str) -> bool:
    return text.isidentifier() and text not in ("false", "v")


def _parse_binding(key: str, img_text: str) -> list[tuple[VarRef, Expr]]:
    key = key.strip()
    if key.startswith("v("):
        f = parse_formula(key)
        if not isinstance(f, Goal):
            raise SubstitutionError(f"not a variable: {key!r}")
        return [(GoalVar(f.index), parse_formula(img_text))]
    if not _is_ident(key):
        raise SubstitutionError(f"not a variable: {key!r}")
    term_img: Term | None
    try:
        term_img = parse_term(img_text)
    except ParseError:
        term_img = None
    formula_img: Expr | None
    try:
        formula_img = parse_formula(img_text)
    except ParseError:
        formula_img = None
    out: list[tuple[VarRef, Expr]] = []
    if formula_img is not None:
        out.append((PropVar(key), formula_img))
    if term_img is not None:
        out.append((JustVar(key), term_img))
    if not out:
        raise SubstitutionError(f"unparsable binding image: {img_text!r}")
    return out
