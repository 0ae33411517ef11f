"""Conditional unification with reference variables.

A problem is a finite set of conditional equalities A=B => C=D.  A unifier
is a comprehensive idempotent substitution making every triggered equation
hold.  The solver eliminates variables on an unconditional work set and
iterates two closure rules to a fixpoint: equations of clauses whose
condition pair is equal under the current candidate, and goal-variable
bookkeeping for indices rewritten by the candidate.  Every binding it adds
is forced for all unifiers, which yields most-general unifiers in the weak
sense: any unifier factors through the result.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .substitution import (
    InvalidSubstitution,
    Substitution,
    apply_raw,
    apply_term,
    is_comprehensive_on,
    _var_order,
)
from .syntax import (
    App,
    Bottom,
    Expr,
    Formula,
    Goal,
    GoalVar,
    Holds,
    Implies,
    JustAtom,
    JustVar,
    PropAtom,
    PropVar,
    Term,
    VarRef,
    expr_var,
    has_goal,
    is_term,
    print_expr,
    terms_of,
    var_expr,
    vars_of,
)

REFERENTIAL = "referential"
PLAIN = "plain"


class PlainModeError(ValueError):
    """A plain-mode problem mentions a goal variable."""


class ResourceBound(RuntimeError):
    """The brute-force enumeration exceeded its configured budget."""


Clause = tuple[Expr, Expr, Expr, Expr]


@dataclass(frozen=True)
class ConditionalProblem:
    clauses: tuple[Clause, ...]
    mode: str = REFERENTIAL

    def __post_init__(self):
        if self.mode not in (REFERENTIAL, PLAIN):
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for a, b, c, d in self.clauses:
            if is_term(a) != is_term(b) or is_term(c) != is_term(d):
                raise ValueError("clause sides must have matching sorts")
        if self.mode == PLAIN and any(has_goal(e) for e in self.exprs()):
            raise PlainModeError("plain mode forbids goal variables")

    def exprs(self) -> Iterator[Expr]:
        for clause in self.clauses:
            yield from clause

    def variables(self) -> frozenset[VarRef]:
        out: set[VarRef] = set()
        for e in self.exprs():
            out |= vars_of(e)
        return frozenset(out)

    def terms(self) -> frozenset[Term]:
        out: set[Term] = set()
        for e in self.exprs():
            out |= terms_of(e)
        return frozenset(out)


def problem_from_assertions(
    asserts: Sequence[tuple[Term, Formula]], mode: str = REFERENTIAL
) -> ConditionalProblem:
    """The problem t_i=t_j => F_i=F_j over all pairs of assertions.

    Duplicate assertions and the reflexive i=j clauses are pruned; they are
    tautological and cannot change the unifier set.
    """
    unique: list[tuple[Term, Formula]] = []
    seen = set()
    for t, f in asserts:
        if (t, f) not in seen:
            seen.add((t, f))
            unique.append((t, f))
    clauses = []
    for i, (ti, fi) in enumerate(unique):
        for tj, fj in unique[i + 1:]:
            clauses.append((ti, tj, fi, fj))
    return ConditionalProblem(tuple(clauses), mode)


def unifies_check(s: Substitution, prob: ConditionalProblem) -> bool:
    """Does s unify the problem?  In referential mode this includes the
    comprehension condition over the problem's terms and their images."""
    for a, b, c, d in prob.clauses:
        if s.apply(a) == s.apply(b) and s.apply(c) != s.apply(d):
            return False
    if prob.mode == REFERENTIAL:
        ts = set(prob.terms())
        ts |= {s.apply(t) for t in ts}
        if not is_comprehensive_on(s.support, s.bindings, ts):
            return False
    return True


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------

class _Clash(Exception):
    pass


_LOOP_CAP = 10_000


class _Solver:
    def __init__(self, prob: ConditionalProblem, seed: Optional[Substitution] = None):
        self.prob = prob
        self.bindings: dict[VarRef, Expr] = dict(seed.bindings) if seed else {}
        self.seed_support = frozenset(seed.support) if seed else frozenset()

    # -- normalization ------------------------------------------------------

    def _chase(self, z: VarRef, default: Expr, active: frozenset) -> Expr:
        img = self.bindings.get(z)
        if img is None:
            return default
        if z in active:
            # A lookup cycle means the variable must contain itself under
            # every unifier: an occurs failure.
            raise _Clash(f"cyclic constraint on {z}")
        return self._norm(img, active | {z})

    def _norm(self, e: Expr, active: frozenset = frozenset()) -> Expr:
        if isinstance(e, Bottom):
            return e
        if isinstance(e, PropAtom):
            return self._chase(PropVar(e.name), e, active)
        if isinstance(e, JustAtom):
            return self._chase(JustVar(e.name), e, active)
        if isinstance(e, App):
            return App(self._norm(e.fun, active), self._norm(e.arg, active))
        if isinstance(e, Implies):
            return Implies(self._norm(e.lhs, active), self._norm(e.rhs, active))
        if isinstance(e, Holds):
            return Holds(self._norm(e.just, active), self._norm(e.stmt, active))
        if isinstance(e, Goal):
            z = GoalVar(e.index)
            if z in self.bindings:
                return self._chase(z, e, active)
            t2 = self._norm(e.index, active)
            z2 = GoalVar(t2)
            if z2 in self.bindings:
                return self._chase(z2, Goal(t2), active)
            return Goal(t2)
        raise TypeError(f"not an expression: {e!r}")

    # -- binding ------------------------------------------------------------

    def _occurs(self, z: VarRef, e: Expr) -> bool:
        if var_expr(z) == e:
            return True
        if isinstance(e, App):
            return self._occurs(z, e.fun) or self._occurs(z, e.arg)
        if isinstance(e, Implies):
            return self._occurs(z, e.lhs) or self._occurs(z, e.rhs)
        if isinstance(e, Holds):
            return self._occurs(z, e.just) or self._occurs(z, e.stmt)
        if isinstance(e, Goal):
            # A goal variable occurs only as itself; its index variables
            # matter for rewriting, not for the occurs check.
            if isinstance(z, JustVar):
                return self._occurs(z, e.index)
            return False
        return False

    def _bind(self, z: VarRef, img: Expr) -> None:
        if self._occurs(z, img):
            raise _Clash(f"occurs check: {z} in {print_expr(img)}")
        self.bindings[z] = img

    # -- unification of a forced pair ---------------------------------------

    def _unify(self, x: Expr, y: Expr) -> bool:
        before = len(self.bindings)
        stack: list[tuple[Expr, Expr]] = [(x, y)]
        while stack:
            a, b = stack.pop()
            a = self._norm(a)
            b = self._norm(b)
            if a == b:
                continue
            va, vb = expr_var(a), expr_var(b)
            if va is not None and vb is not None:
                # Bind the larger variable to the smaller, for determinism.
                if _var_order(va) < _var_order(vb):
                    va, a, b = vb, b, a
                self._bind(va, b)
            elif va is not None:
                self._bind(va, b)
            elif vb is not None:
                self._bind(vb, a)
            elif isinstance(a, Implies) and isinstance(b, Implies):
                stack.append((a.lhs, b.lhs))
                stack.append((a.rhs, b.rhs))
            elif isinstance(a, Holds) and isinstance(b, Holds):
                stack.append((a.just, b.just))
                stack.append((a.stmt, b.stmt))
            elif isinstance(a, App) and isinstance(b, App):
                stack.append((a.fun, b.fun))
                stack.append((a.arg, b.arg))
            else:
                raise _Clash(f"{print_expr(a)} does not match {print_expr(b)}")
        return len(self.bindings) > before

    # -- closure rules ------------------------------------------------------

    def _goal_vars_in_sight(self) -> list[GoalVar]:
        out: set[GoalVar] = set()
        for e in self.prob.exprs():
            out |= {z for z in vars_of(e) if isinstance(z, GoalVar)}
        for z, img in list(self.bindings.items()):
            if isinstance(z, GoalVar):
                out.add(z)
            out |= {w for w in vars_of(img) if isinstance(w, GoalVar)}
        return sorted(out, key=_var_order)

    def _close_goal_indices(self) -> bool:
        """Keep goal variables coherent with the rewriting of their indices.

        A variable v(t) whose index moved to t' under the candidate shares
        its value with v(t'); if it has none, it is bound explicitly so the
        finite part stays comprehensive.
        """
        changed = False
        for z in self._goal_vars_in_sight():
            t2 = self._norm(z.index)
            if t2 == z.index:
                continue
            changed |= self._unify(Goal(z.index), Goal(t2))
            if z not in self.bindings:
                self._bind(z, self._norm(Goal(t2)))
                changed = True
        return changed

    def run(self) -> Optional[dict[VarRef, Expr]]:
        try:
            for _ in range(_LOOP_CAP):
                changed = False
                for a, b, c, d in self.prob.clauses:
                    if self._norm(a) == self._norm(b):
                        changed |= self._unify(c, d)
                if self.prob.mode == REFERENTIAL:
                    changed |= self._close_goal_indices()
                if not changed:
                    break
            else:
                raise RuntimeError("unification fixpoint did not stabilize")
            # Canonicalize: every image fully normalized.
            for _ in range(_LOOP_CAP):
                renormed = {z: self._norm(img) for z, img in self.bindings.items()}
                if renormed == self.bindings:
                    break
                self.bindings = renormed
            else:
                raise RuntimeError("image normalization did not stabilize")
        except _Clash:
            return None
        return self.bindings


def _result_substitution(
    prob: ConditionalProblem,
    bindings: dict[VarRef, Expr],
    extra_support: frozenset[VarRef] = frozenset(),
) -> Substitution:
    support: set[VarRef] = set(prob.variables()) | set(bindings) | set(extra_support)
    for z, img in bindings.items():
        support |= vars_of(var_expr(z))
        support |= vars_of(img)
    return Substitution(frozenset(support), bindings)


def mgu(prob: ConditionalProblem) -> Optional[Substitution]:
    """Most general unifier in the weak sense, or None when not unifiable."""
    bindings = _Solver(prob).run()
    if bindings is None:
        return None
    return _result_substitution(prob, bindings)


def mgu_extending(prob: ConditionalProblem, base: Substitution) -> Optional[Substitution]:
    """As mgu, seeded with base (an m.g.u. of a subproblem); on success the
    result's domain extends base's domain."""
    bindings = _Solver(prob, seed=base).run()
    if bindings is None:
        return None
    image_vars: set[VarRef] = set()
    for img in base.bindings.values():
        image_vars |= vars_of(img)
    return _result_substitution(prob, bindings, frozenset(image_vars))


def equal_mod(a: Expr, b: Expr, prob: ConditionalProblem) -> bool:
    """A = B mod S: equal under every unifier of S.  Vacuously true when S
    is not unifiable; otherwise decided on the m.g.u."""
    if is_term(a) != is_term(b):
        raise ValueError("expressions must have the same sort")
    theta = mgu(prob)
    if theta is None:
        return True
    return theta.apply(a) == theta.apply(b)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def _term_pool(alphabet: Sequence[str], depth: int) -> list[Term]:
    pool: list[Term] = [JustAtom(a) for a in sorted(alphabet)]
    prev: list[Term] = list(pool)
    for _ in range(depth - 1):
        new = [App(s, t) for s in prev for t in prev]
        seen = set(pool)
        prev = pool + [t for t in new if t not in seen]
        pool = prev
    return pool


def _formula_pool(alphabet: Sequence[str], depth: int) -> list[Formula]:
    terms = _term_pool(alphabet, max(depth - 1, 1))
    pool: list[Formula] = [Bottom()] + [PropAtom(a) for a in sorted(alphabet)]
    prev = list(pool)
    for _ in range(depth - 1):
        new: list[Formula] = [Implies(a, b) for a in prev for b in prev]
        new += [Holds(t, f) for t in terms for f in prev]
        seen = set(pool)
        pool = pool + [f for f in new if f not in seen]
        prev = pool
    return pool


def brute_force_unifiers(
    prob: ConditionalProblem,
    alphabet: Sequence[str],
    depth: int,
    max_candidates: int = 2_000_000,
) -> Iterator[Substitution]:
    """Enumerate every unifier whose bindings map the problem's variables
    (plus goal variables of its terms) to expressions of tree depth at most
    `depth` over the alphabet.  Exhaustive within that bound; raises
    ResourceBound when the candidate space exceeds max_candidates."""
    variables = set(prob.variables())
    if prob.mode == REFERENTIAL:
        variables |= {GoalVar(t) for t in prob.terms()}
    ordered = sorted(variables, key=_var_order)
    terms = _term_pool(alphabet, depth)
    formulas = _formula_pool(alphabet, depth)
    choice_lists: list[list[Optional[Expr]]] = []
    for z in ordered:
        images: list[Optional[Expr]] = [None]  # None keeps z fixed
        images += terms if isinstance(z, JustVar) else formulas
        choice_lists.append(images)
    total = 1
    for images in choice_lists:
        total *= len(images)
    if total > max_candidates:
        raise ResourceBound(f"{total} candidates exceed budget {max_candidates}")

    base_terms = set(prob.terms())
    for combo in itertools.product(*choice_lists):
        bindings = {
            z: img
            for z, img in zip(ordered, combo)
            if img is not None and img != var_expr(z)
        }
        support: set[VarRef] = {z for z in ordered if not isinstance(z, GoalVar)}
        support |= set(bindings)
        for img in bindings.values():
            support |= vars_of(img)
        sup = frozenset(support)
        if not _raw_unifies(sup, bindings, prob, base_terms):
            continue
        try:
            candidate = Substitution(sup, bindings)
        except InvalidSubstitution:
            continue
        if unifies_check(candidate, prob):
            yield candidate


def _raw_unifies(support, bindings, prob: ConditionalProblem, base_terms) -> bool:
    for a, b, c, d in prob.clauses:
        if apply_raw(support, bindings, a) == apply_raw(support, bindings, b):
            if apply_raw(support, bindings, c) != apply_raw(support, bindings, d):
                return False
    if prob.mode == REFERENTIAL:
        ts = set(base_terms)
        ts |= {apply_term(bindings, t) for t in ts}
        if not is_comprehensive_on(support, bindings, ts):
            return False
    return True
