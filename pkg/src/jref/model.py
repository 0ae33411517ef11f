"""Ground justification models, interpretations and countermodel extraction.

A basic model assigns truth values to ground atoms and sets of formulas to
justification terms; application of terms acts on those sets by the lifted
Modus ponens `rhd`.  Sharp models compute compound denotations by `rhd`
alone; injective models justify at most one formula per term.  The ground
language reuses the same AST: goal nodes evaluate as ordinary atoms
("leftover goal constants").
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .saturation import SaturationState
from .substitution import Substitution
from .syntax import (
    App,
    Bottom,
    Expr,
    Formula,
    Goal,
    Holds,
    Implies,
    JustAtom,
    PropAtom,
    Term,
    is_term,
    parse_formula,
    parse_term,
    print_expr,
    terms_of,
)


class SharpnessViolation(ValueError):
    """A sharp model declares a compound justification set not reproduced
    by rhd."""


class NotInjective(ValueError):
    """A term justifies more than one formula where a single one is required."""


class InternalInvariantViolation(RuntimeError):
    """A guarantee of the countermodel construction failed; solver bug."""


def rhd(s: Iterable[Formula], t: Iterable[Formula]) -> frozenset[Formula]:
    """Modus ponens on sets: consequents of implications in s whose
    antecedent lies in t."""
    ts = set(t)
    return frozenset(f.rhs for f in s if isinstance(f, Implies) and f.lhs in ts)


@dataclass(frozen=True)
class BasicModel:
    true_atoms: frozenset[Formula] = frozenset()
    just_base: Mapping[Term, frozenset[Formula]] = field(default_factory=dict)
    explicit_compound: Mapping[Term, frozenset[Formula]] = field(default_factory=dict)
    sharp_mode: bool = True

    def __post_init__(self):
        object.__setattr__(self, "true_atoms", frozenset(self.true_atoms))
        object.__setattr__(
            self, "just_base",
            {t: frozenset(fs) for t, fs in dict(self.just_base).items()})
        object.__setattr__(
            self, "explicit_compound",
            {t: frozenset(fs) for t, fs in dict(self.explicit_compound).items()})
        for a in self.true_atoms:
            if not isinstance(a, (PropAtom, Goal)):
                raise ValueError(f"not a ground atom: {print_expr(a)}")
        for t in self.just_base:
            if not isinstance(t, JustAtom):
                raise ValueError(f"just_base keys must be atoms: {print_expr(t)}")
        for t in self.explicit_compound:
            if not isinstance(t, App):
                raise ValueError(f"explicit_compound keys must be compound: {print_expr(t)}")

    def denote(self, t: Term) -> frozenset[Formula]:
        """The set of formulas justified by t.  In sharp mode a compound is
        exactly the rhd of its parts; declared entries must be reproduced."""
        if isinstance(t, JustAtom):
            return self.just_base.get(t, frozenset())
        computed = rhd(self.denote(t.fun), self.denote(t.arg))
        declared = self.explicit_compound.get(t, frozenset())
        if self.sharp_mode:
            if not declared <= computed:
                raise SharpnessViolation(
                    f"declared {print_expr(t)} entries not reproduced by rhd")
            return computed
        return computed | declared

    def raw_denote(self, t: Term) -> frozenset[Formula]:
        """Denotation with declared entries unioned in, ignoring sharp mode;
        used by the property checker to report honestly."""
        if isinstance(t, JustAtom):
            return self.just_base.get(t, frozenset())
        return rhd(self.raw_denote(t.fun), self.raw_denote(t.arg)) | \
            self.explicit_compound.get(t, frozenset())

    def eval_formula(self, f: Formula) -> bool:
        if isinstance(f, Bottom):
            return False
        if isinstance(f, (PropAtom, Goal)):
            return f in self.true_atoms
        if isinstance(f, Implies):
            return (not self.eval_formula(f.lhs)) or self.eval_formula(f.rhs)
        if isinstance(f, Holds):
            return f.stmt in self.denote(f.just)
        raise TypeError(f"not a formula: {f!r}")

    def goal_of(self, t: Term) -> Optional[Formula]:
        """The unique formula justified by t, None when there is none."""
        den = self.denote(t)
        if len(den) > 1:
            raise NotInjective(f"{print_expr(t)} justifies {len(den)} formulas")
        return next(iter(den), None)

    def check(self, fragment: Iterable[Term]) -> dict[str, bool]:
        """Check basic closure, sharpness and injectivity on a finite
        subterm-closed fragment, by direct computation."""
        frag = set(fragment)
        basic = True
        sharp = True
        injective = True
        for t in frag:
            den = self.raw_denote(t)
            if len(den) > 1:
                injective = False
            if isinstance(t, App):
                step = rhd(self.raw_denote(t.fun), self.raw_denote(t.arg))
                if not step <= den:
                    basic = False
                if step != den:
                    sharp = False
        return {"basicClosure": basic, "sharp": sharp, "injective": injective}

    def to_json_dict(self) -> dict:
        def entry(fs: frozenset[Formula]):
            texts = sorted(print_expr(f) for f in fs)
            return texts[0] if len(texts) == 1 else texts

        return {
            "trueAtoms": sorted(print_expr(a) for a in self.true_atoms),
            "justifications": {
                print_expr(t): entry(fs) for t, fs in sorted(
                    self.just_base.items(), key=lambda kv: print_expr(kv[0]))
            },
            "explicit": {
                print_expr(t): entry(fs) for t, fs in sorted(
                    self.explicit_compound.items(), key=lambda kv: print_expr(kv[0]))
            },
            "sharp": self.sharp_mode,
        }

    @staticmethod
    def from_json_dict(data: dict) -> "BasicModel":
        def formulas(value) -> frozenset[Formula]:
            items = [value] if isinstance(value, str) else list(value)
            return frozenset(parse_formula(s) for s in items)

        return BasicModel(
            true_atoms=frozenset(parse_formula(s) for s in data.get("trueAtoms", [])),
            just_base={
                parse_term(k): formulas(v)
                for k, v in data.get("justifications", {}).items()
            },
            explicit_compound={
                parse_term(k): formulas(v)
                for k, v in data.get("explicit", {}).items()
            },
            sharp_mode=bool(data.get("sharp", True)),
        )


# ---------------------------------------------------------------------------
# Interpretations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interpretation:
    """A substitution into the ground language plus the model interpreting
    it.  Goal variables left by the substitution are resolved lazily: the
    unique justified formula when there is one, the goal constant itself
    otherwise."""

    subst: Substitution
    backing: BasicModel

    def apply(self, e: Expr) -> Expr:
        return self._resolve(self.subst.apply(e))

    def _resolve(self, e: Expr) -> Expr:
        if isinstance(e, Goal):
            resolved = self.backing.goal_of(e.index)
            # Single pass: the resolved formula is already a ground fixed point.
            return e if resolved is None else resolved
        if isinstance(e, Implies):
            return Implies(self._resolve(e.lhs), self._resolve(e.rhs))
        if isinstance(e, Holds):
            return Holds(e.just, self._resolve(e.stmt))
        return e

    def eval(self, f: Formula) -> bool:
        result = self.apply(f)
        assert not is_term(result)
        return self.backing.eval_formula(result)

    def check(self, fragment: Iterable[Term]) -> dict[str, bool]:
        """The two interpretation conditions, checked on a term fragment:
        comprehension, and goal values lying in the denotations."""
        frag = sorted(set(fragment), key=print_expr)
        comprehension = True
        for i, t1 in enumerate(frag):
            for t2 in frag[i + 1:]:
                if self.apply(t1) == self.apply(t2):
                    if self.apply(Goal(t1)) != self.apply(Goal(t2)):
                        comprehension = False
        goal_condition = True
        for t in frag:
            image = self.apply(t)
            assert is_term(image)
            den = self.backing.denote(image)
            if den and self.apply(Goal(t)) not in den:
                goal_condition = False
        return {"comprehension": comprehension, "goalCondition": goal_condition}


# ---------------------------------------------------------------------------
# Countermodel extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompletionState:
    """The theta-fixed portion of a successful leaf, plus the goal values
    the completion assigns on the checked fragment.  The infinite closure
    is never materialized; lazy goal resolution reproduces it."""

    gamma_prime: tuple[Formula, ...]
    delta_prime: tuple[Formula, ...]
    lambda_bindings: Mapping["Goal", Formula]

    def __post_init__(self):
        if set(self.gamma_prime) & set(self.delta_prime):
            raise InternalInvariantViolation("completion sets overlap")


def completion(leaf: SaturationState, fragment: Iterable[Term]) -> CompletionState:
    """Restrict the leaf to fixed points of theta and record the resolved
    goal value for every fragment term that justifies something."""
    theta = leaf.theta
    gamma_prime = tuple(g for g in leaf.gamma if theta.apply(g) == g)
    delta_prime = tuple(d for d in leaf.delta if theta.apply(d) == d)
    model = _extract_model(gamma_prime)
    lam: dict[Goal, Formula] = {}
    for t in sorted(set(fragment), key=print_expr):
        value = model.goal_of(t)
        if value is not None:
            lam[Goal(t)] = value
    return CompletionState(gamma_prime, delta_prime, lam)


def _extract_model(gamma_prime: Iterable[Formula]) -> BasicModel:
    true_atoms = set()
    just_base: dict[Term, set[Formula]] = {}
    explicit: dict[Term, set[Formula]] = {}
    for g in gamma_prime:
        if isinstance(g, (PropAtom, Goal)):
            true_atoms.add(g)
        elif isinstance(g, Holds):
            bucket = just_base if isinstance(g.just, JustAtom) else explicit
            bucket.setdefault(g.just, set()).add(g.stmt)
    return BasicModel(
        true_atoms=frozenset(true_atoms),
        just_base={t: frozenset(fs) for t, fs in just_base.items()},
        explicit_compound={t: frozenset(fs) for t, fs in explicit.items()},
        sharp_mode=True,
    )


def build_countermodel(leaf: SaturationState, f: Formula) -> tuple[BasicModel, Interpretation]:
    """Extract a sharp injective countermodel from a successful leaf.

    The fixed points of theta inside Gamma provide the atoms and the
    justification base; theta itself, with lazy goal resolution, is the
    interpretation.  The guarantees (f evaluates false, the model is sharp
    and injective on the relevant fragment, the interpretation conditions
    hold) are all checked; a failure means the solver is broken.
    """
    theta = leaf.theta
    gamma_fixed = [g for g in leaf.gamma if theta.apply(g) == g]
    delta_fixed = [d for d in leaf.delta if theta.apply(d) == d]

    model = _extract_model(gamma_fixed)
    interp = Interpretation(theta, model)

    fragment: set[Term] = set(terms_of(f))
    for g in gamma_fixed + delta_fixed:
        fragment |= terms_of(g)
    # One round of application pairs: the terms block 2 would reason about.
    for g in gamma_fixed:
        if isinstance(g, Holds) and isinstance(g.stmt, Implies):
            for h in gamma_fixed:
                if isinstance(h, Holds) and h.stmt == g.stmt.lhs:
                    fragment |= terms_of(App(g.just, h.just))

    completed = completion(leaf, fragment)
    for goal_node, value in completed.lambda_bindings.items():
        if theta.apply(goal_node) == goal_node and interp.apply(goal_node) != value:
            raise InternalInvariantViolation(
                f"lazy goal resolution disagrees with the completion at {goal_node}")

    report = model.check(fragment)
    if not all(report.values()):
        raise InternalInvariantViolation(f"extracted model fails {report}")
    icheck = interp.check(fragment)
    if not all(icheck.values()):
        raise InternalInvariantViolation(f"extracted interpretation fails {icheck}")
    for g in gamma_fixed:
        if not interp.eval(g):
            raise InternalInvariantViolation(
                f"gamma formula {print_expr(g)} is not true in the countermodel")
    for d in delta_fixed:
        if interp.eval(d):
            raise InternalInvariantViolation(
                f"delta formula {print_expr(d)} is not false in the countermodel")
    if interp.eval(f) is not False:
        raise InternalInvariantViolation("input formula is not falsified")
    return model, interp


def countermodel_to_json(
    model: BasicModel, interp: Interpretation, f: Formula
) -> dict:
    fragment = _countermodel_fragment(model, f)
    checks = model.check(fragment)
    return {
        **model.to_json_dict(),
        "interpretation": interp.subst.to_json_dict(),
        "formula": print_expr(f),
        "value": interp.eval(f),
        "checks": {"sharp": checks["sharp"], "injective": checks["injective"]},
    }


def _countermodel_fragment(model: BasicModel, f: Formula) -> set[Term]:
    fragment: set[Term] = set(terms_of(f))
    for t in model.just_base:
        fragment.add(t)
    for t in model.explicit_compound:
        fragment |= terms_of(t)
    for fs in list(model.just_base.values()) + list(model.explicit_compound.values()):
        for g in fs:
            fragment |= terms_of(g)
    return fragment


def countermodel_from_json(data: dict) -> tuple[BasicModel, Interpretation, Formula]:
    model = BasicModel.from_json_dict(data)
    subst = Substitution.from_json_dict(data.get("interpretation", {}))
    interp = Interpretation(subst, model)
    formula = parse_formula(data["formula"])
    return model, interp, formula
