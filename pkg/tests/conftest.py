"""Shared hypothesis strategies and fixtures."""

import hypothesis.strategies as st
from hypothesis import HealthCheck, settings

from jref.substitution import Substitution, SubstitutionError
from jref.syntax import (
    App,
    Bottom,
    Goal,
    GoalVar,
    Holds,
    Implies,
    JustAtom,
    JustVar,
    PropAtom,
    PropVar,
)

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow],
)
settings.load_profile("suite")

JUST_NAMES = ("x", "y", "z")
ATOM_NAMES = ("p", "q", "r")


def terms():
    return st.recursive(
        st.sampled_from([JustAtom(n) for n in JUST_NAMES]),
        lambda inner: st.builds(App, inner, inner),
        max_leaves=4,
    )


def formulas(allow_goal=True):
    leaves = [
        st.just(Bottom()),
        st.sampled_from([PropAtom(n) for n in ATOM_NAMES]),
    ]
    if allow_goal:
        leaves.append(st.builds(Goal, terms()))
    return st.recursive(
        st.one_of(*leaves),
        lambda inner: st.one_of(
            st.builds(Implies, inner, inner),
            st.builds(Holds, terms(), inner),
        ),
        max_leaves=6,
    )


def exprs():
    return st.one_of(terms(), formulas())


@st.composite
def substitutions(draw):
    """Random valid substitutions; images use a disjoint alphabet so most
    candidates pass the constructor's invariants."""
    image_terms = st.recursive(
        st.sampled_from([JustAtom(n) for n in ("u", "w")]),
        lambda inner: st.builds(App, inner, inner),
        max_leaves=3,
    )
    image_formulas = st.recursive(
        st.one_of(st.just(Bottom()), st.sampled_from([PropAtom(n) for n in ("a", "b")])),
        lambda inner: st.one_of(st.builds(Implies, inner, inner), st.builds(Holds, image_terms, inner)),
        max_leaves=4,
    )
    bindings = {}
    for _ in range(draw(st.integers(0, 3))):
        kind = draw(st.sampled_from(("prop", "just", "goal")))
        if kind == "prop":
            z = PropVar(draw(st.sampled_from(ATOM_NAMES)))
            img = draw(image_formulas)
        elif kind == "just":
            z = JustVar(draw(st.sampled_from(JUST_NAMES)))
            img = draw(image_terms)
        else:
            z = GoalVar(draw(terms()))
            img = draw(image_formulas)
        bindings[z] = img
    try:
        return Substitution(frozenset(bindings), bindings)
    except SubstitutionError:
        draw(st.just(None))
        import hypothesis

        hypothesis.assume(False)
