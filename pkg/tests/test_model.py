import hypothesis.strategies as st
import pytest
from hypothesis import given

from conftest import formulas, terms
from jref.model import (
    BasicModel,
    Interpretation,
    NotInjective,
    SharpnessViolation,
    build_countermodel,
    countermodel_from_json,
    countermodel_to_json,
    rhd,
)
from jref.saturation import decide
from jref.substitution import Substitution
from jref.syntax import (
    App,
    Bottom,
    Goal,
    Holds,
    Implies,
    JustAtom,
    PropAtom,
    PropVar,
    parse_formula,
    terms_of,
)

x, y, z = JustAtom("x"), JustAtom("y"), JustAtom("z")
p, q = PropAtom("p"), PropAtom("q")


def sharp_model(**kwargs):
    return BasicModel(sharp_mode=True, **kwargs)


class TestRhd:
    def test_modus_ponens_on_sets(self):
        assert rhd({Implies(p, q)}, {p}) == {q}

    def test_empty_left(self):
        assert rhd(set(), {p, q}) == frozenset()

    def test_no_matching_antecedent(self):
        assert rhd({Implies(p, q)}, {PropAtom("r")}) == frozenset()

    @given(
        st.sets(formulas(), max_size=4),
        st.sets(formulas(), max_size=4),
        st.sets(formulas(), max_size=2),
    )
    def test_monotone(self, s, t, extra):
        assert rhd(s, t) <= rhd(s | extra, t)
        assert rhd(s, t) <= rhd(s, t | extra)


class TestDenote:
    def test_one_step_application(self):
        m = sharp_model(just_base={y: {Implies(p, q)}, x: {p}})
        assert m.denote(App(y, x)) == {q}

    def test_unmapped_atom_empty(self):
        assert sharp_model().denote(z) == frozenset()

    def test_non_implication_yields_nothing(self):
        m = sharp_model(just_base={x: {p}})
        assert m.denote(App(x, x)) == frozenset()

    def test_sharpness_violation(self):
        m = sharp_model(just_base={}, explicit_compound={App(x, y): {q}})
        with pytest.raises(SharpnessViolation):
            m.denote(App(x, y))

    def test_non_sharp_unions_declared_entries(self):
        m = BasicModel(
            sharp_mode=False, explicit_compound={App(x, y): {q}}
        )
        assert m.denote(App(x, y)) == {q}


class TestEval:
    def test_assertion_true_via_rhd(self):
        m = sharp_model(just_base={y: {Implies(p, q)}, x: {p}})
        assert m.eval_formula(Holds(App(y, x), q))

    def test_falsum(self):
        assert not sharp_model().eval_formula(Bottom())

    def test_classical_implication(self):
        m = sharp_model(true_atoms={p})
        assert not m.eval_formula(Implies(p, q))
        assert m.eval_formula(Implies(q, p))

    def test_goal_constant_atom(self):
        m = sharp_model(true_atoms={Goal(x)})
        assert m.eval_formula(Goal(x))
        assert not m.eval_formula(Goal(y))


class TestGoalOf:
    def test_unique_element(self):
        m = sharp_model(just_base={x: {p}})
        assert m.goal_of(x) == p

    def test_absent(self):
        assert sharp_model().goal_of(z) is None

    def test_computed_through_rhd(self):
        m = sharp_model(just_base={x: {Implies(p, q)}, y: {p}})
        assert m.goal_of(App(x, y)) == q

    def test_not_injective(self):
        m = BasicModel(sharp_mode=False, just_base={x: {p, q}})
        with pytest.raises(NotInjective):
            m.goal_of(x)


class TestCheckModel:
    def test_sharp_singletons_all_pass(self):
        m = sharp_model(just_base={x: {Implies(p, q)}, y: {p}})
        frag = {x, y, App(x, y), App(y, x)}
        report = m.check(frag)
        assert report == {"basicClosure": True, "sharp": True, "injective": True}

    def test_doubleton_not_injective(self):
        m = BasicModel(sharp_mode=False, just_base={x: {p, q}})
        assert not m.check({x})["injective"]

    def test_declared_compound_without_rhd_not_sharp(self):
        m = BasicModel(sharp_mode=False, explicit_compound={App(x, y): {q}})
        report = m.check({x, y, App(x, y)})
        assert report["basicClosure"] and not report["sharp"]

    @given(st.sets(formulas(), min_size=1, max_size=1), st.sets(formulas(), min_size=1, max_size=1), terms())
    def test_singleton_sharp_models_injective(self, fs1, fs2, t):
        m = sharp_model(just_base={x: frozenset(fs1), y: frozenset(fs2)})
        frag = {x, y} | set(terms_of(t))
        assert m.check(frag)["injective"]


class TestInterpretation:
    def test_goal_resolved_to_unique_statement(self):
        m = sharp_model(just_base={x: {p}})
        i = Interpretation(Substitution.identity(), m)
        assert i.apply(parse_formula("v(x)")) == p

    def test_ground_formula_fixed(self):
        m = sharp_model(just_base={x: {p}})
        i = Interpretation(Substitution.identity(), m)
        f = parse_formula("x:p -> q")
        assert i.apply(f) == f

    def test_unresolvable_goal_becomes_constant(self):
        i = Interpretation(Substitution.identity(), sharp_model())
        assert i.apply(parse_formula("v(x)")) == Goal(x)

    def test_eval_under(self):
        m = sharp_model(just_base={x: {p}}, true_atoms={p})
        subst = Substitution(frozenset({PropVar("q")}), {PropVar("q"): p})
        i = Interpretation(subst, m)
        assert i.eval(parse_formula("x:q"))
        assert i.eval(parse_formula("q"))
        assert not i.eval(parse_formula("y:q"))

    def test_check_conditions(self):
        m = sharp_model(just_base={x: {p}})
        good = Interpretation(Substitution.identity(), m)
        report = good.check({x, y})
        assert report == {"comprehension": True, "goalCondition": True}

    def test_check_flags_bad_goal_binding(self):
        from jref.syntax import GoalVar

        m = sharp_model(just_base={x: {p}})
        bad = Interpretation(
            Substitution(frozenset({GoalVar(x)}), {GoalVar(x): q}), m
        )
        assert not bad.check({x})["goalCondition"]

    def test_check_flags_comprehension_failure(self):
        from jref.syntax import GoalVar, JustVar

        c1 = JustAtom("c1")
        m = sharp_model(just_base={c1: {q}})
        # x lands on c1 whose goal is q, but v(x) is pinned to p.
        bad = Interpretation(
            Substitution(
                frozenset({JustVar("x"), GoalVar(x)}),
                {JustVar("x"): c1, GoalVar(x): p},
            ),
            m,
        )
        assert not bad.check({x, c1})["comprehension"]


class TestBuildCountermodel:
    def test_assertion_not_implying_statement(self):
        f = parse_formula("x:p -> p")
        d = decide(f)
        model, interp = build_countermodel(d.leaf, f)
        assert model.just_base == {x: frozenset({p})}
        assert p not in model.true_atoms
        assert interp.eval(f) is False

    def test_plain_atom_gets_empty_model(self):
        f = parse_formula("p")
        d = decide(f)
        model, interp = build_countermodel(d.leaf, f)
        assert not model.true_atoms and not model.just_base
        assert interp.eval(f) is False

    def test_leftover_goal_constant(self):
        f = parse_formula("x:v(x)")
        d = decide(f)
        model, interp = build_countermodel(d.leaf, f)
        assert not model.just_base
        assert interp.eval(f) is False

    def test_distinct_justifiers(self):
        f = parse_formula("x:p -> y:p")
        d = decide(f)
        model, interp = build_countermodel(d.leaf, f)
        assert model.just_base == {x: frozenset({p})}
        assert interp.eval(f) is False


class TestCompletion:
    def test_fixed_point_restriction_and_lambda(self):
        from jref.model import completion

        f = parse_formula("x:p -> p")
        d = decide(f)
        cs = completion(d.leaf, terms_of(f))
        assert set(cs.gamma_prime) == {Holds(x, p)}
        assert Bottom() in cs.delta_prime and p in cs.delta_prime
        assert cs.lambda_bindings == {Goal(x): p}
        # Every completion formula really is a fixed point of theta.
        for g in cs.gamma_prime + cs.delta_prime:
            assert d.leaf.theta.apply(g) == g

    def test_disjointness_enforced(self):
        from jref.model import CompletionState, InternalInvariantViolation

        with pytest.raises(InternalInvariantViolation):
            CompletionState((p,), (p,), {})


class TestJson:
    def test_countermodel_round_trip(self):
        f = parse_formula("x:p -> p")
        d = decide(f)
        model, interp = build_countermodel(d.leaf, f)
        data = countermodel_to_json(model, interp, f)
        assert data["value"] is False
        assert data["checks"] == {"sharp": True, "injective": True}
        model2, interp2, f2 = countermodel_from_json(data)
        assert f2 == f
        assert interp2.eval(f2) is False

    def test_model_wire_format(self):
        m = BasicModel.from_json_dict({
            "trueAtoms": ["p"],
            "justifications": {"x": "p", "y": ["p -> q"]},
            "explicit": {},
            "sharp": True,
        })
        assert m.true_atoms == {p}
        assert m.denote(x) == {p}
        assert m.denote(y) == {Implies(p, q)}
        assert m.denote(App(y, x)) == {q}
