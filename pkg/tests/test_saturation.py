import pytest

from jref.calculus import AxiomA1, check_proof, random_axiom_instance
from jref.saturation import (
    CertLeaf,
    LimitExceeded,
    MalformedCertificate,
    block1,
    block2,
    block3,
    certificate_from_json,
    certificate_to_json,
    decide,
    failure_closed,
    init_state,
    replay_certificate,
)
from jref.syntax import (
    App,
    Bottom,
    Goal,
    Holds,
    Implies,
    JustAtom,
    PropAtom,
    parse_formula,
)
from jref.unification import mgu, problem_from_assertions

x, y = JustAtom("x"), JustAtom("y")
p, q = PropAtom("p"), PropAtom("q")

PROVABLE = [
    "p -> p",
    "x:(p -> q) -> (y:p -> (x*y):q)",
    "x:p -> x:v(x)",
    "(x*y):v(x*y) -> (x:(v(y) -> v(x*y)) & y:v(y))",
    "x:p -> (x:q -> (p -> q))",
    "(x*y):q -> y:v(y)",
    "(x*y):q -> x:(v(y) -> q)",
    # shared justifier forces x = y, after which the goal of y is p
    "w:(x:p -> p) -> (w:(y:p -> p) -> (x:p -> y:v(y)))",
]

UNPROVABLE = ["p", "x:p -> p", "x:p -> y:p", "x:v(x)"]


class TestInitState:
    def test_delta_seeded_with_falsum_and_input(self):
        st = init_state(p)
        assert set(st.delta) == {Bottom(), p}
        assert not st.gamma

    def test_falsum_input_collapses(self):
        st = init_state(Bottom())
        assert set(st.delta) == {Bottom()}

    def test_implication_kept_whole(self):
        st = init_state(Implies(p, p))
        assert set(st.delta) == {Bottom(), Implies(p, p)}
        assert st.step_count == 0


class TestBlock1:
    def test_delta_rule_closes_branch(self):
        tag, witness = block1(init_state(parse_formula("p -> p")))
        assert tag == "failed" and witness == p

    def test_gamma_implication_branches(self):
        st = init_state(p)
        st.delta.pop(p)
        st.gamma[Implies(p, q)] = None
        tag, states = block1(st)
        assert tag == "states" and len(states) == 2
        assert any(q in s.gamma for s in states)
        assert any(p in s.delta for s in states)
        assert all(Implies(p, q) in s.discharged for s in states)

    def test_no_implications_is_identity(self):
        st = init_state(p)
        tag, states = block1(st)
        assert tag == "states" and len(states) == 1
        assert set(states[0].gamma) == set(st.gamma)
        assert set(states[0].delta) == set(st.delta)


class TestBlock2:
    def test_goal_and_decomposition_rules(self):
        st = init_state(p)
        st.delta.pop(p)
        st.gamma[Holds(App(x, y), q)] = None
        tag, closed = block2(st)
        assert tag == "state"
        assert Holds(App(x, y), Goal(App(x, y))) in closed.gamma
        assert Holds(x, Implies(Goal(y), q)) in closed.gamma
        assert Holds(y, Goal(y)) in closed.gamma

    def test_application_rule_requires_occurring_term(self):
        st = init_state(Holds(App(x, y), q))  # puts (x*y):q into delta
        st.gamma[Holds(x, Implies(p, q))] = None
        st.gamma[Holds(y, p)] = None
        tag, payload = block2(st)
        # (x*y):q lands in gamma while sitting in delta: overlap.
        assert tag == "failed" and payload == Holds(App(x, y), q)

    def test_empty_gamma_unchanged(self):
        st = init_state(p)
        tag, closed = block2(st)
        assert tag == "state" and not closed.gamma

    def test_theta_transfer_rule(self):
        # y rewrites to x under theta and x:v(x) is present, so the goal
        # assertion transfers back to y.
        from jref.substitution import Substitution
        from jref.syntax import JustVar

        st = init_state(Holds(y, q))  # makes the term y occur in delta
        st.theta = Substitution(frozenset({JustVar("y")}), {JustVar("y"): x})
        st.gamma[Holds(x, Goal(x))] = None
        tag, closed = block2(st)
        assert tag == "state"
        assert Holds(y, Goal(y)) in closed.gamma


class TestBlock3:
    def test_goal_binding_then_success_on_stable_domain(self):
        st = init_state(p)
        st.delta.pop(p)
        st.gamma[Holds(x, p)] = None
        st.gamma[Holds(x, Goal(x))] = None
        tag, new = block3(st)
        assert tag == "continue"
        assert new.theta.apply(Goal(x)) == p
        tag2, final = block3(new)
        assert tag2 == "success"
        assert final.theta.domain == new.theta.domain

    def test_not_unifiable_assertions(self):
        st = init_state(p)
        st.delta.pop(p)
        st.gamma[Holds(x, p)] = None
        st.gamma[Holds(x, Implies(p, p))] = None
        tag, _ = block3(st)
        assert tag == "not_unifiable"

    def test_no_assertions_succeeds_immediately(self):
        st = init_state(p)
        tag, final = block3(st)
        assert tag == "success"
        assert not final.theta.bindings


class TestDecide:
    @pytest.mark.parametrize("text", PROVABLE)
    def test_provable(self, text):
        assert decide(parse_formula(text)).provable

    @pytest.mark.parametrize("text", UNPROVABLE)
    def test_unprovable(self, text):
        assert not decide(parse_formula(text)).provable

    def test_provable_decisions_carry_failure_closed_certificates(self):
        d = decide(parse_formula("p -> p"))
        assert d.certificate is not None and failure_closed(d.certificate)

    def test_unprovable_leaf_invariants(self):
        d = decide(parse_formula("x:p -> p"))
        leaf = d.leaf
        assert not (set(leaf.gamma) & set(leaf.delta))
        prob = problem_from_assertions(leaf.assertions())
        theta = mgu(prob)
        assert theta is not None
        assert theta.domain == leaf.theta.domain

    def test_deterministic_certificates(self):
        f = parse_formula("((p -> q) -> p) -> p")
        assert decide(f).certificate == decide(f).certificate

    def test_agrees_with_proof_checker(self):
        verdict = check_proof([AxiomA1(x, y, p, q)])
        assert decide(verdict.theorem).provable

    def test_rendered_axioms_decided_provable(self):
        for scheme in ("A0", "A1", "A2", "A3", "A4"):
            for seed in (0, 1, 2):
                assert decide(random_axiom_instance(scheme, seed)).provable

    def test_propositional_sample_matches_truth_tables(self):
        import itertools

        atoms = ("p", "q")
        def valid(f):
            def ev(g, env):
                if isinstance(g, Bottom):
                    return False
                if isinstance(g, PropAtom):
                    return env[g.name]
                return (not ev(g.lhs, env)) or ev(g.rhs, env)
            return all(
                ev(f, dict(zip(atoms, bits)))
                for bits in itertools.product((False, True), repeat=2)
            )

        fs = [Bottom(), p, q]
        fs = fs + [Implies(a, b) for a in fs for b in fs]
        for f in fs:
            assert decide(f).provable == valid(f)

    def test_limit_exceeded(self):
        with pytest.raises(LimitExceeded):
            decide(parse_formula("x:(p -> q) -> (y:p -> (x*y):q)"), max_steps=2)


class TestCertificates:
    def test_json_round_trip(self):
        cert = decide(parse_formula("(x*y):q -> y:v(y)")).certificate
        data = certificate_to_json(cert)
        assert certificate_from_json(data) == cert

    def test_replay_accepts_own_certificate(self):
        f = parse_formula("p -> p")
        cert = decide(f).certificate
        assert replay_certificate(f, cert)

    def test_replay_rejects_success_leaf_in_provable_cert(self):
        f = parse_formula("p -> p")
        cert = decide(f).certificate
        tampered = _flip_first_leaf(cert)
        assert not replay_certificate(f, tampered)

    def test_replay_rejects_wrong_formula(self):
        cert = decide(parse_formula("p -> p")).certificate
        assert not replay_certificate(parse_formula("q -> q"), cert)

    def test_malformed_certificate(self):
        with pytest.raises(MalformedCertificate):
            certificate_from_json({"type": "leaf", "outcome": "sideways"})
        with pytest.raises(MalformedCertificate):
            certificate_from_json(["not", "a", "node"])


def _flip_first_leaf(node):
    from dataclasses import replace

    from jref.saturation import CertChoice, CertLeaf

    if isinstance(node, CertLeaf):
        return CertLeaf("success")
    if isinstance(node, CertChoice):
        return replace(node, left=_flip_first_leaf(node.left))
    return replace(node, child=_flip_first_leaf(node.child))
