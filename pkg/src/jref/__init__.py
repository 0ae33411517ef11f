"""Referential justification logic: language, unifier, prover, models."""

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
    ParseError,
    PropAtom,
    PropVar,
    Term,
    VarRef,
    parse_formula,
    parse_term,
    print_expr,
    terms_of,
    vars_of,
)
from .substitution import (
    InvalidSubstitution,
    SortClash,
    Substitution,
    is_comprehensive_on,
    is_idempotent,
)
from .unification import (
    ConditionalProblem,
    PlainModeError,
    ResourceBound,
    brute_force_unifiers,
    equal_mod,
    mgu,
    mgu_extending,
    problem_from_assertions,
    unifies_check,
)
from .calculus import (
    AxiomA0,
    AxiomA1,
    AxiomA2,
    AxiomA3,
    AxiomA4,
    MP,
    ProofVerdict,
    check_line,
    check_proof,
    random_axiom_instance,
    random_axiom_line,
    render_line,
)
from .saturation import (
    Decision,
    LimitExceeded,
    MalformedCertificate,
    SaturationState,
    block1,
    block2,
    block3,
    decide,
    init_state,
    replay_certificate,
)
from .model import (
    BasicModel,
    CompletionState,
    Interpretation,
    InternalInvariantViolation,
    NotInjective,
    SharpnessViolation,
    build_countermodel,
    completion,
    countermodel_from_json,
    countermodel_to_json,
    rhd,
)

__all__ = [name for name in dir() if not name.startswith("_")]
