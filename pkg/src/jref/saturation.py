"""Saturation decision procedure over the global triple (theta, Gamma, Delta).

Starting from theta = id, Gamma = {}, Delta = {false, F}, three blocks are
cycled: block 1 decomposes implications (branching two ways on each
undischarged Gamma-implication), block 2 closes Gamma under the goal and
application rules, block 3 unifies the justification assertions and
instantiates both sets under the new finite part.  A branch fails when
Gamma meets Delta or the assertions are not unifiable; it succeeds when the
unifier's domain stops growing.  The input is provable exactly when every
branch fails; a successful leaf feeds the countermodel construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .substitution import Substitution
from .syntax import (
    App,
    Bottom,
    Formula,
    Goal,
    Holds,
    Implies,
    Term,
    parse_formula,
    print_expr,
    terms_of,
)
from .unification import mgu_extending, problem_from_assertions

DEFAULT_MAX_STEPS = 10**6
DEFAULT_MAX_NODES = 10**4


class LimitExceeded(RuntimeError):
    """A step or node cap was hit; the procedure itself always terminates,
    so this signals absurd caps or an implementation bug."""


class MalformedCertificate(ValueError):
    pass


# ---------------------------------------------------------------------------
# State
# ---------------------------------------------------------------------------

@dataclass
class SaturationState:
    theta: Substitution
    gamma: dict[Formula, None]
    delta: dict[Formula, None]
    discharged: set[Formula] = field(default_factory=set)
    delta_processed: set[Formula] = field(default_factory=set)
    step_count: int = 0

    def copy(self) -> "SaturationState":
        return SaturationState(
            theta=self.theta,
            gamma=dict(self.gamma),
            delta=dict(self.delta),
            discharged=set(self.discharged),
            delta_processed=set(self.delta_processed),
            step_count=self.step_count,
        )

    def overlap_witness(self) -> Optional[Formula]:
        for f in self.gamma:
            if f in self.delta:
                return f
        return None

    def assertions(self) -> list[tuple[Term, Formula]]:
        return [(f.just, f.stmt) for f in self.gamma if isinstance(f, Holds)]


def init_state(f: Formula) -> SaturationState:
    return SaturationState(
        theta=Substitution.identity(),
        gamma={},
        delta={Bottom(): None, f: None},
    )


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

FAILED = "failed"
NOT_UNIFIABLE = "not_unifiable"
SUCCESS = "success"


@dataclass(frozen=True)
class CertLeaf:
    outcome: str
    witness: Optional[Formula] = None


@dataclass(frozen=True)
class CertDelta:
    child: "CertNode"


@dataclass(frozen=True)
class CertChoice:
    target: Formula
    left: "CertNode"   # the branch that moved the consequent into Gamma
    right: "CertNode"  # the branch that moved the antecedent into Delta


@dataclass(frozen=True)
class CertBlock2:
    child: "CertNode"


@dataclass(frozen=True)
class CertBlock3:
    mgu_domain: Optional[tuple[str, ...]]
    child: "CertNode"


CertNode = Union[CertLeaf, CertDelta, CertChoice, CertBlock2, CertBlock3]


def certificate_to_json(node: CertNode) -> dict:
    if isinstance(node, CertLeaf):
        out: dict = {"type": "leaf", "outcome": node.outcome}
        if node.witness is not None:
            out["witness"] = print_expr(node.witness)
        return out
    if isinstance(node, CertDelta):
        return {"type": "block1_delta", "child": certificate_to_json(node.child)}
    if isinstance(node, CertChoice):
        return {
            "type": "block1_choice",
            "target": print_expr(node.target),
            "left": certificate_to_json(node.left),
            "right": certificate_to_json(node.right),
        }
    if isinstance(node, CertBlock2):
        return {"type": "block2", "child": certificate_to_json(node.child)}
    if isinstance(node, CertBlock3):
        return {
            "type": "block3",
            "mgu_domain": list(node.mgu_domain) if node.mgu_domain is not None else None,
            "child": certificate_to_json(node.child),
        }
    raise TypeError(f"not a certificate node: {node!r}")


def certificate_from_json(data) -> CertNode:
    if not isinstance(data, dict) or "type" not in data:
        raise MalformedCertificate("certificate nodes must be objects with a type")
    kind = data["type"]
    try:
        if kind == "leaf":
            outcome = data["outcome"]
            if outcome not in (FAILED, NOT_UNIFIABLE, SUCCESS):
                raise MalformedCertificate(f"unknown outcome {outcome!r}")
            witness = data.get("witness")
            return CertLeaf(outcome, parse_formula(witness) if witness is not None else None)
        if kind == "block1_delta":
            return CertDelta(certificate_from_json(data["child"]))
        if kind == "block1_choice":
            return CertChoice(
                parse_formula(data["target"]),
                certificate_from_json(data["left"]),
                certificate_from_json(data["right"]),
            )
        if kind == "block2":
            return CertBlock2(certificate_from_json(data["child"]))
        if kind == "block3":
            dom = data["mgu_domain"]
            return CertBlock3(
                tuple(dom) if dom is not None else None,
                certificate_from_json(data["child"]),
            )
    except MalformedCertificate:
        raise
    except Exception as exc:
        raise MalformedCertificate(f"bad certificate node: {exc}") from exc
    raise MalformedCertificate(f"unknown node type {kind!r}")


def failure_closed(node: CertNode) -> bool:
    if isinstance(node, CertLeaf):
        return node.outcome in (FAILED, NOT_UNIFIABLE)
    if isinstance(node, CertChoice):
        return failure_closed(node.left) and failure_closed(node.right)
    return failure_closed(node.child)


# ---------------------------------------------------------------------------
# Decision
# ---------------------------------------------------------------------------

@dataclass
class Decision:
    provable: bool
    certificate: Optional[CertNode] = None
    leaf: Optional[SaturationState] = None
    steps: int = 0
    nodes: int = 0


class _Explorer:
    def __init__(
        self,
        max_steps: int,
        max_nodes: int,
        trace: Optional[Callable[[str], None]] = None,
    ):
        self.max_steps = max_steps
        self.max_nodes = max_nodes
        self.trace = trace
        self.steps = 0
        self.nodes = 0

    def _step(self, st: SaturationState) -> None:
        self.steps += 1
        st.step_count += 1
        if self.steps > self.max_steps:
            raise LimitExceeded(f"more than {self.max_steps} saturation steps")

    def _say(self, message: str) -> None:
        if self.trace is not None:
            self.trace(message)

    # -- block 1 -------------------------------------------------------------

    def _delta_fixpoint(self, st: SaturationState) -> Optional[Formula]:
        """Process Delta-implications until stable; report any overlap."""
        changed = True
        while changed:
            changed = False
            for f in list(st.delta):
                if isinstance(f, Implies) and f not in st.delta_processed:
                    st.delta_processed.add(f)
                    if f.lhs not in st.gamma:
                        st.gamma[f.lhs] = None
                        self._step(st)
                    if f.rhs not in st.delta:
                        st.delta[f.rhs] = None
                        self._step(st)
                    changed = True
        return st.overlap_witness()

    def _pick_undischarged(self, st: SaturationState) -> Optional[Implies]:
        for f in st.gamma:
            if isinstance(f, Implies) and f not in st.discharged:
                return f
        return None

    # -- block 2 -------------------------------------------------------------

    def _block2(self, st: SaturationState) -> Optional[Formula]:
        occurring: set[Term] = set()
        for f in list(st.gamma) + list(st.delta):
            occurring |= terms_of(f)

        def add(g: Formula) -> bool:
            if g not in st.gamma:
                st.gamma[g] = None
                self._step(st)
                return True
            return False

        changed = True
        while changed:
            changed = False
            for f in list(st.gamma):
                if not isinstance(f, Holds):
                    continue
                t, x = f.just, f.stmt
                changed |= add(Holds(t, Goal(t)))
                if isinstance(t, App):
                    changed |= add(Holds(t.fun, Implies(Goal(t.arg), x)))
                    changed |= add(Holds(t.arg, Goal(t.arg)))
            for t in sorted(occurring, key=print_expr):
                t_img = st.theta.apply(t)
                if Holds(t_img, Goal(t_img)) in st.gamma:
                    changed |= add(Holds(t, Goal(t)))
            for f in list(st.gamma):
                if isinstance(f, Holds) and isinstance(f.stmt, Implies):
                    s, x, y = f.just, f.stmt.lhs, f.stmt.rhs
                    for g in list(st.gamma):
                        if isinstance(g, Holds) and g.stmt == x:
                            if App(s, g.just) in occurring:
                                changed |= add(Holds(App(s, g.just), y))
        return st.overlap_witness()

    # -- block 3 -------------------------------------------------------------

    def _block3(self, st: SaturationState):
        prob = problem_from_assertions(st.assertions())
        theta2 = mgu_extending(prob, st.theta)
        if theta2 is None:
            return "not_unifiable", None, None
        dom = tuple(sorted((str(z) for z in theta2.domain)))
        for f in list(st.gamma):
            g = theta2.apply(f)
            if g not in st.gamma:
                st.gamma[g] = None
                self._step(st)
        for f in list(st.delta):
            g = theta2.apply(f)
            if g not in st.delta:
                st.delta[g] = None
                self._step(st)
        # Instances of discharged implications are their descendants and
        # stay discharged.
        st.discharged |= {theta2.apply(f) for f in st.discharged}
        witness = st.overlap_witness()
        if witness is not None:
            st.theta = theta2
            return "failed", dom, witness
        if theta2.domain == st.theta.domain:
            st.theta = theta2
            return "success", dom, None
        st.theta = theta2
        return "continue", dom, None

    # -- exploration -----------------------------------------------------------

    def run(self, st: SaturationState) -> tuple[Optional[CertNode], Optional[SaturationState]]:
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise LimitExceeded(f"more than {self.max_nodes} tree nodes")

        witness = self._delta_fixpoint(st)
        self._say(f"block1 gamma={len(st.gamma)} delta={len(st.delta)}")
        if witness is not None:
            self._say(f"  failed: {print_expr(witness)} in both sets")
            return CertDelta(CertLeaf(FAILED, witness)), None

        target = self._pick_undischarged(st)
        if target is not None:
            self._say(f"  branch on {print_expr(target)}")
            left = st.copy()
            left.discharged.add(target)
            if target.rhs not in left.gamma:
                left.gamma[target.rhs] = None
                self._step(left)
            left_node, leaf = self.run(left)
            if leaf is not None:
                return None, leaf
            right = st.copy()
            right.discharged.add(target)
            if target.lhs not in right.delta:
                right.delta[target.lhs] = None
                self._step(right)
            right_node, leaf = self.run(right)
            if leaf is not None:
                return None, leaf
            return CertDelta(CertChoice(target, left_node, right_node)), None

        witness = self._block2(st)
        self._say(f"block2 gamma={len(st.gamma)}")
        if witness is not None:
            self._say(f"  failed: {print_expr(witness)} in both sets")
            return CertDelta(CertBlock2(CertLeaf(FAILED, witness))), None

        outcome, dom, witness = self._block3(st)
        self._say(f"block3 {outcome} dom={list(dom) if dom else []}")
        if outcome == "not_unifiable":
            node: CertNode = CertBlock3(None, CertLeaf(NOT_UNIFIABLE))
        elif outcome == "failed":
            node = CertBlock3(dom, CertLeaf(FAILED, witness))
        elif outcome == "success":
            return None, st
        else:
            sub, leaf = self.run(st)
            if leaf is not None:
                return None, leaf
            node = CertBlock3(dom, sub)
        return CertDelta(CertBlock2(node)), None


# Public single-block views of the procedure, on copies of the state.
# They share the explorer's machinery, so tests exercise the same code
# the full exploration runs.

def block1(st: SaturationState):
    """One full block-1 phase.  Returns ("failed", witness) when the branch
    closes before any choice, else ("states", leaves) with the open leaf
    states of the local two-way branching (failed sub-branches dropped;
    they are final)."""
    ex = _Explorer(DEFAULT_MAX_STEPS, DEFAULT_MAX_NODES)

    def expand(state: SaturationState):
        witness = ex._delta_fixpoint(state)
        if witness is not None:
            return None, [(state, witness)]
        target = ex._pick_undischarged(state)
        if target is None:
            return [state], []
        opened: list[SaturationState] = []
        closed: list[tuple[SaturationState, Formula]] = []
        left = state.copy()
        left.discharged.add(target)
        left.gamma.setdefault(target.rhs)
        right = state.copy()
        right.discharged.add(target)
        right.delta.setdefault(target.lhs)
        for side in (left, right):
            got, failed = expand(side)
            if got:
                opened.extend(got)
            closed.extend(failed)
        return opened, closed

    opened, closed = expand(st.copy())
    if not opened:
        return "failed", closed[0][1]
    return "states", opened


def block2(st: SaturationState):
    """Close gamma under the block-2 rules; ("failed", witness) on overlap,
    else ("state", closed)."""
    ex = _Explorer(DEFAULT_MAX_STEPS, DEFAULT_MAX_NODES)
    work = st.copy()
    witness = ex._block2(work)
    if witness is not None:
        return "failed", witness
    return "state", work


def block3(st: SaturationState):
    """Unify gamma's assertions, instantiate, and compare domains.  One of
    ("not_unifiable", None), ("failed", witness), ("success", state),
    ("continue", state)."""
    ex = _Explorer(DEFAULT_MAX_STEPS, DEFAULT_MAX_NODES)
    work = st.copy()
    outcome, _, witness = ex._block3(work)
    if outcome == "not_unifiable":
        return "not_unifiable", None
    if outcome == "failed":
        return "failed", witness
    return outcome, work


def decide(
    f: Formula,
    max_steps: int = DEFAULT_MAX_STEPS,
    max_nodes: int = DEFAULT_MAX_NODES,
    trace: Optional[Callable[[str], None]] = None,
) -> Decision:
    """Explore the full saturation tree.  Provable iff every branch fails;
    the first successful leaf wins otherwise (left branch first)."""
    explorer = _Explorer(max_steps, max_nodes, trace)
    cert, leaf = explorer.run(init_state(f))
    if leaf is not None:
        return Decision(False, leaf=leaf, steps=explorer.steps, nodes=explorer.nodes)
    return Decision(True, certificate=cert, steps=explorer.steps, nodes=explorer.nodes)


def replay_certificate(
    f: Formula,
    cert: CertNode,
    max_steps: int = DEFAULT_MAX_STEPS,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> bool:
    """Re-run the deterministic exploration from f and require the recorded
    tree to match the recomputation exactly and to be failure-closed."""
    if not isinstance(cert, (CertLeaf, CertDelta, CertChoice, CertBlock2, CertBlock3)):
        raise MalformedCertificate("not a certificate node")
    if not failure_closed(cert):
        return False
    decision = decide(f, max_steps=max_steps, max_nodes=max_nodes)
    if not decision.provable:
        return False
    return decision.certificate == cert
