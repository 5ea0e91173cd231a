"""Trusted checker for natural-deduction derivations.

A derivation is a tree of rule applications over sequents; `check`
validates every node against its rule schema and nothing else.  The
kernel manipulates well-formed formulas exclusively, which subsumes the
per-rule well-formedness guards a looser presentation would need.

Two rules carry context-shape side conditions instead of a reified
"world" parameter: box introduction demands a premise proved from *no*
hypotheses, and fixpoint elimination demands its second premise proved
from *exactly* the unfolded hypothesis.  `Weaken` is the admissible
structural rule that reconciles exact-context premises with the shared
context of the other rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .syntax import (
    ActionId,
    Atom,
    AtomicId,
    Box,
    Ff,
    Imp,
    Mu,
    Not,
    Preformula,
    Var,
    Variable,
    WfFormula,
    mk_wf,
    nu,
    subst,
)

# stable machine-readable rejection reasons
PREMISE_COUNT = "premise_count"
NOT_IN_CONTEXT = "not_in_context"
NONEMPTY_CONTEXT = "nonempty_context"
WRONG_HYPOTHESES = "wrong_hypotheses"
WRONG_CONCLUSION = "wrong_conclusion"
SHAPE_MISMATCH = "shape_mismatch"
CONTEXT_NOT_SUBSET = "context_not_subset"


@dataclass(frozen=True)
class Sequent:
    """A finite hypothesis set and a conclusion, all well-formed.

    Hypotheses are a set up to alpha-equivalence: no duplicates, no
    order, so no contraction or exchange bookkeeping exists anywhere.
    """

    hyps: frozenset
    concl: WfFormula

    def __repr__(self) -> str:
        return f"Sequent({set(self.hyps)!r}, {self.concl!r})"


def sequent(hyps: Iterable[WfFormula], concl: WfFormula) -> Sequent:
    return Sequent(frozenset(hyps), concl)


class Rule:
    """Base class of rule tags; parameters live on the subclasses."""

    name: str = "?"


@dataclass(frozen=True)
class Hyp(Rule):
    name = "hyp"


@dataclass(frozen=True)
class Raa(Rule):
    name = "raa"


@dataclass(frozen=True)
class ImpI(Rule):
    name = "imp_i"


@dataclass(frozen=True)
class ImpE(Rule):
    name = "imp_e"
    cut: WfFormula


@dataclass(frozen=True)
class NotI(Rule):
    name = "not_i"


@dataclass(frozen=True)
class FfI(Rule):
    name = "ff_i"
    cut: WfFormula


@dataclass(frozen=True)
class FfE(Rule):
    name = "ff_e"


@dataclass(frozen=True)
class BoxI(Rule):
    name = "box_i"
    action: ActionId


@dataclass(frozen=True)
class K(Rule):
    name = "k"
    action: ActionId
    cut: WfFormula


@dataclass(frozen=True)
class MuI(Rule):
    name = "mu_i"


@dataclass(frozen=True)
class MuE(Rule):
    name = "mu_e"
    mu: WfFormula


@dataclass(frozen=True)
class Weaken(Rule):
    name = "weaken"


@dataclass(frozen=True)
class Derivation:
    """A rule application with its premise subderivations and claimed sequent."""

    rule: Rule
    premises: tuple
    concl: Sequent


class KernelError(Exception):
    """A derivation node violates its rule schema."""

    def __init__(self, path: tuple, rule: str, reason: str, message: str):
        self.path = path
        self.rule = rule
        self.reason = reason
        super().__init__(f"{rule} at {list(path)}: {message} [{reason}]")


_EXPECTED_PREMISES = {
    Hyp: 0, Raa: 1, ImpI: 1, ImpE: 2, NotI: 1, FfI: 2,
    FfE: 1, BoxI: 1, K: 2, MuI: 1, MuE: 2, Weaken: 1,
}


def check(d: Derivation) -> Sequent:
    """Validate every node of `d`; returns its conclusion or raises KernelError."""
    _check_node(d, ())
    return d.concl


def _check_node(d: Derivation, path: tuple) -> None:
    rule = d.rule
    expected = _EXPECTED_PREMISES.get(type(rule))
    if expected is None:
        raise KernelError(path, getattr(rule, "name", "?"), SHAPE_MISMATCH, "unknown rule tag")

    def fail(reason: str, message: str):
        raise KernelError(path, rule.name, reason, message)

    if len(d.premises) != expected:
        fail(PREMISE_COUNT, f"expected {expected} premises, got {len(d.premises)}")

    gamma = d.concl.hyps
    goal = d.concl.concl
    prems = [p.concl for p in d.premises]

    if isinstance(rule, Hyp):
        if goal not in gamma:
            fail(NOT_IN_CONTEXT, "conclusion is not a hypothesis")

    elif isinstance(rule, Raa):
        if prems[0].concl.prp != Ff():
            fail(WRONG_CONCLUSION, "premise must conclude ff")
        if prems[0].hyps != gamma | {mk_wf(Not(goal.prp))}:
            fail(WRONG_HYPOTHESES, "premise context must add the negated conclusion")

    elif isinstance(rule, ImpI):
        if not isinstance(goal.prp, Imp):
            fail(SHAPE_MISMATCH, "conclusion is not an implication")
        if prems[0].concl != mk_wf(goal.prp.right):
            fail(WRONG_CONCLUSION, "premise must conclude the consequent")
        if prems[0].hyps != gamma | {mk_wf(goal.prp.left)}:
            fail(WRONG_HYPOTHESES, "premise context must add the antecedent")

    elif isinstance(rule, ImpE):
        want_major = mk_wf(Imp(rule.cut.prp, goal.prp))
        if prems[0].concl != want_major:
            fail(WRONG_CONCLUSION, "first premise must conclude cut -> conclusion")
        if prems[1].concl != rule.cut:
            fail(WRONG_CONCLUSION, "second premise must conclude the cut formula")
        if prems[0].hyps != gamma or prems[1].hyps != gamma:
            fail(WRONG_HYPOTHESES, "premises must share the conclusion context")

    elif isinstance(rule, NotI):
        if not isinstance(goal.prp, Not):
            fail(SHAPE_MISMATCH, "conclusion is not a negation")
        if prems[0].concl.prp != Ff():
            fail(WRONG_CONCLUSION, "premise must conclude ff")
        if prems[0].hyps != gamma | {mk_wf(goal.prp.body)}:
            fail(WRONG_HYPOTHESES, "premise context must add the negated body")

    elif isinstance(rule, FfI):
        if goal.prp != Ff():
            fail(SHAPE_MISMATCH, "conclusion is not ff")
        if prems[0].concl != rule.cut:
            fail(WRONG_CONCLUSION, "first premise must conclude the cut formula")
        if prems[1].concl != mk_wf(Not(rule.cut.prp)):
            fail(WRONG_CONCLUSION, "second premise must conclude the negated cut formula")
        if prems[0].hyps != gamma or prems[1].hyps != gamma:
            fail(WRONG_HYPOTHESES, "premises must share the conclusion context")

    elif isinstance(rule, FfE):
        if prems[0].concl.prp != Ff():
            fail(WRONG_CONCLUSION, "premise must conclude ff")
        if prems[0].hyps != gamma:
            fail(WRONG_HYPOTHESES, "premise must share the conclusion context")

    elif isinstance(rule, BoxI):
        if not isinstance(goal.prp, Box) or goal.prp.action != rule.action:
            fail(SHAPE_MISMATCH, "conclusion is not a box over the rule's action")
        if prems[0].hyps:
            fail(NONEMPTY_CONTEXT, "box introduction requires a premise proved from no hypotheses")
        if prems[0].concl != mk_wf(goal.prp.body):
            fail(WRONG_CONCLUSION, "premise must conclude the boxed body")

    elif isinstance(rule, K):
        if not isinstance(goal.prp, Box) or goal.prp.action != rule.action:
            fail(SHAPE_MISMATCH, "conclusion is not a box over the rule's action")
        a, b = rule.action, goal.prp.body
        if prems[0].concl != mk_wf(Box(a, Imp(rule.cut.prp, b))):
            fail(WRONG_CONCLUSION, "first premise must conclude [a](cut -> body)")
        if prems[1].concl != mk_wf(Box(a, rule.cut.prp)):
            fail(WRONG_CONCLUSION, "second premise must conclude [a]cut")
        if prems[0].hyps != gamma or prems[1].hyps != gamma:
            fail(WRONG_HYPOTHESES, "premises must share the conclusion context")

    elif isinstance(rule, MuI):
        if not isinstance(goal.prp, Mu):
            fail(SHAPE_MISMATCH, "conclusion is not a fixpoint formula")
        unfolded = mk_wf(subst(goal.prp.body, goal.prp.var, goal.prp))
        if prems[0].concl != unfolded:
            fail(WRONG_CONCLUSION, "premise must conclude the one-step unfolding")
        if prems[0].hyps != gamma:
            fail(WRONG_HYPOTHESES, "premise must share the conclusion context")

    elif isinstance(rule, MuE):
        mu = rule.mu
        if not isinstance(mu.prp, Mu):
            fail(SHAPE_MISMATCH, "rule parameter is not a fixpoint formula")
        if prems[0].concl != mu:
            fail(WRONG_CONCLUSION, "first premise must conclude the fixpoint formula")
        if prems[0].hyps != gamma:
            fail(WRONG_HYPOTHESES, "first premise must share the conclusion context")
        unfolded = mk_wf(subst(mu.prp.body, mu.prp.var, goal.prp))
        if prems[1].concl != goal:
            fail(WRONG_CONCLUSION, "second premise must conclude the node conclusion")
        if prems[1].hyps != frozenset({unfolded}):
            fail(
                WRONG_HYPOTHESES,
                "second premise must depend on exactly the unfolded hypothesis",
            )

    elif isinstance(rule, Weaken):
        if prems[0].concl != goal:
            fail(WRONG_CONCLUSION, "premise must conclude the node conclusion")
        if not prems[0].hyps <= gamma:
            fail(CONTEXT_NOT_SUBSET, "premise context must be contained in the conclusion context")

    else:
        fail(SHAPE_MISMATCH, "unknown rule tag")

    for i, p in enumerate(d.premises):
        _check_node(p, path + (i,))


# ---------------------------------------------------------------------------
# Golden corpus: at least one checked derivation per rule tag.

def derive_nu_unfold_test_corpus() -> list[tuple[Derivation, Sequent]]:
    """Checked derivations covering every rule, paired with their sequents.

    Includes the transcript lemma (hypothesis form) and a greatest-
    fixpoint unfolding, whose inner steps exercise Raa/FfI/MuI together.
    """
    p = mk_wf(Atom(AtomicId("P")))
    q = mk_wf(Atom(AtomicId("Q")))
    a = ActionId("a")
    x = Variable("x")
    entries: list[tuple[Derivation, Sequent]] = []

    def leaf(rule: Rule, seq: Sequent) -> Derivation:
        return Derivation(rule, (), seq)

    def node(rule: Rule, premises: Iterable[Derivation], seq: Sequent) -> Derivation:
        return Derivation(rule, tuple(premises), seq)

    def add(d: Derivation) -> Derivation:
        entries.append((d, d.concl))
        return d

    # hyp: {P} |- P
    add(leaf(Hyp(), sequent([p], p)))

    # hyp with a free propositional variable: {x} |- x
    vx = mk_wf(Var(x))
    add(leaf(Hyp(), sequent([vx], vx)))

    # imp_i: |- P -> P
    p_imp_p = mk_wf(Imp(p.prp, p.prp))
    d_imp = add(node(ImpI(), [leaf(Hyp(), sequent([p], p))], sequent([], p_imp_p)))

    # box_i concluding under a nonempty context: {Q} |- [a](P -> P)
    boxed = mk_wf(Box(a, p_imp_p.prp))
    add(node(BoxI(a), [d_imp], sequent([q], boxed)))

    # imp_e: {P, P -> Q} |- Q
    p_imp_q = mk_wf(Imp(p.prp, q.prp))
    ctx = [p, p_imp_q]
    add(node(
        ImpE(cut=p),
        [leaf(Hyp(), sequent(ctx, p_imp_q)), leaf(Hyp(), sequent(ctx, p))],
        sequent(ctx, q),
    ))

    # not_i: |- ~ff  (the derived truth constant)
    ff = mk_wf(Ff())
    not_ff = mk_wf(Not(Ff()))
    add(node(NotI(), [leaf(Hyp(), sequent([ff], ff))], sequent([], not_ff)))

    # ff_i: {P, ~P} |- ff
    not_p = mk_wf(Not(p.prp))
    ctx = [p, not_p]
    add(node(
        FfI(cut=p),
        [leaf(Hyp(), sequent(ctx, p)), leaf(Hyp(), sequent(ctx, not_p))],
        sequent(ctx, ff),
    ))

    # raa (over ff_i): {~~P} |- P
    not_not_p = mk_wf(Not(not_p.prp))
    ctx = [not_not_p, not_p]
    d_ffi = node(
        FfI(cut=not_p),
        [leaf(Hyp(), sequent(ctx, not_p)), leaf(Hyp(), sequent(ctx, not_not_p))],
        sequent(ctx, ff),
    )
    add(node(Raa(), [d_ffi], sequent([not_not_p], p)))

    # ff_e: {ff} |- Q
    add(node(FfE(), [leaf(Hyp(), sequent([ff], ff))], sequent([ff], q)))

    # k: {[a](P -> Q), [a]P} |- [a]Q
    box_imp = mk_wf(Box(a, p_imp_q.prp))
    box_p = mk_wf(Box(a, p.prp))
    box_q = mk_wf(Box(a, q.prp))
    ctx = [box_imp, box_p]
    add(node(
        K(action=a, cut=p),
        [leaf(Hyp(), sequent(ctx, box_imp)), leaf(Hyp(), sequent(ctx, box_p))],
        sequent(ctx, box_q),
    ))

    # mu_i, the transcript lemma: {P -> mu x . P -> x} |- mu x . P -> x
    lemma_mu = mk_wf(Mu(x, Imp(p.prp, Var(x))))
    hyp_form = mk_wf(Imp(p.prp, lemma_mu.prp))
    add(node(
        MuI(),
        [leaf(Hyp(), sequent([hyp_form], hyp_form))],
        sequent([hyp_form], lemma_mu),
    ))

    # mu_e: {mu x . x} |- Q  (the empty fixpoint eliminates into anything)
    mu_bot = mk_wf(Mu(x, Var(x)))
    add(node(
        MuE(mu=mu_bot),
        [leaf(Hyp(), sequent([mu_bot], mu_bot)), leaf(Hyp(), sequent([q], q))],
        sequent([mu_bot], q),
    ))

    # weaken: {P, Q} |- P -> P from |- P -> P
    add(node(Weaken(), [d_imp], sequent([p, q], p_imp_p)))

    # greatest-fixpoint unfolding: {nu x . P} |- P
    nu_p = mk_wf(nu(x, p.prp))
    mu_not_p = mk_wf(Mu(x, Not(p.prp)))  # nu x.P = ~(mu x.~P) when x is absent from P
    ctx = [nu_p, not_p]
    d_mui = node(
        MuI(),
        [leaf(Hyp(), sequent(ctx, not_p))],
        sequent(ctx, mu_not_p),
    )
    d_ffi = node(
        FfI(cut=mu_not_p),
        [d_mui, leaf(Hyp(), sequent(ctx, nu_p))],
        sequent(ctx, ff),
    )
    add(node(Raa(), [d_ffi], sequent([nu_p], p)))

    for derivation, seq in entries:
        assert check(derivation) == seq
    return entries
