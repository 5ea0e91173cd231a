"""Backward, goal-directed proof construction over the kernel.

A goal state is immutable: applying a tactic either fails (raising
TacticError, leaving the caller's state untouched) or returns a new
state in which the focused goal (always the first open one) has been
replaced by the premises of the corresponding rule instance.  Undo
simply steps back to the previous state.  `qed` extracts the finished
derivation and re-runs the kernel check as the final gate.

The interactive transcript's Rewrite step has no counterpart here:
fixpoint introduction substitutes eagerly, so its bookkeeping
hypothesis never exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Union

from . import kernel
from .kernel import Derivation, Sequent
from .syntax import Box, Ff, Imp, Mu, Not, WfFormula, _canonical, mk_wf, subst

if TYPE_CHECKING:
    from .parser import ProofScript


class TacticError(Exception):
    """A tactic does not apply to the focused goal."""

    def __init__(self, reason: str, message: str):
        self.reason = reason
        super().__init__(message)


class SessionError(Exception):
    pass


class OpenGoalsRemain(SessionError):
    def __init__(self, count: int):
        self.count = count
        super().__init__(f"{count} open goal(s) remain")


class ReplayError(Exception):
    """Script replay failed; `step` is the 0-based failing tactic index
    (== number of tactics when the final qed itself failed)."""

    def __init__(self, step: int, cause: Exception):
        self.step = step
        self.cause = cause
        super().__init__(f"step {step}: {cause}")


# ------------------------------------------------------------------ tactics

class Tactic:
    name: str = "?"
    needs_argument = False


@dataclass(frozen=True)
class Assumption(Tactic):
    name = "assumption"


@dataclass(frozen=True)
class Intro(Tactic):
    name = "intro"


@dataclass(frozen=True)
class Raa(Tactic):
    name = "raa"


@dataclass(frozen=True)
class NotI(Tactic):
    name = "not_i"


@dataclass(frozen=True)
class FfI(Tactic):
    name = "ff_i"
    needs_argument = True
    argument: WfFormula


@dataclass(frozen=True)
class FfE(Tactic):
    name = "ff_e"


@dataclass(frozen=True)
class ImpE(Tactic):
    name = "imp_e"
    needs_argument = True
    argument: WfFormula


@dataclass(frozen=True)
class BoxI(Tactic):
    name = "box_i"


@dataclass(frozen=True)
class KRule(Tactic):
    name = "k"
    needs_argument = True
    argument: WfFormula


@dataclass(frozen=True)
class MuI(Tactic):
    name = "mu_i"


@dataclass(frozen=True)
class MuE(Tactic):
    name = "mu_e"
    needs_argument = True
    argument: WfFormula  # the fixpoint formula being eliminated


@dataclass(frozen=True)
class Weaken(Tactic):
    name = "weaken"
    needs_argument = True
    argument: tuple  # hypotheses to keep


@dataclass(frozen=True)
class Undo(Tactic):
    name = "undo"


@dataclass(frozen=True)
class Qed(Tactic):
    name = "qed"


# --------------------------------------------------------------- goal state

@dataclass(frozen=True)
class Goal:
    """An open sequent with a display order for its hypotheses."""

    hyps: tuple
    concl: WfFormula

    def sequent(self) -> Sequent:
        return Sequent(frozenset(self.hyps), self.concl)

    def labels(self) -> list[str]:
        """Hypothesis labels in introduction order: H, H0, H1, ..."""
        return ["H" if i == 0 else f"H{i - 1}" for i in range(len(self.hyps))]


@dataclass(frozen=True)
class _Hole:
    goal: Goal


@dataclass(frozen=True)
class _Node:
    rule: kernel.Rule
    premises: tuple
    goal: Goal


_Tree = Union[_Hole, _Node]


@dataclass(frozen=True)
class GoalState:
    lemma_name: str
    claim: Sequent
    tree: _Tree
    history: tuple = ()
    tactic_log: tuple = ()

    @property
    def goals(self) -> list[Goal]:
        return [h.goal for h in _holes(self.tree)]

    @property
    def proved(self) -> bool:
        return not _holes(self.tree)


def _holes(tree: _Tree) -> list[_Hole]:
    if isinstance(tree, _Hole):
        return [tree]
    out: list[_Hole] = []
    for p in tree.premises:
        out.extend(_holes(p))
    return out


def _replace_first_hole(tree: _Tree, replacement: _Tree) -> tuple[_Tree, bool]:
    if isinstance(tree, _Hole):
        return replacement, True
    new_premises = []
    done = False
    for p in tree.premises:
        if done:
            new_premises.append(p)
            continue
        new_p, done = _replace_first_hole(p, replacement)
        new_premises.append(new_p)
    return (_Node(tree.rule, tuple(new_premises), tree.goal) if done else tree), done


def _to_derivation(tree: _Tree) -> Derivation:
    if isinstance(tree, _Hole):
        raise OpenGoalsRemain(1)
    return Derivation(
        tree.rule, tuple(_to_derivation(p) for p in tree.premises), tree.goal.sequent()
    )


def new_session(claim: Sequent, lemma_name: str = "lemma") -> GoalState:
    """A fresh state with the claim as its single open goal."""
    ordered = tuple(sorted(claim.hyps, key=lambda h: _canonical(h.prp)))
    goal = Goal(ordered, claim.concl)
    return GoalState(lemma_name, claim, _Hole(goal))


def _extend(hyps: tuple, extra: WfFormula) -> tuple:
    return hyps if extra in hyps else hyps + (extra,)


def _premise_goals(goal: Goal, tactic: Tactic) -> tuple[kernel.Rule, list[Goal]]:
    """The kernel rule and shape-checked premise goals for a tactic."""
    concl = goal.concl.prp

    if isinstance(tactic, Assumption):
        if goal.concl not in goal.hyps:
            raise TacticError("not_in_context", "the conclusion is not a hypothesis")
        return kernel.Hyp(), []

    if isinstance(tactic, Intro):
        if not isinstance(concl, Imp):
            raise TacticError("shape_mismatch", "intro needs an implication goal")
        return kernel.ImpI(), [
            Goal(_extend(goal.hyps, mk_wf(concl.left)), mk_wf(concl.right))
        ]

    if isinstance(tactic, Raa):
        return kernel.Raa(), [
            Goal(_extend(goal.hyps, mk_wf(Not(concl))), mk_wf(Ff()))
        ]

    if isinstance(tactic, NotI):
        if not isinstance(concl, Not):
            raise TacticError("shape_mismatch", "not_i needs a negation goal")
        return kernel.NotI(), [
            Goal(_extend(goal.hyps, mk_wf(concl.body)), mk_wf(Ff()))
        ]

    if isinstance(tactic, FfI):
        if concl != Ff():
            raise TacticError("shape_mismatch", "ff_i needs the goal ff")
        cut = tactic.argument
        return kernel.FfI(cut=cut), [
            Goal(goal.hyps, cut),
            Goal(goal.hyps, mk_wf(Not(cut.prp))),
        ]

    if isinstance(tactic, FfE):
        return kernel.FfE(), [Goal(goal.hyps, mk_wf(Ff()))]

    if isinstance(tactic, ImpE):
        cut = tactic.argument
        return kernel.ImpE(cut=cut), [
            Goal(goal.hyps, mk_wf(Imp(cut.prp, concl))),
            Goal(goal.hyps, cut),
        ]

    if isinstance(tactic, BoxI):
        if not isinstance(concl, Box):
            raise TacticError("shape_mismatch", "box_i needs a box goal")
        return kernel.BoxI(concl.action), [Goal((), mk_wf(concl.body))]

    if isinstance(tactic, KRule):
        if not isinstance(concl, Box):
            raise TacticError("shape_mismatch", "k needs a box goal")
        cut = tactic.argument
        a = concl.action
        return kernel.K(action=a, cut=cut), [
            Goal(goal.hyps, mk_wf(Box(a, Imp(cut.prp, concl.body)))),
            Goal(goal.hyps, mk_wf(Box(a, cut.prp))),
        ]

    if isinstance(tactic, MuI):
        if not isinstance(concl, Mu):
            raise TacticError("shape_mismatch", "mu_i needs a fixpoint goal")
        unfolded = mk_wf(subst(concl.body, concl.var, concl))
        return kernel.MuI(), [Goal(goal.hyps, unfolded)]

    if isinstance(tactic, MuE):
        mu = tactic.argument
        if not isinstance(mu.prp, Mu):
            raise TacticError("shape_mismatch", "mu_e needs a fixpoint formula argument")
        unfolded = mk_wf(subst(mu.prp.body, mu.prp.var, concl))
        return kernel.MuE(mu=mu), [
            Goal(goal.hyps, mu),
            Goal((unfolded,), goal.concl),
        ]

    if isinstance(tactic, Weaken):
        kept = tuple(dict.fromkeys(tactic.argument))
        if not frozenset(kept) <= frozenset(goal.hyps):
            raise TacticError("not_subset", "weaken may only drop hypotheses")
        return kernel.Weaken(), [Goal(kept, goal.concl)]

    raise TacticError("unknown_tactic", f"no such tactic: {tactic!r}")


def apply_tactic(state: GoalState, tactic: Tactic) -> GoalState:
    """Apply a tactic to the focused (first) goal; fails atomically."""
    if isinstance(tactic, Undo):
        if not state.history:
            raise TacticError("empty_history", "nothing to undo")
        return state.history[-1]
    if isinstance(tactic, Qed):
        if state.goals:
            raise TacticError("open_goals", f"{len(state.goals)} open goal(s) remain")
        return state
    goals = state.goals
    if not goals:
        raise TacticError("no_goals", "nothing to prove")
    rule, premise_goals = _premise_goals(goals[0], tactic)
    node = _Node(rule, tuple(_Hole(g) for g in premise_goals), goals[0])
    new_tree, replaced = _replace_first_hole(state.tree, node)
    assert replaced
    return GoalState(
        state.lemma_name,
        state.claim,
        new_tree,
        state.history + (state,),
        state.tactic_log + (tactic,),
    )


def qed(state: GoalState) -> Derivation:
    """Extract the finished derivation; the kernel recheck is the final gate."""
    goals = state.goals
    if goals:
        raise OpenGoalsRemain(len(goals))
    derivation = _to_derivation(state.tree)
    checked = kernel.check(derivation)  # engine bug if this ever raises
    if checked != state.claim:
        raise SessionError("derivation does not prove the claimed sequent")
    return derivation


@dataclass(frozen=True)
class TacticInfo:
    name: str
    applicable: bool
    needs_argument: bool
    reason: Optional[str]


_SHAPES = [
    ("assumption", False, lambda g: g.concl in g.hyps, "conclusion is not a hypothesis"),
    ("intro", False, lambda g: isinstance(g.concl.prp, Imp), "goal is not an implication"),
    ("raa", False, lambda g: True, None),
    ("not_i", False, lambda g: isinstance(g.concl.prp, Not), "goal is not a negation"),
    ("ff_i", True, lambda g: g.concl.prp == Ff(), "goal is not ff"),
    ("ff_e", False, lambda g: True, None),
    ("imp_e", True, lambda g: True, None),
    ("box_i", False, lambda g: isinstance(g.concl.prp, Box), "goal is not a box"),
    ("k", True, lambda g: isinstance(g.concl.prp, Box), "goal is not a box"),
    ("mu_i", False, lambda g: isinstance(g.concl.prp, Mu), "goal is not a fixpoint"),
    ("mu_e", True, lambda g: True, None),
    ("weaken", True, lambda g: True, None),
]


def applicable(state: GoalState) -> list[TacticInfo]:
    """Shape applicability of every tactic against the focused goal."""
    infos = []
    goal = state.goals[0] if state.goals else None
    for name, needs_arg, pred, blame in _SHAPES:
        if goal is None:
            infos.append(TacticInfo(name, False, needs_arg, "no open goals"))
        elif pred(goal):
            infos.append(TacticInfo(name, True, needs_arg, None))
        else:
            infos.append(TacticInfo(name, False, needs_arg, blame))
    infos.append(
        TacticInfo("undo", bool(state.history), False, None if state.history else "nothing to undo")
    )
    infos.append(
        TacticInfo("qed", goal is None, False, None if goal is None else "open goals remain")
    )
    return infos


# ----------------------------------------------------------- session object

class ProofSession:
    """A mutable session: one strictly serialized stream of tactics.

    Owns consumption: after a successful `qed` the session refuses
    further commands.
    """

    def __init__(self, claim: Sequent, lemma_name: str = "lemma"):
        self.state = new_session(claim, lemma_name)
        self.finished: Optional[Derivation] = None

    def _live(self) -> None:
        if self.finished is not None:
            raise SessionError("session already finished")

    def apply(self, tactic: Tactic) -> GoalState:
        self._live()
        self.state = apply_tactic(self.state, tactic)
        return self.state

    def undo(self) -> GoalState:
        self._live()
        self.state = apply_tactic(self.state, Undo())
        return self.state

    def qed(self) -> Derivation:
        self._live()
        derivation = qed(self.state)
        self.finished = derivation
        return derivation


def replay(script: "ProofScript") -> Derivation:
    """new session + fold tactics + qed; failures carry the step index."""
    session = ProofSession(script.claim, script.name)
    for i, tactic in enumerate(script.tactics):
        try:
            session.apply(tactic)
        except (TacticError, SessionError) as cause:
            raise ReplayError(i, cause) from cause
    try:
        return session.qed()
    except SessionError as cause:
        raise ReplayError(len(script.tactics), cause) from cause
