"""Denotational evaluation over finite labeled transition systems.

States are plain strings; a set of states is a ``frozenset[str]``.  An
environment maps variables to state sets and is total by convention:
unmapped variables denote the empty set.

The least fixpoint of a well-formed binder is computed by Kleene
iteration from the empty set.  The literal intersection of prefixed
points survives as `eval_mu_oracle`, the independent brute-force oracle
(it also serves as the evaluator's fallback for non-positive binder
bodies, which are reachable only through `semantic_function` and the
monotonicity probes, never through the well-formedness-gated
`evaluate`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Optional

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
    _wf_violation,
    free_vars,
    pos_in,
)

State = str
StateSet = frozenset
Environment = Mapping[Variable, StateSet]

DEFAULT_SUBSET_BOUND = 12
DEFAULT_ASSIGNMENT_BOUND = 2 ** 20


class IllFormed(Exception):
    """Evaluation refused: the formula fails the positivity condition."""

    def __init__(self, violation):
        self.violation = violation
        super().__init__(f"ill-formed formula: {violation}")


class BoundExceeded(Exception):
    """An exhaustive enumeration would overrun its configured bound."""


@dataclass(frozen=True, eq=False)
class TransitionSystem:
    """A finite model: states, atom interpretation, action interpretation.

    Missing entries in `props` and `trans` denote the empty set; every
    state referenced anywhere must be declared in `states`.
    """

    states: tuple[State, ...]
    props: Mapping[AtomicId, StateSet]
    trans: Mapping[ActionId, Mapping[State, StateSet]]

    def __post_init__(self) -> None:
        if not self.states:
            raise ValueError("a transition system needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state names")
        universe = frozenset(self.states)
        props = {p: frozenset(ss) for p, ss in self.props.items()}
        trans = {
            a: {s: frozenset(ts) for s, ts in row.items()} for a, row in self.trans.items()
        }
        for p, ss in props.items():
            if not ss <= universe:
                raise ValueError(f"proposition {p.name!r} mentions undeclared states")
        for a, row in trans.items():
            for s, ts in row.items():
                if s not in universe or not ts <= universe:
                    raise ValueError(f"action {a.name!r} mentions undeclared states")
        object.__setattr__(self, "props", props)
        object.__setattr__(self, "trans", trans)
        object.__setattr__(self, "_universe", universe)

    @property
    def state_set(self) -> StateSet:
        return self._universe  # type: ignore[attr-defined]

    def prop(self, p: AtomicId) -> StateSet:
        return self.props.get(p, frozenset())

    def succ(self, a: ActionId, s: State) -> StateSet:
        return self.trans.get(a, {}).get(s, frozenset())

    def subsets(self) -> Iterator[StateSet]:
        """All subsets of the state space, in a fixed binary-counting order."""
        for mask in range(1 << len(self.states)):
            yield frozenset(s for i, s in enumerate(self.states) if mask >> i & 1)


def _env_get(rho: Environment, x: Variable) -> StateSet:
    return rho.get(x, frozenset())


def _check_env(ts: TransitionSystem, rho: Environment) -> None:
    for x, val in rho.items():
        if not val <= ts.state_set:
            raise ValueError(f"environment value for {x.name!r} is not a set of states")


def _eval(ts: TransitionSystem, rho: Environment, phi: Preformula, bound: int) -> StateSet:
    if isinstance(phi, Atom):
        return ts.prop(phi.prop)
    if isinstance(phi, Ff):
        return frozenset()
    if isinstance(phi, Var):
        return _env_get(rho, phi.var)
    if isinstance(phi, Not):
        return ts.state_set - _eval(ts, rho, phi.body, bound)
    if isinstance(phi, Imp):
        return (ts.state_set - _eval(ts, rho, phi.left, bound)) | _eval(
            ts, rho, phi.right, bound
        )
    if isinstance(phi, Box):
        body = _eval(ts, rho, phi.body, bound)
        return frozenset(s for s in ts.state_set if ts.succ(phi.action, s) <= body)
    if isinstance(phi, Mu):
        def step(t: StateSet) -> StateSet:
            return _eval(ts, {**rho, phi.var: t}, phi.body, bound)

        if pos_in(phi.var, phi.body):
            last = frozenset()
            for last in _kleene(step):
                pass
            return last
        # non-positive body: the iteration need not stabilize, but the
        # intersection of prefixed points is still a total definition
        return _prefixed_intersection(ts, step, bound)
    raise TypeError(f"not a preformula: {phi!r}")


def _kleene(step: Callable[[StateSet], StateSet]) -> Iterator[StateSet]:
    """Iterates ∅, f(∅), f²(∅), ... up to and including the first fixpoint."""
    t = frozenset()
    yield t
    while True:
        nxt = step(t)
        if nxt == t:
            return
        t = nxt
        yield t


def _prefixed_intersection(
    ts: TransitionSystem, step: Callable[[StateSet], StateSet], bound: int
) -> StateSet:
    if len(ts.states) > bound:
        raise BoundExceeded(
            f"subset enumeration over {len(ts.states)} states exceeds bound {bound}"
        )
    acc = ts.state_set
    for t in ts.subsets():
        if step(t) <= t:
            acc &= t
    return acc


def evaluate(
    ts: TransitionSystem,
    rho: Environment,
    phi: Preformula,
    *,
    subset_bound: int = DEFAULT_SUBSET_BOUND,
) -> StateSet:
    """The set of states satisfying `phi`; refuses ill-formed formulas."""
    violation = _wf_violation(phi)
    if violation is not None:
        raise IllFormed(violation)
    _check_env(ts, rho)
    return _eval(ts, rho, phi, subset_bound)


def fixpoint_chain(
    ts: TransitionSystem,
    rho: Environment,
    x: Variable,
    body: Preformula,
    *,
    subset_bound: int = DEFAULT_SUBSET_BOUND,
) -> list[StateSet]:
    """The Kleene iterates ∅ ⊆ f(∅) ⊆ ... for the binder body, last = fixpoint."""
    step = lambda t: _eval(ts, {**rho, x: t}, body, subset_bound)
    return list(_kleene(step))


def _eval_brute(ts: TransitionSystem, rho: Environment, phi: Preformula, bound: int) -> StateSet:
    """Like _eval but every binder is the literal intersection of prefixed points."""
    if isinstance(phi, Mu):
        step = lambda t: _eval_brute(ts, {**rho, phi.var: t}, phi.body, bound)
        return _prefixed_intersection(ts, step, bound)
    if isinstance(phi, Not):
        return ts.state_set - _eval_brute(ts, rho, phi.body, bound)
    if isinstance(phi, Imp):
        return (ts.state_set - _eval_brute(ts, rho, phi.left, bound)) | _eval_brute(
            ts, rho, phi.right, bound
        )
    if isinstance(phi, Box):
        body = _eval_brute(ts, rho, phi.body, bound)
        return frozenset(s for s in ts.state_set if ts.succ(phi.action, s) <= body)
    return _eval(ts, rho, phi, bound)


def eval_mu_oracle(
    ts: TransitionSystem,
    rho: Environment,
    x: Variable,
    body: Preformula,
    *,
    max_states: int = DEFAULT_SUBSET_BOUND,
) -> StateSet:
    """Brute-force denotation of the binder over `body`: the intersection
    of every subset T with body-value(T) ⊆ T, enumerated over all 2^|S|
    subsets.  Total even for non-monotone bodies; independent of the
    Kleene path it cross-checks."""
    if len(ts.states) > max_states:
        raise BoundExceeded(
            f"{len(ts.states)} states exceeds the oracle bound {max_states}"
        )
    _check_env(ts, rho)
    step = lambda t: _eval_brute(ts, {**rho, x: t}, body, max_states)
    return _prefixed_intersection(ts, step, max_states)


def semantic_function(
    ts: TransitionSystem,
    rho: Environment,
    x: Variable,
    phi: Preformula,
    *,
    subset_bound: int = DEFAULT_SUBSET_BOUND,
) -> Callable[[StateSet], StateSet]:
    """The map U ↦ value of `phi` with `x` bound to U (no wf gate, so
    monotonicity probes can exercise non-monotone bodies)."""
    _check_env(ts, rho)
    return lambda u: _eval(ts, {**rho, x: u}, phi, subset_bound)


def _monotonicity_probe(
    ts: TransitionSystem,
    rho: Environment,
    x: Variable,
    phi: Preformula,
    *,
    antitone: bool,
    max_states: int,
) -> bool:
    if len(ts.states) > max_states:
        raise BoundExceeded(
            f"{len(ts.states)} states exceeds the probe bound {max_states}"
        )
    f = semantic_function(ts, rho, x, phi, subset_bound=max_states)
    n = len(ts.states)
    by_mask = [f(frozenset(s for i, s in enumerate(ts.states) if mask >> i & 1))
               for mask in range(1 << n)]
    masks = [sum(1 << i for i, s in enumerate(ts.states) if s in val) for val in by_mask]
    for big in range(1 << n):
        small = big
        while True:
            lo, hi = masks[small], masks[big]
            if antitone:
                lo, hi = hi, lo
            if lo & ~hi:
                return False
            if small == 0:
                break
            small = (small - 1) & big
    return True


def check_monotone(
    ts: TransitionSystem,
    rho: Environment,
    x: Variable,
    phi: Preformula,
    *,
    max_states: int = DEFAULT_SUBSET_BOUND,
) -> bool:
    """Exhaustively: U ⊆ V implies f(U) ⊆ f(V) for f = semantic_function."""
    return _monotonicity_probe(ts, rho, x, phi, antitone=False, max_states=max_states)


def check_antimonotone(
    ts: TransitionSystem,
    rho: Environment,
    x: Variable,
    phi: Preformula,
    *,
    max_states: int = DEFAULT_SUBSET_BOUND,
) -> bool:
    """Exhaustively: U ⊆ V implies f(U) ⊇ f(V) for f = semantic_function."""
    return _monotonicity_probe(ts, rho, x, phi, antitone=True, max_states=max_states)


def _assignments(
    ts: TransitionSystem, variables: tuple[Variable, ...], max_assignments: int
) -> Iterator[Environment]:
    total = (1 << len(ts.states)) ** len(variables)
    if total > max_assignments:
        raise BoundExceeded(
            f"{total} environment assignments exceed bound {max_assignments}"
        )
    subsets = list(ts.subsets())
    indices = [0] * len(variables)
    while True:
        yield {x: subsets[i] for x, i in zip(variables, indices)}
        pos = 0
        while pos < len(variables):
            indices[pos] += 1
            if indices[pos] < len(subsets):
                break
            indices[pos] = 0
            pos += 1
        else:
            return


def _resolve_variables(
    hyps: tuple[WfFormula, ...],
    concl: WfFormula,
    variables: Optional[Iterable[Variable]],
) -> tuple[Variable, ...]:
    needed = frozenset().union(*(free_vars(h.prp) for h in hyps), free_vars(concl.prp))
    if variables is None:
        return tuple(sorted(needed))
    given = frozenset(variables)
    if not needed <= given:
        missing = ", ".join(sorted(v.name for v in needed - given))
        raise ValueError(f"enumeration variables must cover free variables: missing {missing}")
    return tuple(sorted(given))


def consequence(
    ts: TransitionSystem,
    hyps: Iterable[WfFormula],
    concl: WfFormula,
    variables: Optional[Iterable[Variable]] = None,
    *,
    max_assignments: int = DEFAULT_ASSIGNMENT_BOUND,
    subset_bound: int = DEFAULT_SUBSET_BOUND,
) -> bool:
    """True iff on this model, under every environment over `variables`,
    the intersection of the hypotheses' denotations is contained in the
    conclusion's (an empty hypothesis set denotes all states)."""
    return (
        counterexample(
            ts,
            hyps,
            concl,
            variables,
            max_assignments=max_assignments,
            subset_bound=subset_bound,
        )
        is None
    )


def counterexample(
    ts: TransitionSystem,
    hyps: Iterable[WfFormula],
    concl: WfFormula,
    variables: Optional[Iterable[Variable]] = None,
    *,
    max_assignments: int = DEFAULT_ASSIGNMENT_BOUND,
    subset_bound: int = DEFAULT_SUBSET_BOUND,
) -> Optional[tuple[Environment, State]]:
    """A witness (environment, state) where all hypotheses hold but the
    conclusion fails; None when the consequence holds."""
    hyps = tuple(hyps)
    xs = _resolve_variables(hyps, concl, variables)
    for rho in _assignments(ts, xs, max_assignments):
        gamma_val = ts.state_set
        for h in hyps:
            gamma_val &= _eval(ts, rho, h.prp, subset_bound)
        concl_val = _eval(ts, rho, concl.prp, subset_bound)
        bad = gamma_val - concl_val
        if bad:
            order = {s: i for i, s in enumerate(ts.states)}
            return rho, min(bad, key=order.__getitem__)
    return None
