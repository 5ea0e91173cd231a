"""Formula syntax: variables, occurrence checks, substitution, positivity.

Preformulae are the unrestricted grammar (atoms, ff, negation,
implication, box, propositional variables and the least-fixpoint binder
``Mu``) with no formation constraint on ``Mu``.  The positivity
decision procedures (`pos_in`, `neg_in`, `is_wf`) and the `WfFormula`
wrapper enforce the constraint one level up.

Preformulae compare and hash up to alpha-equivalence: two formulas that
differ only in bound-variable names are equal, interchangeable as dict
keys and set members.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional


@dataclass(frozen=True, order=True)
class Variable:
    """A propositional variable identifier."""

    name: str

    def __repr__(self) -> str:
        return f"Variable({self.name!r})"


@dataclass(frozen=True, order=True)
class AtomicId:
    """An atomic-proposition identifier."""

    name: str

    def __repr__(self) -> str:
        return f"AtomicId({self.name!r})"


@dataclass(frozen=True, order=True)
class ActionId:
    """An action identifier (the label inside a box modality)."""

    name: str

    def __repr__(self) -> str:
        return f"ActionId({self.name!r})"


class Preformula:
    """Base class of all formula nodes.

    Equality and hashing are alpha-aware: bound-variable names do not
    matter.  Instances are immutable; the alpha-canonical hash is cached
    on first use.
    """

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Preformula):
            return NotImplemented
        return _canonical(self) == _canonical(other)

    def __ne__(self, other: object) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self) -> int:
        cached = self.__dict__.get("_alpha_hash")
        if cached is None:
            cached = hash(_canonical(self))
            object.__setattr__(self, "_alpha_hash", cached)
        return cached


@dataclass(frozen=True, eq=False, repr=False)
class Atom(Preformula):
    prop: AtomicId

    def __repr__(self) -> str:
        return f"Atom({self.prop.name!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Ff(Preformula):
    def __repr__(self) -> str:
        return "Ff()"


@dataclass(frozen=True, eq=False, repr=False)
class Not(Preformula):
    body: Preformula

    def __repr__(self) -> str:
        return f"Not({self.body!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Imp(Preformula):
    left: Preformula
    right: Preformula

    def __repr__(self) -> str:
        return f"Imp({self.left!r}, {self.right!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Box(Preformula):
    action: ActionId
    body: Preformula

    def __repr__(self) -> str:
        return f"Box({self.action.name!r}, {self.body!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Var(Preformula):
    var: Variable

    def __repr__(self) -> str:
        return f"Var({self.var.name!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Mu(Preformula):
    var: Variable
    body: Preformula

    def __repr__(self) -> str:
        return f"Mu({self.var.name!r}, {self.body!r})"


def _canonical(phi: Preformula, env: Optional[dict] = None, depth: int = 0):
    """Nested-tuple canonical form; bound variables become binder distances."""
    if env is None:
        env = {}
    if isinstance(phi, Atom):
        return ("p", phi.prop.name)
    if isinstance(phi, Ff):
        return ("ff",)
    if isinstance(phi, Not):
        return ("not", _canonical(phi.body, env, depth))
    if isinstance(phi, Imp):
        return ("imp", _canonical(phi.left, env, depth), _canonical(phi.right, env, depth))
    if isinstance(phi, Box):
        return ("box", phi.action.name, _canonical(phi.body, env, depth))
    if isinstance(phi, Var):
        bound_at = env.get(phi.var)
        if bound_at is None:
            return ("free", phi.var.name)
        return ("bound", depth - bound_at)
    if isinstance(phi, Mu):
        inner = dict(env)
        inner[phi.var] = depth
        return ("mu", _canonical(phi.body, inner, depth + 1))
    raise TypeError(f"not a preformula: {phi!r}")


def alpha_eq(phi: Preformula, psi: Preformula) -> bool:
    """True iff the formulas differ only in bound-variable names."""
    return _canonical(phi) == _canonical(psi)


def free_vars(phi: Preformula) -> frozenset[Variable]:
    """The variables with at least one free occurrence in `phi`."""
    cached = phi.__dict__.get("_free_vars")
    if cached is not None:
        return cached
    if isinstance(phi, (Atom, Ff)):
        fv: frozenset[Variable] = frozenset()
    elif isinstance(phi, (Not, Box)):
        fv = free_vars(phi.body)
    elif isinstance(phi, Imp):
        fv = free_vars(phi.left) | free_vars(phi.right)
    elif isinstance(phi, Var):
        fv = frozenset((phi.var,))
    elif isinstance(phi, Mu):
        fv = free_vars(phi.body) - {phi.var}
    else:
        raise TypeError(f"not a preformula: {phi!r}")
    object.__setattr__(phi, "_free_vars", fv)
    return fv


def atoms_in(phi: Preformula) -> frozenset[AtomicId]:
    """Every atomic proposition mentioned in `phi`."""
    if isinstance(phi, Atom):
        return frozenset((phi.prop,))
    if isinstance(phi, (Not, Box, Mu)):
        return atoms_in(phi.body)
    if isinstance(phi, Imp):
        return atoms_in(phi.left) | atoms_in(phi.right)
    return frozenset()


def actions_in(phi: Preformula) -> frozenset[ActionId]:
    """Every action mentioned in `phi`."""
    if isinstance(phi, Box):
        return frozenset((phi.action,)) | actions_in(phi.body)
    if isinstance(phi, (Not, Mu)):
        return actions_in(phi.body)
    if isinstance(phi, Imp):
        return actions_in(phi.left) | actions_in(phi.right)
    return frozenset()


def is_in(x: Variable, phi: Preformula) -> bool:
    """True iff `x` occurs free in `phi`."""
    return x in free_vars(phi)


def not_in(x: Variable, phi: Preformula) -> bool:
    """True iff `x` has no free occurrence in `phi`."""
    return x not in free_vars(phi)


def fresh(avoid: Iterable[Variable]) -> Variable:
    """Smallest variable v0, v1, ... whose name is unused in `avoid`.

    Deterministic, so renamings and golden output are reproducible.
    """
    taken = {v.name for v in avoid}
    for i in itertools.count():
        name = f"v{i}"
        if name not in taken:
            return Variable(name)
    raise AssertionError("unreachable")


FreshFn = Callable[[frozenset], Variable]


def subst(phi: Preformula, x: Variable, repl: Preformula) -> Preformula:
    """Capture-avoiding substitution of `repl` for free occurrences of `x`.

    Binders whose variable would capture a free variable of `repl` are
    renamed to a deterministic fresh name first.
    """
    if isinstance(phi, (Atom, Ff)):
        return phi
    if isinstance(phi, Var):
        return repl if phi.var == x else phi
    if isinstance(phi, Not):
        return Not(subst(phi.body, x, repl))
    if isinstance(phi, Imp):
        return Imp(subst(phi.left, x, repl), subst(phi.right, x, repl))
    if isinstance(phi, Box):
        return Box(phi.action, subst(phi.body, x, repl))
    if isinstance(phi, Mu):
        y = phi.var
        if y == x or x not in free_vars(phi.body):
            return phi
        if y in free_vars(repl):
            z = fresh(free_vars(phi.body) | free_vars(repl) | {x, y})
            renamed = subst(phi.body, y, Var(z))
            return Mu(z, subst(renamed, x, repl))
        return Mu(y, subst(phi.body, x, repl))
    raise TypeError(f"not a preformula: {phi!r}")


def _signed_in(x: Variable, phi: Preformula, positive: bool, fresh_fn: FreshFn) -> bool:
    if isinstance(phi, (Atom, Ff)):
        return True
    if isinstance(phi, Var):
        return True if positive else phi.var != x
    if isinstance(phi, Not):
        return _signed_in(x, phi.body, not positive, fresh_fn)
    if isinstance(phi, Imp):
        return _signed_in(x, phi.left, not positive, fresh_fn) and _signed_in(
            x, phi.right, positive, fresh_fn
        )
    if isinstance(phi, Box):
        return _signed_in(x, phi.body, positive, fresh_fn)
    if isinstance(phi, Mu):
        # One fresh instance stands in for the rule's "every z distinct
        # from x"; invariance under the choice is property-tested.
        z = fresh_fn(free_vars(phi) | {x, phi.var})
        return _signed_in(x, subst(phi.body, phi.var, Var(z)), positive, fresh_fn)
    raise TypeError(f"not a preformula: {phi!r}")


def pos_in(x: Variable, phi: Preformula, fresh_fn: FreshFn = fresh) -> bool:
    """True iff every free occurrence of `x` in `phi` is positive.

    Vacuously true when `x` does not occur; note `pos_in(x, Var(x))`
    holds while `neg_in(x, Var(x))` does not.
    """
    return _signed_in(x, phi, True, fresh_fn)


def neg_in(x: Variable, phi: Preformula, fresh_fn: FreshFn = fresh) -> bool:
    """True iff every free occurrence of `x` in `phi` is negative."""
    return _signed_in(x, phi, False, fresh_fn)


def is_wf(phi: Preformula, fresh_fn: FreshFn = fresh) -> bool:
    """True iff every Mu subformula binds a positively-occurring variable."""
    if isinstance(phi, (Atom, Ff, Var)):
        return True
    if isinstance(phi, (Not, Box)):
        return is_wf(phi.body, fresh_fn)
    if isinstance(phi, Imp):
        return is_wf(phi.left, fresh_fn) and is_wf(phi.right, fresh_fn)
    if isinstance(phi, Mu):
        z = fresh_fn(free_vars(phi.body) | {phi.var})
        renamed = subst(phi.body, phi.var, Var(z))
        return pos_in(z, renamed, fresh_fn) and is_wf(renamed, fresh_fn)
    raise TypeError(f"not a preformula: {phi!r}")


Path = tuple[int, ...]


class WellFormednessError(Exception):
    """A Mu subformula binds a variable with a negative free occurrence.

    `path` locates the offending Mu node (child indices from the root),
    `variable` is its bound variable, and `occurrence` locates one
    negative occurrence of that variable, also from the root.
    """

    def __init__(self, path: Path, variable: Variable, occurrence: Path):
        self.path = path
        self.variable = variable
        self.occurrence = occurrence
        super().__init__(
            f"bound variable {variable.name!r} occurs negatively "
            f"(binder at path {list(path)}, occurrence at path {list(occurrence)})"
        )


def _find_occurrence(x: Variable, phi: Preformula, positive: bool, path: Path) -> Optional[Path]:
    """Path of some free occurrence of `x` carrying the given polarity."""
    if isinstance(phi, (Atom, Ff)):
        return None
    if isinstance(phi, Var):
        return path if phi.var == x and positive else None
    if isinstance(phi, Not):
        return _find_occurrence(x, phi.body, not positive, path + (0,))
    if isinstance(phi, Imp):
        hit = _find_occurrence(x, phi.left, not positive, path + (0,))
        if hit is not None:
            return hit
        return _find_occurrence(x, phi.right, positive, path + (1,))
    if isinstance(phi, Box):
        return _find_occurrence(x, phi.body, positive, path + (0,))
    if isinstance(phi, Mu):
        if phi.var == x:
            return None
        return _find_occurrence(x, phi.body, positive, path + (0,))
    raise TypeError(f"not a preformula: {phi!r}")


def _wf_violation(phi: Preformula, path: Path = ()) -> Optional[WellFormednessError]:
    if isinstance(phi, (Atom, Ff, Var)):
        return None
    if isinstance(phi, (Not, Box)):
        return _wf_violation(phi.body, path + (0,))
    if isinstance(phi, Imp):
        return _wf_violation(phi.left, path + (0,)) or _wf_violation(phi.right, path + (1,))
    if isinstance(phi, Mu):
        z = fresh(free_vars(phi.body) | {phi.var})
        renamed = subst(phi.body, phi.var, Var(z))
        if not pos_in(z, renamed):
            # a failing positivity check always leaves a negative witness
            occ = _find_occurrence(z, renamed, positive=False, path=path + (0,))
            assert occ is not None
            return WellFormednessError(path, phi.var, occ)
        return _wf_violation(renamed, path + (0,))
    raise TypeError(f"not a preformula: {phi!r}")


@dataclass(frozen=True)
class WfFormula:
    """A preformula plus checked well-formedness evidence.

    Construction runs the check, so an ill-formed instance cannot exist;
    prefer `mk_wf`, which documents the failure with a located error.
    """

    prp: Preformula
    cnd: bool = field(init=False, default=True)

    def __post_init__(self) -> None:
        violation = _wf_violation(self.prp)
        if violation is not None:
            raise violation

    def __repr__(self) -> str:
        return f"WfFormula({self.prp!r})"


def mk_wf(phi: Preformula) -> WfFormula:
    """Check `phi` and wrap it; raises WellFormednessError with the
    offending binder path and occurrence otherwise."""
    return WfFormula(phi)


# ---------------------------------------------------------------------------
# Derived connectives (macros over the minimal grammar)

def tt() -> Preformula:
    return Not(Ff())


def and_(left: Preformula, right: Preformula) -> Preformula:
    return Not(Imp(left, Not(right)))


def or_(left: Preformula, right: Preformula) -> Preformula:
    return Imp(Not(left), right)


def diamond(action: ActionId, body: Preformula) -> Preformula:
    return Not(Box(action, Not(body)))


def nu(x: Variable, body: Preformula) -> Preformula:
    """Greatest-fixpoint shorthand: ~mu x. ~(body with x negated)."""
    return Not(Mu(x, Not(subst(body, x, Not(Var(x))))))
