"""Shared test utilities: enumeration, random generation, positivity oracle.

The positivity oracle is an independent derivability search over the
rule system for positive/negative occurrence: the binder case checks
the premise for *every* candidate replacement name from a pool (the
rule's schematic "for all z distinct from x"), instead of the single
deterministic fresh name the production checker instantiates.
"""

from __future__ import annotations

import itertools
import random

from muwb.syntax import (
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
    free_vars,
    subst,
)

X = Variable("x")
Y = Variable("y")
P = AtomicId("p")
A = ActionId("a")


def enumerate_preformulas(
    max_connectives: int,
    variables: tuple[Variable, ...] = (X, Y),
    atoms: tuple[AtomicId, ...] = (P,),
    actions: tuple[ActionId, ...] = (A,),
) -> list[Preformula]:
    """Every preformula with at most `max_connectives` internal nodes."""
    by_size: list[list[Preformula]] = [[]]
    by_size[0] = [Ff()] + [Atom(p) for p in atoms] + [Var(v) for v in variables]
    for size in range(1, max_connectives + 1):
        layer: list[Preformula] = []
        for sub in by_size[size - 1]:
            layer.append(Not(sub))
            for act in actions:
                layer.append(Box(act, sub))
            for v in variables:
                layer.append(Mu(v, sub))
        for left_size in range(size):
            right_size = size - 1 - left_size
            for left in by_size[left_size]:
                for right in by_size[right_size]:
                    layer.append(Imp(left, right))
        by_size.append(layer)
    return [phi for layer in by_size for phi in layer]


def _candidate_pool(x: Variable, phi: Preformula) -> list[Variable]:
    pool = {X, Y} | free_vars(phi) | {Variable("w0"), Variable("w1"), Variable("w2")}
    pool.discard(x)
    return sorted(pool)


def oracle_posin(x: Variable, phi: Preformula) -> bool:
    """Derivability of the positive-occurrence judgement, searched rule by rule."""
    if isinstance(phi, (Atom, Ff)):
        return True
    if isinstance(phi, Var):
        return True
    if isinstance(phi, Not):
        return oracle_negin(x, phi.body)
    if isinstance(phi, Imp):
        return oracle_negin(x, phi.left) and oracle_posin(x, phi.right)
    if isinstance(phi, Box):
        return oracle_posin(x, phi.body)
    if isinstance(phi, Mu):
        return all(
            oracle_posin(x, subst(phi.body, phi.var, Var(z)))
            for z in _candidate_pool(x, phi)
        )
    raise TypeError(phi)


def oracle_negin(x: Variable, phi: Preformula) -> bool:
    """Derivability of the negative-occurrence judgement, searched rule by rule."""
    if isinstance(phi, (Atom, Ff)):
        return True
    if isinstance(phi, Var):
        return phi.var != x
    if isinstance(phi, Not):
        return oracle_posin(x, phi.body)
    if isinstance(phi, Imp):
        return oracle_posin(x, phi.left) and oracle_negin(x, phi.right)
    if isinstance(phi, Box):
        return oracle_negin(x, phi.body)
    if isinstance(phi, Mu):
        return all(
            oracle_negin(x, subst(phi.body, phi.var, Var(z)))
            for z in _candidate_pool(x, phi)
        )
    raise TypeError(phi)


def random_preformula(
    rng: random.Random,
    depth: int,
    variables: tuple[Variable, ...] = (X, Y),
    atoms: tuple[AtomicId, ...] = (AtomicId("P"), AtomicId("Q")),
    actions: tuple[ActionId, ...] = (A, ActionId("b")),
) -> Preformula:
    """A random preformula of at most the given constructor depth."""
    if depth == 0:
        kind = rng.randrange(3)
        if kind == 0:
            return Ff()
        if kind == 1:
            return Atom(rng.choice(atoms))
        return Var(rng.choice(variables))
    kind = rng.randrange(8)
    if kind == 0:
        return Ff()
    if kind == 1:
        return Atom(rng.choice(atoms))
    if kind == 2:
        return Var(rng.choice(variables))
    if kind == 3:
        return Not(random_preformula(rng, depth - 1, variables, atoms, actions))
    if kind == 4:
        return Box(rng.choice(actions), random_preformula(rng, depth - 1, variables, atoms, actions))
    if kind in (5, 6):
        return Imp(
            random_preformula(rng, depth - 1, variables, atoms, actions),
            random_preformula(rng, depth - 1, variables, atoms, actions),
        )
    return Mu(rng.choice(variables), random_preformula(rng, depth - 1, variables, atoms, actions))


def pool_fresh(prefix: str):
    """A fresh-name chooser drawing from a disjoint name pool."""

    def pick(avoid):
        taken = {v.name for v in avoid}
        for i in itertools.count():
            name = f"{prefix}{i}"
            if name not in taken:
                return Variable(name)

    return pick
