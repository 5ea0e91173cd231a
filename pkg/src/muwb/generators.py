"""Seeded random data for cross-check batteries."""

from __future__ import annotations

import random
from typing import Iterable

from .semantics import TransitionSystem
from .syntax import ActionId, AtomicId


def random_model(
    rng: random.Random,
    atoms: Iterable[AtomicId],
    actions: Iterable[ActionId],
    max_states: int = 4,
    min_states: int = 1,
) -> TransitionSystem:
    """A random finite model with 1..max_states states."""
    n = rng.randint(min_states, max_states)
    states = tuple(f"s{i}" for i in range(n))
    props = {
        p: frozenset(s for s in states if rng.random() < 0.5) for p in atoms
    }
    trans = {
        a: {s: frozenset(t for t in states if rng.random() < 0.4) for s in states}
        for a in actions
    }
    return TransitionSystem(states, props, trans)
