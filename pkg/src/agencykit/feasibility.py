"""Ledger-gated action feasibility and budgeted open-loop sequence enumeration.

An action is feasible at a state when its cost does not exceed the state's
ledger value. A length-H action sequence is feasible when its total cost fits
the *initial* budget (open-loop gate); feasibility is never re-evaluated along
the branch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FeasibilityGate:
    """Ledger extractor r(s) and per-action cost table c(a).

    ``ledger`` has one nonnegative entry per state, ``costs`` one per action.
    """

    ledger: np.ndarray
    costs: np.ndarray

    def __post_init__(self):
        ledger = np.asarray(self.ledger, dtype=np.float64)
        costs = np.asarray(self.costs, dtype=np.float64)
        if np.any(ledger < 0):
            raise ValueError("ledger values must be nonnegative")
        if np.any(costs < 0):
            raise ValueError("action costs must be nonnegative")
        ledger.setflags(write=False)
        costs.setflags(write=False)
        object.__setattr__(self, "ledger", ledger)
        object.__setattr__(self, "costs", costs)

    @property
    def n_actions(self) -> int:
        return len(self.costs)


@dataclass(frozen=True)
class ActionSequence:
    """Ordered open-loop action sequence with its derived total cost."""

    actions: tuple[int, ...]
    total_cost: float

    def __len__(self) -> int:
        return len(self.actions)


def feasible_actions(gate: FeasibilityGate, s: int) -> set[int]:
    """Actions affordable at state ``s``: {a : c(a) <= r(s)}, exact comparison."""
    budget = gate.ledger[s]
    return set(np.flatnonzero(gate.costs <= budget).tolist())


def feasible_action_matrix(gate: FeasibilityGate) -> np.ndarray:
    """Boolean matrix F[a, s] = (c(a) <= r(s)) for batch set computations."""
    return gate.costs[:, None] <= gate.ledger[None, :]


def feasible_sequences(gate: FeasibilityGate, s0: int, horizon: int) -> list[ActionSequence]:
    """All length-H sequences whose total cost fits the initial budget r(s0).

    Enumeration is lexicographic by action index, so output order is
    deterministic and stable across runs. May be empty.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    budget = gate.ledger[s0]
    out: list[ActionSequence] = []
    for combo in itertools.product(range(gate.n_actions), repeat=horizon):
        total = float(gate.costs[list(combo)].sum())
        if total <= budget:
            out.append(ActionSequence(actions=combo, total_cost=total))
    return out
