"""Robust viability kernels as greatest fixed points of a contracting operator.

A state stays in a candidate set K when it is safe and some feasible action
keeps the *entire* successor support inside K (worst-case semantics: every
nonzero-probability outcome must remain inside). Iterating this operator from
the top safe set converges, in at most |S| sweeps, to the greatest fixed point.

State sets are represented as boolean masks over state indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from agencykit.feasibility import FeasibilityGate, feasible_action_matrix
from agencykit.kernel import ControlledKernel, support_tensor

BRUTE_FORCE_MAX_STATES = 20


@dataclass(frozen=True)
class SafetyPredicate:
    """Total boolean map over states marking which ones count as viable."""

    safe: np.ndarray
    name: str = "safe"

    def __post_init__(self):
        safe = np.asarray(self.safe, dtype=bool)
        safe.setflags(write=False)
        object.__setattr__(self, "safe", safe)


@dataclass
class ViabilityResult:
    """Greatest viable set plus the iteration trace that produced it."""

    kernel: np.ndarray  # boolean mask over states
    iterations: int
    trace: list[int]  # set sizes per sweep, non-increasing

    @property
    def size(self) -> int:
        return int(self.kernel.sum())

    @property
    def indices(self) -> list[int]:
        return np.flatnonzero(self.kernel).tolist()


def viability_step(
    k: ControlledKernel,
    gate: FeasibilityGate,
    safe: SafetyPredicate,
    K: np.ndarray,
) -> np.ndarray:
    """One sweep of the controlled-invariance operator.

    Returns {s in K : safe(s) and exists feasible a with support(s,a) subset K}.
    Pointwise contracting: the result is always a subset of K.
    """
    K = np.asarray(K, dtype=bool)
    post = support_tensor(k)  # (A, S, S')
    outside = ~K
    # escapes[a, s]: action a at state s can leak outside K
    escapes = np.einsum("ast,t->as", post.astype(np.int64), outside.astype(np.int64)) > 0
    feas = feasible_action_matrix(gate)  # (A, S)
    keeps = feas & ~escapes
    has_safe_action = keeps.any(axis=0)
    return K & safe.safe & has_safe_action


def viability_kernel(
    k: ControlledKernel, gate: FeasibilityGate, safe: SafetyPredicate
) -> ViabilityResult:
    """Greatest fixed point of the viability operator, by downward iteration.

    Starts from the top safe set and sweeps until the set repeats exactly.
    An empty safe set short-circuits to the empty kernel in zero iterations.
    """
    K = np.asarray(safe.safe, dtype=bool).copy()
    trace: list[int] = []
    if not K.any():
        return ViabilityResult(kernel=K, iterations=0, trace=trace)
    iterations = 0
    while True:
        nxt = viability_step(k, gate, safe, K)
        iterations += 1
        trace.append(int(nxt.sum()))
        if np.array_equal(nxt, K):
            return ViabilityResult(kernel=nxt, iterations=iterations, trace=trace)
        K = nxt


def brute_force_greatest_fixpoint(
    k: ControlledKernel, gate: FeasibilityGate, safe: SafetyPredicate
) -> np.ndarray:
    """Union of all fixed points of the viability operator, by 2^n enumeration.

    Serves as an independent oracle for ``viability_kernel``: the union of all
    fixed points of a monotone contracting set operator equals its greatest
    fixed point. Guarded to small state spaces.
    """
    n = k.n_states
    if n > BRUTE_FORCE_MAX_STATES:
        raise ValueError(f"brute force enumeration limited to {BRUTE_FORCE_MAX_STATES} states")
    union = np.zeros(n, dtype=bool)
    for mask_bits in range(1 << n):
        K = np.array([(mask_bits >> i) & 1 == 1 for i in range(n)])
        if np.array_equal(viability_step(k, gate, safe, K), K):
            union |= K
    return union
