"""Controlled stochastic kernels: construction, validation, one-step algebra.

A controlled kernel is a stack of row-stochastic matrices, one per action.
This demo builds a tiny 3-state example by hand and walks through the core
operations: validation, stepping a distribution, successor supports, and
closing the kernel under a policy.
"""

import numpy as np

from agencykit.kernel import (
    ControlledKernel,
    Policy,
    policy_closure,
    step_distribution,
    successor_support,
    validate_kernel,
)

# Two actions on three states: STAY is the identity, DRIFT moves right with
# probability 0.75 and stays put otherwise.
stay = np.eye(3)
drift = np.array([
    [0.25, 0.75, 0.00],
    [0.00, 0.25, 0.75],
    [0.75, 0.00, 0.25],
])
kernel = ControlledKernel(
    n_states=3,
    n_actions=2,
    probs=np.stack([stay, drift]),
    action_names=("STAY", "DRIFT"),
)

report = validate_kernel(kernel)
print("kernel is valid:", report.ok)

# Push a point mass at state 0 through two DRIFT steps.
d = np.array([1.0, 0.0, 0.0])
for step in range(2):
    d = step_distribution(kernel, d, kernel.action_index("DRIFT"))
    print(f"after DRIFT step {step + 1}: {np.round(d, 4)}")

# Successor supports are the worst-case outcome sets used by viability.
print("support of (state 0, DRIFT):", successor_support(kernel, 0, 1))
print("support of (state 0, STAY): ", successor_support(kernel, 0, 0))

# A stochastic policy mixes the action matrices row by row.
mu = Policy(kind="stochastic", table={s: np.array([0.5, 0.5]) for s in range(3)})
T = policy_closure(kernel, mu)
print("half-and-half policy closure:")
print(np.round(T, 4))

# Broken kernels are reported with indices, never silently accepted.
bad = ControlledKernel(n_states=2, n_actions=1, probs=np.array([[[0.5, 0.6], [0, 1]]]))
print("violations in a bad kernel:", validate_kernel(bad).violations)
