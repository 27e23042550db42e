"""Empirical packaging endomap over macro labels and its idempotence defect.

For each macro label the hidden microstate is randomized uniformly over the
label's fiber, the policy-closed dynamics run for tau steps, and the modal
macro label at time tau (ties broken by smallest label) defines an endomap
E : X -> X. The idempotence defect |{x : E(E(x)) != E(x)}| / |X| measures
whether the macro labels compose like stable objects under that lens and
maintenance policy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from agencykit.empowerment import Lens
from agencykit.kernel import ControlledKernel, Policy, policy_closure


@dataclass
class Endomap:
    """Modal macro-label map at horizon tau under one maintenance policy.

    The domain covers exactly the labels with nonempty fibers; ``reach_mass``
    records the modal label's probability mass so auditors can distinguish
    confident modes from near-ties.
    """

    lens_name: str
    horizon_tau: int
    policy_name: str
    mapping: dict[int, int]
    reach_mass: dict[int, float]

    @property
    def domain(self) -> list[int]:
        return sorted(self.mapping)


def fiber(pi: Lens, x: int) -> set[int]:
    """States projecting to label ``x``; may be empty."""
    if not 0 <= x < pi.n_labels:
        raise IndexError(f"label {x} out of range [0, {pi.n_labels})")
    return set(np.flatnonzero(pi.project == x).tolist())


def packaging_endomap(
    k: ControlledKernel,
    pi: Lens,
    mu: Policy,
    tau: int,
    policy_name: str = "policy",
) -> Endomap:
    """Roll uniform fiber distributions tau steps and take the modal label.

    Labels with empty fibers are excluded from the domain (the uniform
    initialization is undefined there). The modal label always has positive
    mass, hence a nonempty fiber, so the endomap is closed on its domain.
    """
    T = policy_closure(k, mu)
    M = np.linalg.matrix_power(T, tau)
    mapping: dict[int, int] = {}
    reach: dict[int, float] = {}
    for x in range(pi.n_labels):
        members = np.flatnonzero(pi.project == x)
        if members.size == 0:
            continue
        d_tau = M[members].mean(axis=0)
        macro = pi.push(d_tau)
        # np.argmax returns the first maximum: the smallest-label tie-break
        target = int(np.argmax(macro))
        mapping[x] = target
        reach[x] = float(macro[target])
    if not mapping:
        raise ValueError("lens has no nonempty fibers")
    return Endomap(
        lens_name=pi.name,
        horizon_tau=tau,
        policy_name=policy_name,
        mapping=mapping,
        reach_mass=reach,
    )


def idempotence_defect(e: Endomap) -> float:
    """Fraction of domain labels x with E(E(x)) != E(x)."""
    domain = e.mapping
    failures = sum(1 for x in domain if domain[domain[x]] != domain[x])
    return failures / len(domain)
