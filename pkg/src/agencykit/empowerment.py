"""Action-sequence channels, channel capacity, and empowerment aggregation.

Empowerment at (s0, H, f) is the channel capacity of the map from length-H
action sequences to the lens output at time H. Feasible empowerment restricts
the input alphabet to sequences whose total cost fits the initial budget.
Capacity is solved by Blahut-Arimoto with certified upper/lower bounds; all
logs are base 2 and 0*log(0) = 0 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from agencykit.feasibility import ActionSequence, FeasibilityGate, feasible_sequences
from agencykit.kernel import ControlledKernel

ROW_TOLERANCE = 1e-9
MASS_TOLERANCE = 1e-10

BA_DEFAULT_TOL = 1e-9
BA_DEFAULT_MAX_ITER = 10000


@dataclass(frozen=True)
class Lens:
    """Total projection from state indices to a finite label set."""

    name: str
    project: np.ndarray
    n_labels: int

    def __post_init__(self):
        project = np.asarray(self.project, dtype=np.int64)
        if project.ndim != 1:
            raise ValueError("lens projection must be a 1-d label array")
        if np.any(project < 0) or np.any(project >= self.n_labels):
            raise ValueError("lens labels out of range")
        project.setflags(write=False)
        object.__setattr__(self, "project", project)

    def push(self, d: np.ndarray) -> np.ndarray:
        """Aggregate a state distribution into a label distribution."""
        return np.bincount(self.project, weights=d, minlength=self.n_labels)


@dataclass
class Channel:
    """Row-stochastic matrix from admissible action sequences to output labels."""

    inputs: list[ActionSequence]
    matrix: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]


@dataclass
class CapacityResult:
    """Certified capacity estimate with its achieving input distribution."""

    capacity_bits: float
    input_distribution: np.ndarray
    iterations: int
    gap: float
    lower_bound_trace: list[float] = field(default_factory=list, repr=False)


def rollout_output_distribution(
    k: ControlledKernel, s0: int, alpha: ActionSequence | tuple[int, ...], f: Lens
) -> np.ndarray:
    """Exact push-forward of delta_{s0} through an action sequence, then the lens."""
    actions = alpha.actions if isinstance(alpha, ActionSequence) else tuple(alpha)
    if len(actions) < 1:
        raise ValueError("action sequence must have length >= 1")
    if not 0 <= s0 < k.n_states:
        raise IndexError(f"state index {s0} out of range")
    d = np.zeros(k.n_states)
    d[s0] = 1.0
    for a in actions:
        d = d @ k.probs[a]
    out = f.push(d)
    if abs(float(out.sum()) - 1.0) > MASS_TOLERANCE:
        raise ValueError(f"rollout mass {out.sum()!r} deviates from 1")
    return out


def _sequence_kernels(k: ControlledKernel, sequences: list[ActionSequence]) -> np.ndarray:
    """State-to-state matrices for each sequence, sharing prefix products."""
    cache: dict[tuple[int, ...], np.ndarray] = {(): np.eye(k.n_states)}

    def product(prefix: tuple[int, ...]) -> np.ndarray:
        if prefix not in cache:
            cache[prefix] = product(prefix[:-1]) @ k.probs[prefix[-1]]
        return cache[prefix]

    return np.stack([product(seq.actions) for seq in sequences])


def build_channel(
    k: ControlledKernel,
    gate: FeasibilityGate,
    s0: int,
    horizon: int,
    f: Lens,
    feasible_only: bool = True,
) -> Channel:
    """Channel whose rows are per-sequence output distributions from ``s0``.

    Rows follow the deterministic lexicographic sequence order. With
    ``feasible_only`` the inputs are gated by the initial budget at ``s0``;
    a zero-row channel is legal.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if feasible_only:
        seqs = feasible_sequences(gate, s0, horizon)
    else:
        free = FeasibilityGate(ledger=gate.ledger, costs=np.zeros_like(gate.costs))
        seqs = feasible_sequences(free, s0, horizon)
        seqs = [
            ActionSequence(actions=s.actions, total_cost=float(gate.costs[list(s.actions)].sum()))
            for s in seqs
        ]
    if not seqs:
        return Channel(inputs=[], matrix=np.zeros((0, f.n_labels)))
    rows = [rollout_output_distribution(k, s0, seq, f) for seq in seqs]
    return Channel(inputs=seqs, matrix=np.stack(rows))


def channel_capacity(
    w: Channel | np.ndarray,
    tol: float = BA_DEFAULT_TOL,
    max_iter: int = BA_DEFAULT_MAX_ITER,
) -> CapacityResult:
    """Channel capacity in bits via Blahut-Arimoto alternating maximization.

    Terminates when the certified bound gap max_x D(W_x || q) - I(p; W) drops
    to ``tol`` bits; a run that exhausts ``max_iter`` reports its final gap.
    Channels with zero or one row have capacity zero by convention.
    """
    matrix = w.matrix if isinstance(w, Channel) else np.asarray(w, dtype=np.float64)
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = matrix.shape[0]
    if m <= 1:
        return CapacityResult(
            capacity_bits=0.0,
            input_distribution=np.ones(m),
            iterations=0,
            gap=0.0,
        )
    row_sums = matrix.sum(axis=1)
    bad = np.flatnonzero(np.abs(row_sums - 1.0) > ROW_TOLERANCE)
    if bad.size:
        raise ValueError(f"channel row {int(bad[0])} sums to {row_sums[bad[0]]!r}")

    W = matrix
    mask = W > 0
    logW = np.zeros_like(W)
    logW[mask] = np.log2(W[mask])
    row_neg_entropy = (W * logW).sum(axis=1)

    p = np.full(m, 1.0 / m)
    trace: list[float] = []
    iterations = 0
    gap = np.inf
    lower = 0.0
    for iterations in range(1, max_iter + 1):
        q = p @ W
        # flooring q makes a supported column with zero marginal register as a
        # huge divergence (instead of dropping out of D), so the update pushes
        # input mass back toward that row; unsupported columns stay masked out
        logq = np.log2(np.maximum(q, 1e-300))
        D = row_neg_entropy - (W * np.where(mask, logq[None, :], 0.0)).sum(axis=1)
        lower = float(p @ D)
        upper = float(D.max())
        trace.append(lower)
        gap = upper - lower
        if gap <= tol:
            break
        # multiplicative update p <- p * 2^D, normalized
        scaled = p * np.exp2(D - D.max())
        p = scaled / scaled.sum()

    return CapacityResult(
        capacity_bits=max(lower, 0.0),
        input_distribution=p,
        iterations=iterations,
        gap=float(gap),
        lower_bound_trace=trace,
    )


def feasible_empowerment(
    k: ControlledKernel,
    gate: FeasibilityGate,
    s0: int,
    horizon: int,
    f: Lens,
    tol: float = BA_DEFAULT_TOL,
) -> float:
    """Capacity (bits) of the budget-restricted sequence channel from ``s0``."""
    channel = build_channel(k, gate, s0, horizon, f, feasible_only=True)
    return channel_capacity(channel, tol=tol).capacity_bits


@dataclass
class MedianEmpowermentResult:
    """Lower-median empowerment over a deterministically selected state subset."""

    median_bits: float
    selected_states: list[int]
    values: list[float]
    subset_rule: str


def select_kernel_subset(indices: np.ndarray, max_states: int) -> np.ndarray:
    """Deterministic subset rule: all states when small, else evenly strided.

    States are sorted by index; when more than ``max_states`` remain, positions
    floor(i * n / max_states) for i = 0..max_states-1 are kept.
    """
    indices = np.sort(np.asarray(indices))
    n = len(indices)
    if n <= max_states:
        return indices
    picks = (np.arange(max_states) * n) // max_states
    return indices[picks]


def lower_median(values: list[float] | np.ndarray) -> float:
    """Element at position floor((m-1)/2) of the sorted values."""
    ordered = np.sort(np.asarray(values, dtype=np.float64))
    return float(ordered[(len(ordered) - 1) // 2])


def _batched_sequence_rows(
    k: ControlledKernel, horizon: int, f: Lens, states: np.ndarray
) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Output rows for every length-H sequence from several start states at once.

    Shares prefix products across the lexicographic sequence tree; returns the
    sequences in lex order and an array of shape (n_seq, len(states), n_labels).
    """
    states = np.asarray(states, dtype=np.int64)
    lens_onehot = np.zeros((k.n_states, f.n_labels))
    lens_onehot[np.arange(k.n_states), f.project] = 1.0
    D0 = np.zeros((len(states), k.n_states))
    D0[np.arange(len(states)), states] = 1.0

    seqs: list[tuple[int, ...]] = []
    rows: list[np.ndarray] = []

    def descend(prefix: tuple[int, ...], D: np.ndarray) -> None:
        if len(prefix) == horizon:
            seqs.append(prefix)
            rows.append(D @ lens_onehot)
            return
        for a in range(k.n_actions):
            descend(prefix + (a,), D @ k.probs[a])

    descend((), D0)
    return seqs, np.stack(rows)


def median_empowerment_on_kernel(
    k: ControlledKernel,
    gate: FeasibilityGate,
    kernel_set: np.ndarray,
    horizon: int,
    f: Lens,
    max_states: int = 64,
    tol: float = BA_DEFAULT_TOL,
) -> MedianEmpowermentResult:
    """Lower-median feasible empowerment over a viability kernel.

    ``kernel_set`` is a boolean mask or an index array. The empty set yields
    zero by convention (no viable states means no induced action layer).
    Rollouts share prefix products across the selected states; each state's
    channel still contains exactly its budget-feasible sequences.
    """
    kernel_set = np.asarray(kernel_set)
    indices = np.flatnonzero(kernel_set) if kernel_set.dtype == bool else kernel_set
    if len(indices) == 0:
        return MedianEmpowermentResult(
            median_bits=0.0, selected_states=[], values=[], subset_rule="empty_kernel"
        )
    selected = select_kernel_subset(indices, max_states)
    rule = "all_states" if len(indices) <= max_states else f"strided_{max_states}"

    seqs, rows = _batched_sequence_rows(k, horizon, f, selected)
    seq_costs = np.array([gate.costs[list(s)].sum() for s in seqs])
    values = []
    for i, s in enumerate(selected):
        feasible = seq_costs <= gate.ledger[s]
        channel = rows[feasible][:, i, :]
        values.append(channel_capacity(channel, tol=tol).capacity_bits)
    return MedianEmpowermentResult(
        median_bits=lower_median(values),
        selected_states=[int(s) for s in selected],
        values=values,
        subset_rule=rule,
    )


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance (1/2) sum |p_i - q_i| between two distributions."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    return float(0.5 * np.abs(p - q).sum())
