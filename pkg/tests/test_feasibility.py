import itertools

import numpy as np

from agencykit.feasibility import FeasibilityGate, feasible_actions, feasible_sequences


def gate(ledger, costs) -> FeasibilityGate:
    return FeasibilityGate(ledger=np.asarray(ledger, float), costs=np.asarray(costs, float))


class TestFeasibleActions:
    def test_zero_costs_everything_feasible(self):
        g = gate([0, 1, 2], [0, 0, 0])
        for s in range(3):
            assert feasible_actions(g, s) == {0, 1, 2}

    def test_budget_two(self):
        g = gate([2], [0, 1, 3])
        assert feasible_actions(g, 0) == {0, 1}

    def test_empty_budget_positive_costs(self):
        g = gate([0], [1, 2])
        assert feasible_actions(g, 0) == set()

    def test_comparison_is_exact(self):
        g = gate([1], [1])
        assert feasible_actions(g, 0) == {0}


class TestFeasibleSequences:
    def test_zero_cost_lexicographic(self):
        g = gate([0], [0, 0])
        seqs = feasible_sequences(g, 0, 2)
        assert [s.actions for s in seqs] == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_budget_filter(self):
        g = gate([1], [0, 1])
        seqs = feasible_sequences(g, 0, 2)
        assert [s.actions for s in seqs] == [(0, 0), (0, 1), (1, 0)]
        assert [s.total_cost for s in seqs] == [0.0, 1.0, 1.0]

    def test_empty_when_unaffordable(self):
        g = gate([0], [1, 2])
        assert feasible_sequences(g, 0, 3) == []

    def test_zero_costs_count(self):
        g = gate([0], [0, 0, 0])
        assert len(feasible_sequences(g, 0, 4)) == 3**4

    def test_order_stable_across_runs(self):
        g = gate([3], [0, 1, 2])
        first = [s.actions for s in feasible_sequences(g, 0, 3)]
        second = [s.actions for s in feasible_sequences(g, 0, 3)]
        assert first == second

    def test_stepwise_subset_of_initial_budget(self, rng):
        # with zero replenishment, sequences affordable prefix-by-prefix are a
        # subset of those passing the initial-budget gate
        for _ in range(20):
            costs = rng.randint(0, 3, size=3).astype(float)
            budget = float(rng.randint(0, 5))
            g = gate([budget], costs)
            horizon = 3
            initial = {s.actions for s in feasible_sequences(g, 0, horizon)}
            stepwise = set()
            for combo in itertools.product(range(3), repeat=horizon):
                remaining = budget
                ok = True
                for a in combo:
                    if costs[a] > remaining:
                        ok = False
                        break
                    remaining -= costs[a]
                if ok:
                    stepwise.add(combo)
            assert stepwise <= initial
