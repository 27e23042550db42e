import numpy as np
import pytest

from agencykit.kernel import (
    ControlledKernel,
    Policy,
    kernel_from_dict,
    policy_closure,
    step_distribution,
    successor_support,
    validate_kernel,
)
from conftest import random_kernel


def kernel_from_rows(rows) -> ControlledKernel:
    probs = np.asarray(rows, dtype=np.float64)
    if probs.ndim == 2:
        probs = probs[None, :, :]
    return ControlledKernel(n_states=probs.shape[1], n_actions=probs.shape[0], probs=probs)


class TestValidation:
    def test_identity_kernel_ok(self):
        report = validate_kernel(kernel_from_rows([[1, 0], [0, 1]]))
        assert report.ok
        assert report.violations == []

    def test_row_sum_violation_located(self):
        report = validate_kernel(kernel_from_rows([[0.5, 0.6], [0, 1]]))
        assert not report.ok
        v = report.violations[0]
        assert v["rule"] == "row sum"
        assert (v["action"], v["state"]) == (0, 0)
        assert v["row_sum"] == pytest.approx(1.1)

    def test_negative_entry_flagged(self):
        report = validate_kernel(kernel_from_rows([[1.1, -0.1], [0, 1]]))
        assert not report.ok
        rules = {v["rule"] for v in report.violations}
        assert "negative probability" in rules

    def test_shape_mismatch(self):
        k = ControlledKernel(n_states=3, n_actions=1, probs=np.eye(2)[None])
        report = validate_kernel(k)
        assert not report.ok
        assert report.violations[0]["rule"] == "shape"


class TestStepDistribution:
    def test_identity_fixes_any_distribution(self, rng):
        k = kernel_from_rows(np.eye(4))
        d = rng.dirichlet(np.ones(4))
        np.testing.assert_allclose(step_distribution(k, d, 0), d)

    def test_deterministic_move(self):
        k = kernel_from_rows([[0, 1], [0, 1]])
        np.testing.assert_array_equal(step_distribution(k, [1.0, 0.0], 0), [0.0, 1.0])

    def test_hand_matrix_product(self):
        # [0.5, 0.5] @ [[0.5, 0.5], [0.5, 0.5]] = [0.5, 0.5]
        k = kernel_from_rows([[0.5, 0.5], [0.5, 0.5]])
        np.testing.assert_allclose(step_distribution(k, [0.5, 0.5], 0), [0.5, 0.5])

    def test_action_out_of_range(self):
        k = kernel_from_rows(np.eye(2))
        with pytest.raises(IndexError):
            step_distribution(k, [1.0, 0.0], 1)

    def test_rejects_invalid_distribution(self):
        k = kernel_from_rows(np.eye(2))
        with pytest.raises(ValueError):
            step_distribution(k, [0.5, 0.4], 0)


class TestSuccessorSupport:
    def test_deterministic_move(self):
        k = kernel_from_rows([[0, 1], [0, 1]])
        assert successor_support(k, 0, 0) == {1}

    def test_partial_support(self):
        k = kernel_from_rows([[0.9, 0.1, 0.0], [1, 0, 0], [0, 0, 1]])
        assert successor_support(k, 0, 0) == {0, 1}

    def test_epsilon_threshold(self):
        k = kernel_from_rows([[1 - 1e-15, 1e-15, 0], [1, 0, 0], [0, 0, 1]])
        assert successor_support(k, 0, 0, epsilon=1e-12) == {0}

    def test_index_out_of_range(self):
        k = kernel_from_rows(np.eye(2))
        with pytest.raises(IndexError):
            successor_support(k, 2, 0)

    def test_monotone_in_epsilon(self, rng):
        k = random_kernel(rng, 6, 2)
        for a in range(2):
            for s in range(6):
                lo = successor_support(k, s, a, epsilon=1e-12)
                hi = successor_support(k, s, a, epsilon=0.05)
                assert hi <= lo


class TestPolicyClosure:
    def test_constant_policy_selects_matrix(self, rng):
        k = random_kernel(rng, 5, 3)
        mu = Policy(kind="deterministic", table={s: 0 for s in range(5)})
        np.testing.assert_array_equal(policy_closure(k, mu), k.probs[0])

    def test_uniform_mix_identity_and_swap(self):
        swap = np.array([[0, 1], [1, 0]], dtype=float)
        k = ControlledKernel(n_states=2, n_actions=2,
                             probs=np.stack([np.eye(2), swap]))
        mu = Policy(kind="stochastic", table={s: np.array([0.5, 0.5]) for s in range(2)})
        np.testing.assert_allclose(policy_closure(k, mu), np.full((2, 2), 0.5))

    def test_single_action_kernel(self, rng):
        k = random_kernel(rng, 4, 1)
        mu = Policy(kind="deterministic", table={s: 0 for s in range(4)})
        np.testing.assert_array_equal(policy_closure(k, mu), k.probs[0])

    def test_partial_policy_rejected(self, rng):
        k = random_kernel(rng, 4, 2)
        mu = Policy(kind="deterministic", table={0: 0, 1: 1})
        with pytest.raises(ValueError):
            policy_closure(k, mu)


class TestSerialization:
    def test_round_trip_preserves_everything(self, rng):
        k = random_kernel(rng, 5, 3)
        data = k.to_dict()
        assert set(data) == {"n_states", "n_actions", "probs", "action_names"}
        back = kernel_from_dict(data)
        assert back.n_states == k.n_states
        assert back.action_names == k.action_names
        np.testing.assert_array_equal(back.probs, k.probs)

    def test_serialized_form_is_canonicalizable(self, rng):
        from agencykit.artifacts import canonical_serialize

        k = random_kernel(rng, 3, 2)
        payload = canonical_serialize(k.to_dict())
        assert payload.startswith(b'{"action_names":')


class TestProperties:
    def test_step_preserves_row_stochasticity(self, rng):
        for _ in range(25):
            n, m = rng.randint(2, 9), rng.randint(1, 4)
            k = random_kernel(rng, n, m)
            assert validate_kernel(k).ok
            d = rng.dirichlet(np.ones(n))
            for a in range(m):
                out = step_distribution(k, d, a)
                assert abs(out.sum() - 1.0) <= 1e-12
                assert np.all(out >= -1e-15)

    def test_closure_preserves_row_stochasticity(self, rng):
        for _ in range(25):
            n, m = rng.randint(2, 9), rng.randint(1, 4)
            k = random_kernel(rng, n, m)
            mu = Policy(kind="stochastic",
                        table={s: rng.dirichlet(np.ones(m)) for s in range(n)})
            T = policy_closure(k, mu)
            np.testing.assert_allclose(T.sum(axis=1), np.ones(n), atol=1e-12)

    def test_step_linear_in_distribution(self, rng):
        for _ in range(10):
            k = random_kernel(rng, 6, 2)
            d1, d2 = rng.dirichlet(np.ones(6)), rng.dirichlet(np.ones(6))
            alpha = rng.random()
            mix = alpha * d1 + (1 - alpha) * d2
            lhs = step_distribution(k, mix, 0)
            rhs = alpha * step_distribution(k, d1, 0) + (1 - alpha) * step_distribution(k, d2, 0)
            np.testing.assert_allclose(lhs, rhs, atol=1e-10)
