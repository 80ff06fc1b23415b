"""Tests for probability objects, information measures and degradedness."""

import math

import numpy as np
import pytest

from secrecy_regions.channel import (
    BceChannel,
    DiscreteChannel,
    JointDistribution,
    Pmf,
    binary_symmetric,
    check_bce_degraded,
    check_stochastically_degraded,
    compose,
    conditional_mutual_information,
    conditional_mutual_information_array,
    entropy,
    identity_channel,
    joint_from_kernels,
    mutual_information,
    uniform_noise_channel,
)
from secrecy_regions.types import ErrorKind, SecrecyError


class TestPmf:
    """Tests for Pmf validation."""

    def test_uniform(self):
        assert np.allclose(Pmf.uniform(4).probs, 0.25)

    def test_point(self):
        assert Pmf.point(3, 1).probs.tolist() == [0.0, 1.0, 0.0]

    def test_rejects_negative(self):
        with pytest.raises(SecrecyError) as info:
            Pmf(np.array([1.2, -0.2]))
        assert info.value.error.kind is ErrorKind.VALIDATION_ERROR

    def test_round_off_negatives_are_clipped(self):
        pmf = Pmf(np.array([0.5 + 1e-13, 0.5, -1e-13]))
        assert pmf.probs[2] == 0.0
        assert pmf.probs.min() >= 0.0
        assert not pmf.probs.flags.writeable

    def test_negative_tolerance_follows_field(self):
        with pytest.raises(SecrecyError) as info:
            Pmf(np.array([0.5 + 1e-6, 0.5, -1e-6]))
        assert "non-negative" in info.value.error.message
        loose = Pmf(np.array([0.5 + 1e-6, 0.5, -1e-6]), tolerance=1e-5)
        assert loose.probs[2] == 0.0

    def test_kernel_round_off_negatives_are_clipped(self):
        channel = DiscreteChannel(np.array([[1.0 + 1e-14, -1e-14], [0.5, 0.5]]))
        assert channel.kernel[0, 1] == 0.0

    def test_rejects_bad_sum(self):
        with pytest.raises(SecrecyError):
            Pmf(np.array([0.5, 0.4]))

    def test_rejects_empty(self):
        with pytest.raises(SecrecyError):
            Pmf(np.array([]))

    def test_is_read_only(self):
        pmf = Pmf.uniform(2)
        with pytest.raises(ValueError):
            pmf.probs[0] = 1.0


class TestDiscreteChannel:
    """Tests for kernels and composition."""

    def test_rows_must_be_stochastic(self):
        with pytest.raises(SecrecyError):
            DiscreteChannel(np.array([[0.5, 0.6], [0.5, 0.5]]))

    def test_output_pmf(self):
        out = binary_symmetric(0.1).output_pmf(Pmf(np.array([0.8, 0.2])))
        assert out.probs == pytest.approx([0.8 * 0.9 + 0.2 * 0.1, 0.8 * 0.1 + 0.2 * 0.9])

    def test_output_pmf_dimension_mismatch(self):
        with pytest.raises(SecrecyError) as info:
            binary_symmetric(0.1).output_pmf(Pmf.uniform(3))
        assert info.value.error.kind is ErrorKind.DIMENSION_MISMATCH

    def test_compose_bsc(self):
        cascade = compose(binary_symmetric(0.1), binary_symmetric(0.05))
        assert cascade.kernel[0, 1] == pytest.approx(0.1 * 0.95 + 0.9 * 0.05)

    def test_compose_dimension_mismatch(self, ternary_channel):
        with pytest.raises(SecrecyError):
            compose(binary_symmetric(0.1), ternary_channel)


class TestInformationMeasures:
    """Entropy and mutual information against closed forms."""

    def test_entropy_of_uniform(self):
        assert entropy(Pmf.uniform(8)) == pytest.approx(3.0)

    def test_entropy_of_point_mass(self):
        assert entropy(Pmf.point(5, 2)) == 0.0

    def test_entropy_accepts_raw_arrays(self, h2):
        assert entropy([0.1, 0.9]) == pytest.approx(h2(0.1))

    def test_bsc_mutual_information(self, h2):
        joint = joint_from_kernels(Pmf.uniform(2), binary_symmetric(0.1))
        assert mutual_information(joint, ["x"], ["y"]) == pytest.approx(1 - h2(0.1), abs=1e-12)

    def test_independent_variables(self):
        joint = joint_from_kernels(Pmf.uniform(2), uniform_noise_channel(2, 3))
        assert mutual_information(joint, ["x"], ["y"]) == 0.0

    def test_noiseless_channel(self):
        p = Pmf(np.array([0.2, 0.3, 0.5]))
        joint = joint_from_kernels(p, identity_channel(3))
        assert mutual_information(joint, ["x"], ["y"]) == pytest.approx(entropy(p))

    def test_chain_rule(self, bsc_cascade):
        """I(X; Y1, Z) = I(X; Z) + I(X; Y1 | Z) on a conditionally independent joint."""
        rng = np.random.default_rng(3)
        p_x = rng.dirichlet(np.ones(2))
        probs = np.einsum("x,xa,xc->xac", p_x, bsc_cascade.y1.kernel, bsc_cascade.z.kernel)
        joint = JointDistribution(probs, ("x", "y1", "z"))
        total = mutual_information(joint, ["x"], ["y1", "z"])
        split = mutual_information(joint, ["x"], ["z"]) + conditional_mutual_information(
            joint, ["x"], ["y1"], ["z"]
        )
        assert total == pytest.approx(split, abs=1e-12)

    def test_markov_chain_has_zero_conditional_information(self, bsc_cascade_physical):
        """X -> Y1 -> Y2 gives I(X; Y2 | Y1) = 0."""
        probs = 0.5 * bsc_cascade_physical.joint
        assert conditional_mutual_information_array(probs, [0], [2], [1]) == pytest.approx(
            0.0, abs=1e-15
        )

    def test_mutual_information_is_entropy_balance(self):
        """I(A;B) = H(A) + H(B) - H(A,B) on random joints."""
        rng = np.random.default_rng(11)
        for _ in range(25):
            probs = rng.dirichlet(np.ones(12)).reshape(3, 4)
            joint = JointDistribution(probs, ("a", "b"))
            marginals = entropy(probs.sum(axis=1)) + entropy(probs.sum(axis=0))
            balance = marginals - entropy(probs.ravel())
            assert mutual_information(joint, ["a"], ["b"]) == pytest.approx(balance, abs=1e-12)

    def test_conditional_information_by_slices(self):
        """I(A;B|C) = sum_c P(c) I(A;B|C=c) on random 2x2x2 joints."""

        def slice_information(block):
            block = block / block.sum()
            rows, cols = block.sum(axis=1), block.sum(axis=0)
            total = 0.0
            for i in range(block.shape[0]):
                for j in range(block.shape[1]):
                    if block[i, j] > 0:
                        total += block[i, j] * math.log2(block[i, j] / (rows[i] * cols[j]))
            return total

        rng = np.random.default_rng(12)
        for _ in range(25):
            probs = rng.dirichlet(np.ones(8)).reshape(2, 2, 2)
            oracle = sum(
                probs[:, :, c].sum() * slice_information(probs[:, :, c]) for c in range(2)
            )
            joint = JointDistribution(probs, ("a", "b", "c"))
            value = conditional_mutual_information(joint, ["a"], ["b"], ["c"])
            assert value == pytest.approx(max(0.0, oracle), abs=1e-12)

    def test_overlapping_axes_are_a_usage_error(self):
        joint = joint_from_kernels(Pmf.uniform(2), binary_symmetric(0.1))
        with pytest.raises(SecrecyError) as info:
            mutual_information(joint, ["x"], ["x"])
        assert info.value.error.kind is ErrorKind.USAGE_ERROR

    def test_unknown_axis(self):
        joint = joint_from_kernels(Pmf.uniform(2), binary_symmetric(0.1))
        with pytest.raises(SecrecyError):
            joint.marginal(["w"])

    def test_marginal_order(self):
        probs = np.arange(1, 7, dtype=float).reshape(2, 3) / 21.0
        joint = JointDistribution(probs, ("a", "b"))
        assert np.allclose(joint.marginal(["b", "a"]), probs.T)


class TestBceChannel:
    """Tests for the broadcast channel with an eavesdropper."""

    def test_joint_must_match_marginals(self, bsc_cascade):
        joint = np.einsum(
            "xa,xb,xc->xabc",
            bsc_cascade.y1.kernel,
            bsc_cascade.y2.kernel,
            binary_symmetric(0.3).kernel,
        )
        with pytest.raises(SecrecyError) as info:
            BceChannel(bsc_cascade.y1, bsc_cascade.y2, bsc_cascade.z, joint)
        assert "z" in info.value.error.message

    def test_from_joint_recovers_marginals(self, bsc_cascade_physical):
        rebuilt = BceChannel.from_joint(bsc_cascade_physical.joint)
        assert np.allclose(rebuilt.z.kernel, bsc_cascade_physical.z.kernel, atol=1e-15)

    def test_input_sizes_must_agree(self, ternary_channel):
        with pytest.raises(SecrecyError) as info:
            BceChannel(binary_symmetric(0.1), binary_symmetric(0.1), ternary_channel)
        assert info.value.error.kind is ErrorKind.DIMENSION_MISMATCH

    def test_conditionally_independent_joint(self, bsc_cascade):
        bce = BceChannel.conditionally_independent(bsc_cascade.y1, bsc_cascade.y2, bsc_cascade.z)
        assert bce.joint.shape == (2, 2, 2, 2)


class TestDegradedness:
    """Tests for the stochastic-degradedness feasibility check."""

    def test_recovers_bsc_kernel(self):
        verdict = check_stochastically_degraded(binary_symmetric(0.1), binary_symmetric(0.2))
        assert verdict.feasible
        assert np.max(np.abs(verdict.kernel - binary_symmetric(0.125).kernel)) <= 1e-9
        assert verdict.max_entry_error <= 1e-9

    def test_reverse_is_infeasible(self):
        verdict = check_stochastically_degraded(binary_symmetric(0.2), binary_symmetric(0.1))
        assert not verdict.feasible
        assert verdict.residual > 1e-9

    def test_anything_degrades_to_pure_noise(self, ternary_channel):
        verdict = check_stochastically_degraded(ternary_channel, uniform_noise_channel(3, 2))
        assert verdict.feasible

    def test_bce_cascade(self, bsc_cascade):
        result = check_bce_degraded(bsc_cascade)
        assert result.degraded
        assert not result.legitimate_only

    def test_legitimate_only(self):
        bce = BceChannel(binary_symmetric(0.1), binary_symmetric(0.2), identity_channel(2))
        result = check_bce_degraded(bce)
        assert result.legitimate.feasible
        assert not result.eavesdropper.feasible
        assert result.legitimate_only
        assert not result.degraded

    def test_recovers_planted_cascade(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            strong = DiscreteChannel(0.6 * np.eye(3) + 0.4 * rng.dirichlet(np.ones(3), size=3))
            planted = DiscreteChannel(rng.dirichlet(np.ones(2), size=3))
            verdict = check_stochastically_degraded(strong, compose(strong, planted))
            assert verdict.feasible
            assert verdict.max_entry_error <= 1e-9
            assert np.max(np.abs(verdict.kernel - planted.kernel)) <= 1e-9

    def test_kernel_is_stochastic(self):
        verdict = check_stochastically_degraded(binary_symmetric(0.1), binary_symmetric(0.3))
        assert np.allclose(verdict.kernel.sum(axis=1), 1.0, atol=1e-9)
        assert math.isclose(verdict.kernel[0, 1], 0.25, abs_tol=1e-9)
