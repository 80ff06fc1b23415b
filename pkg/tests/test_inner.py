"""Tests for the general inner bound."""

import numpy as np
import pytest

from secrecy_regions.channel import BceChannel, DiscreteChannel, Pmf, uniform_noise_channel
from secrecy_regions.degraded import (
    AuxiliaryDecomposition,
    SearchConfig,
    evaluate_degraded_pair,
    search_degraded_region,
)
from secrecy_regions.inner import (
    InnerBoundDecomposition,
    InnerBounds,
    RateTriple,
    bounds_contain,
    corner_points,
    csiszar_korner_rate,
    evaluate_inner_bound,
    marton_bounds,
    membership,
    sample_decompositions,
    sample_inner_region,
)
from secrecy_regions.region import RatePoint, region_from_cloud
from secrecy_regions.types import ErrorKind, SecrecyError


def _entropy(p):
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _marton_reference(bce, dec):
    """Marton's bounds from joint entropies of P(u, v1, v2, y)."""
    joint = dec.joint

    def h(tensor, keep):
        others = tuple(i for i in range(tensor.ndim) if i not in keep)
        return _entropy(tensor.sum(axis=others))

    t1 = np.einsum("uabx,xy->uaby", joint, bce.y1.kernel)
    t2 = np.einsum("uabx,xy->uaby", joint, bce.y2.kernel)
    # I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C), axes u=0 v1=1 v2=2 y=3
    v1_y1 = h(t1, (0, 1)) + h(t1, (0, 3)) - h(t1, (0, 1, 3)) - h(t1, (0,))
    v2_y2 = h(t2, (0, 2)) + h(t2, (0, 3)) - h(t2, (0, 2, 3)) - h(t2, (0,))
    v1_v2 = h(t1, (0, 1)) + h(t1, (0, 2)) - h(t1, (0, 1, 2)) - h(t1, (0,))
    u_y1 = h(t1, (0,)) + h(t1, (3,)) - h(t1, (0, 3))
    u_y2 = h(t2, (0,)) + h(t2, (3,)) - h(t2, (0, 3))
    m = min(u_y1, u_y2)
    return (m, v1_y1 + m, v2_y2 + m, v1_y1 + v2_y2 - v1_v2 + m)


class TestDecomposition:
    """Tests for InnerBoundDecomposition."""

    def test_joint_sums_to_one(self):
        dec = InnerBoundDecomposition.random(np.random.default_rng(0), (2, 3, 2), 2)
        assert dec.joint.sum() == pytest.approx(1.0)
        assert dec.sizes == (2, 3, 2, 2)

    def test_superposition_copies_u(self):
        dec = InnerBoundDecomposition.random(np.random.default_rng(0), (3, 2, 2), 2, True)
        joint = dec.joint.sum(axis=3)
        assert dec.sizes[2] == 3
        off_diagonal = joint.sum(axis=1) * (1 - np.eye(3))
        assert np.all(off_diagonal == 0)

    def test_rejects_mismatched_shapes(self):
        with pytest.raises(SecrecyError):
            InnerBoundDecomposition(
                Pmf.uniform(2), np.full((2, 2, 2), 0.25), np.full((3, 2, 2), 0.5)
            )

    def test_rejects_non_stochastic(self):
        with pytest.raises(SecrecyError):
            InnerBoundDecomposition(
                Pmf.uniform(1), np.full((1, 2, 2), 0.3), np.full((2, 2, 2), 0.5)
            )


class TestRateTriple:
    """Tests for RateTriple."""

    def test_rejects_negative(self):
        with pytest.raises(SecrecyError):
            RateTriple(0.0, -1.0, 0.0)

    def test_rejects_nan(self):
        with pytest.raises(SecrecyError):
            RateTriple(float("nan"), 0.0, 0.0)


class TestEvaluation:
    """Tests for evaluate_inner_bound and its reductions."""

    def test_marton_reduction_with_constant_eavesdropper(self, bsc_cascade):
        bce = BceChannel(bsc_cascade.y1, bsc_cascade.y2, uniform_noise_channel(2, 1))
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(100):
            dec = InnerBoundDecomposition.random(rng, (2, 2, 2), 2)
            ours = evaluate_inner_bound(bce, dec).raw
            reference = _marton_reference(bce, dec)
            worst = max(worst, *(abs(a - b) for a, b in zip(ours, reference)))
            assert marton_bounds(bce, dec).raw == pytest.approx(ours, abs=1e-12)
        assert worst <= 1e-12

    def test_degraded_embedding(self, bsc_cascade, h2):
        dec = InnerBoundDecomposition.from_auxiliary(
            AuxiliaryDecomposition.constant(Pmf.uniform(2))
        )
        bounds = evaluate_inner_bound(bsc_cascade, dec)
        expected = h2(0.212) - h2(0.1)
        assert bounds.b0 == pytest.approx(0.0, abs=1e-12)
        assert bounds.b1 == pytest.approx(expected, abs=1e-12)
        assert bounds.b2 == pytest.approx(0.0, abs=1e-12)
        assert bounds.b12 == pytest.approx(expected, abs=1e-12)
        assert csiszar_korner_rate(bsc_cascade, dec) == pytest.approx(expected, abs=1e-12)

    def test_eavesdropper_only_lowers_bounds(self, bsc_cascade):
        rng = np.random.default_rng(5)
        for _ in range(20):
            dec = InnerBoundDecomposition.random(rng, (2, 2, 2), 2)
            secret = evaluate_inner_bound(bsc_cascade, dec).as_tuple()
            open_ = marton_bounds(bsc_cascade, dec).as_tuple()
            assert all(s <= o + 1e-12 for s, o in zip(secret, open_))

    def test_marginals_only(self, bsc_cascade, bsc_cascade_physical):
        dec = InnerBoundDecomposition.random(np.random.default_rng(4), (2, 2, 2), 2)
        assert (
            evaluate_inner_bound(bsc_cascade, dec).as_tuple()
            == evaluate_inner_bound(bsc_cascade_physical, dec).as_tuple()
        )

    def test_dimension_mismatch(self, bsc_cascade):
        dec = InnerBoundDecomposition.random(np.random.default_rng(0), (2, 2, 2), 3)
        with pytest.raises(SecrecyError) as info:
            evaluate_inner_bound(bsc_cascade, dec)
        assert info.value.error.kind is ErrorKind.DIMENSION_MISMATCH

    def test_membership_of_origin(self, bsc_cascade):
        dec = InnerBoundDecomposition.random(np.random.default_rng(0), (2, 2, 2), 2)
        assert membership(bsc_cascade, dec, RateTriple(0.0, 0.0, 0.0))

    def test_v1_relabeling_leaves_bounds_unchanged(self, bsc_cascade):
        rng = np.random.default_rng(8)
        for _ in range(20):
            dec = InnerBoundDecomposition.random(rng, (2, 3, 2), 2)
            order = rng.permutation(3)
            relabeled = InnerBoundDecomposition(
                dec.p_u, dec.p_v1v2_given_u[:, order, :], dec.p_x_given_v1v2[order, :, :]
            )
            before = evaluate_inner_bound(bsc_cascade, dec)
            after = evaluate_inner_bound(bsc_cascade, relabeled)
            assert after.raw == pytest.approx(before.raw, abs=1e-12)
            triple = RateTriple(*(0.5 * v for v in before.as_tuple()[:3]))
            assert membership(bsc_cascade, dec, triple, 1e-9) == membership(
                bsc_cascade, relabeled, triple, 1e-9
            )

    def test_boundary_triple_of_degraded_embedding(self, bsc_cascade):
        aux = AuxiliaryDecomposition(
            Pmf(np.array([0.5, 0.5])), DiscreteChannel(np.array([[0.8, 0.2], [0.3, 0.7]]))
        )
        dec = InnerBoundDecomposition.from_auxiliary(aux)
        bounds = evaluate_inner_bound(bsc_cascade, dec)
        assert bounds.b0 > 0
        boundary = RateTriple(bounds.b0, bounds.b1 - bounds.b0, max(0.0, bounds.b12 - bounds.b1))
        assert membership(bsc_cascade, dec, boundary, tolerance=1e-12)
        inflated = RateTriple(boundary.r0, boundary.r1, boundary.r2 + 1e-9)
        assert not membership(bsc_cascade, dec, inflated, tolerance=1e-12)

    def test_boundary_triples_of_random_decompositions(self, bsc_cascade):
        rng = np.random.default_rng(9)
        checked = 0
        for _ in range(500):
            dec = InnerBoundDecomposition.random(rng, (2, 2, 2), 2)
            b0, b1, b2, b12 = evaluate_inner_bound(bsc_cascade, dec).raw
            if not (0 < b0 <= b1 <= b12 and b0 + b12 - b1 <= b2):
                continue
            boundary = RateTriple(b0, b1 - b0, b12 - b1)
            assert membership(bsc_cascade, dec, boundary, tolerance=1e-12)
            inflated = RateTriple(b0, b1 - b0, b12 - b1 + 1e-9)
            assert not membership(bsc_cascade, dec, inflated, tolerance=1e-12)
            checked += 1
        assert checked > 0


class TestCornerPoints:
    """Tests for corner_points."""

    def test_corners(self):
        bounds = InnerBounds.clipped(0.5, 1.0, 1.0, 1.5)
        corners = corner_points(bounds)
        assert corners == [
            RateTriple(0.0, 1.0, 0.5),
            RateTriple(0.0, 0.5, 1.0),
            RateTriple(0.5, 0.5, 0.5),
        ]
        assert all(bounds_contain(bounds, c, 1e-15) for c in corners)

    def test_clipped_keeps_raw(self):
        bounds = InnerBounds.clipped(-0.1, 0.2, 0.3, 0.4)
        assert bounds.b0 == 0.0
        assert bounds.raw[0] == -0.1

    def test_zero_bounds(self):
        assert corner_points(InnerBounds.clipped(0.0, 0.0, 0.0, 0.0)) == [
            RateTriple(0.0, 0.0, 0.0)
        ]


class TestSampling:
    """Tests for seeded sampling of the inner region."""

    def test_caps_too_small(self, bsc_cascade):
        with pytest.raises(SecrecyError) as info:
            list(sample_decompositions(bsc_cascade, (1, 2, 2), 1))
        assert info.value.error.kind is ErrorKind.VALIDATION_ERROR

    def test_budget(self, bsc_cascade):
        with pytest.raises(SecrecyError) as info:
            list(sample_decompositions(bsc_cascade, (4, 4, 8), 1))
        assert info.value.error.kind is ErrorKind.BUDGET_EXCEEDED

    def test_deterministic(self, bsc_cascade):
        a = sample_inner_region(bsc_cascade, samples=50, seed=3)
        b = sample_inner_region(bsc_cascade, samples=50, seed=3)
        assert a == b

    def test_triples_are_distinct(self, bsc_cascade):
        triples = sample_inner_region(bsc_cascade, samples=50, seed=3)
        assert len(set(triples)) == len(triples)

    def test_marginals_only(self, bsc_cascade, bsc_cascade_physical):
        assert sample_inner_region(bsc_cascade, samples=30, seed=1) == sample_inner_region(
            bsc_cascade_physical, samples=30, seed=1
        )

    def test_superposition_within_general(self, bsc_cascade):
        """V2 = U decompositions are a subset of the general sampler's family."""
        for dec in sample_decompositions(bsc_cascade, (2, 2, 2), 10, 0, superposition=True):
            assert dec.sizes[2] == dec.sizes[0]

    def test_no_samples(self, bsc_cascade):
        assert sample_inner_region(bsc_cascade, samples=0) == ()

    def test_superposition_under_degraded_region(self, bsc_cascade):
        """With V2 = U every (0, R1, R2) corner lies in the degraded region of its (U, X)."""
        for dec in sample_decompositions(bsc_cascade, (2, 2, 2), 200, 4, superposition=True):
            aux = AuxiliaryDecomposition.from_joint(dec.joint.sum(axis=(1, 2)))
            p_x = Pmf(aux.joint.sum(axis=0))
            pairs = [
                evaluate_degraded_pair(bsc_cascade, aux),
                evaluate_degraded_pair(bsc_cascade, AuxiliaryDecomposition.constant(p_x)),
            ]
            cloud = np.array([[p.r1, p.r2] for p in pairs])
            region = region_from_cloud(cloud, pairs)
            for triple in corner_points(evaluate_inner_bound(bsc_cascade, dec)):
                if triple.r0 == 0.0:
                    assert region.contains(RatePoint(triple.r1, triple.r2), tolerance=1e-12)

    def test_superposition_under_searched_frontier(self, bsc_cascade):
        frontier = search_degraded_region(bsc_cascade, SearchConfig()).region
        triples = sample_inner_region(bsc_cascade, (2, 2, 2), 200, 4, superposition=True)
        for triple in triples:
            if triple.r0 == 0.0:
                assert frontier.contains(RatePoint(triple.r1, triple.r2), tolerance=1e-2)

    def test_single_user_reduces_to_csiszar_korner(self, bsc_cascade, h2):
        """U and V2 constant: the best sampled R1 is the best I(V1;Y1) - I(V1;Z)."""
        rng = np.random.default_rng(6)
        decs = [
            InnerBoundDecomposition(
                Pmf(np.ones(1)),
                rng.dirichlet(np.ones(3)).reshape(1, 3, 1),
                rng.dirichlet(np.ones(2), size=3).reshape(3, 1, 2),
            )
            for _ in range(200)
        ]
        best_r1 = max(
            max(c.r1 for c in corner_points(evaluate_inner_bound(bsc_cascade, d))) for d in decs
        )
        best_ck = max(csiszar_korner_rate(bsc_cascade, d) for d in decs)
        assert best_r1 == pytest.approx(best_ck, abs=1e-12)
        assert best_ck <= h2(0.212) - h2(0.1) + 1e-12

        deaf = BceChannel(bsc_cascade.y1, bsc_cascade.y2, uniform_noise_channel(2, 1))
        heard = max(
            max(c.r1 for c in corner_points(evaluate_inner_bound(deaf, d))) for d in decs
        )
        open_ = max(marton_bounds(deaf, d).b1 for d in decs)
        assert heard == pytest.approx(open_, abs=1e-12)
