import math

import numpy as np
import pytest

from dpaudit.discrete import (DiscreteDistribution, coarsen, hs_divergence,
                              symmetric_delta, tv_distance)


def dist(*masses):
    return DiscreteDistribution(np.asarray(masses, dtype=float))


class TestDiscreteDistribution:
    def test_rejects_negative_mass(self):
        with pytest.raises(ValueError, match="non-negative"):
            dist(0.5, -0.1, 0.6)

    def test_rejects_bad_total(self):
        with pytest.raises(ValueError, match="sum"):
            dist(0.5, 0.4)

    def test_accepts_tolerated_rounding(self):
        d = dist(0.3, 0.7 + 5e-10)
        assert len(d) == 2

    def test_normalized_constructor(self):
        d = DiscreteDistribution.normalized([2.0, 6.0])
        assert d.probs == pytest.approx([0.25, 0.75])

    def test_immutable(self):
        d = dist(0.5, 0.5)
        with pytest.raises(ValueError):
            d.probs[0] = 0.9

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            DiscreteDistribution(np.asarray([]))


class TestHsDivergence:
    def test_identical_distributions(self):
        p = dist(0.3, 0.7)
        assert hs_divergence(p, p, 1.0) == 0.0

    def test_disjoint_supports(self):
        assert hs_divergence(dist(1.0, 0.0), dist(0.0, 1.0), 1.0) == pytest.approx(1.0)

    def test_direct_summation(self):
        assert hs_divergence(dist(0.6, 0.4), dist(0.2, 0.8), 1.0) == pytest.approx(0.4)

    def test_alpha_zero_gives_total_mass(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            p = DiscreteDistribution.normalized(rng.random(7))
            q = DiscreteDistribution.normalized(rng.random(7))
            assert hs_divergence(p, q, 0.0) == pytest.approx(1.0)

    def test_infinite_alpha_counts_zero_denominator_mass(self):
        p = dist(0.5, 0.3, 0.2)
        q = dist(0.0, 0.5, 0.5)
        assert hs_divergence(p, q, math.inf) == pytest.approx(0.5)

    def test_non_increasing_in_alpha(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            p = DiscreteDistribution.normalized(rng.random(9))
            q = DiscreteDistribution.normalized(rng.random(9))
            alphas = np.sort(rng.uniform(0, 5, 6))
            values = [hs_divergence(p, q, a) for a in alphas]
            assert all(x >= y - 1e-12 for x, y in zip(values, values[1:]))

    def test_range(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            p = DiscreteDistribution.normalized(rng.random(5))
            q = DiscreteDistribution.normalized(rng.random(5))
            v = hs_divergence(p, q, rng.uniform(0, 10))
            assert 0.0 <= v <= 1.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            hs_divergence(dist(1.0), dist(0.5, 0.5), 1.0)

    def test_negative_alpha(self):
        with pytest.raises(ValueError, match="alpha"):
            hs_divergence(dist(1.0), dist(1.0), -0.5)

    def test_large_vector_accuracy(self):
        # pairwise summation keeps the error far below 1e-12 at k = 1e6
        k = 10 ** 6
        p = DiscreteDistribution(np.full(k, 1.0 / k))
        q = DiscreteDistribution(np.full(k, 1.0 / k))
        assert hs_divergence(p, q, 0.0) == pytest.approx(1.0, abs=1e-12)


class TestTvDistance:
    def test_identical(self):
        p = dist(0.25, 0.75)
        assert tv_distance(p, p) == 0.0

    def test_direct_values(self):
        assert tv_distance(dist(0.6, 0.4), dist(0.2, 0.8)) == pytest.approx(0.4)
        assert tv_distance(dist(1.0, 0.0), dist(0.5, 0.5)) == pytest.approx(0.5)

    def test_symmetry_and_triangle_inequality(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            p = DiscreteDistribution.normalized(rng.random(6))
            q = DiscreteDistribution.normalized(rng.random(6))
            r = DiscreteDistribution.normalized(rng.random(6))
            assert tv_distance(p, q) == pytest.approx(tv_distance(q, p), abs=1e-12)
            assert tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-12


class TestSymmetricDelta:
    def test_identical_at_zero(self):
        p = dist(0.3, 0.7)
        assert symmetric_delta(p, p, 0.0) == 0.0

    def test_equals_tv_at_eps_zero(self):
        assert symmetric_delta(dist(0.6, 0.4), dist(0.2, 0.8), 0.0) == pytest.approx(0.4)

    def test_two_direction_evaluation(self):
        # both directions evaluate to 0.9 - 2*0.1 = 0.7 at alpha = 2
        v = symmetric_delta(dist(0.9, 0.1), dist(0.1, 0.9), math.log(2.0))
        assert v == pytest.approx(0.7)

    def test_non_increasing_in_eps(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            p = DiscreteDistribution.normalized(rng.random(8))
            q = DiscreteDistribution.normalized(rng.random(8))
            eps = np.sort(rng.uniform(-3, 3, 5))
            values = [symmetric_delta(p, q, e) for e in eps]
            assert all(x >= y - 1e-12 for x, y in zip(values, values[1:]))

    def test_huge_eps_saturates(self):
        p = dist(0.5, 0.5)
        q = dist(1.0, 0.0)
        assert symmetric_delta(p, q, 800.0) == pytest.approx(0.5)


class TestCoarsen:
    def test_additivity(self):
        merged = coarsen(dist(0.2, 0.3, 0.5), [0, 0, 1])
        assert merged.probs == pytest.approx([0.5, 0.5])

    def test_identity_map(self):
        p = dist(0.2, 0.3, 0.5)
        assert coarsen(p, [0, 1, 2]).probs == pytest.approx(p.probs)

    def test_collapse_to_single_group(self):
        merged = coarsen(dist(0.25, 0.25, 0.25, 0.25), [0, 0, 0, 0])
        assert merged.probs == pytest.approx([1.0])

    def test_rejects_non_surjective(self):
        with pytest.raises(ValueError, match="surjective"):
            coarsen(dist(0.3, 0.3, 0.4), [0, 0, 2])

    def test_rejects_more_groups_than_bins(self):
        with pytest.raises(ValueError, match="more groups"):
            coarsen(dist(0.5, 0.5), [0, 2])

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            coarsen(dist(0.5, 0.5), [0])

    def test_data_processing_never_increases_divergence(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            k = rng.integers(2, 10)
            p = DiscreteDistribution.normalized(rng.random(k))
            q = DiscreteDistribution.normalized(rng.random(k))
            m = int(rng.integers(1, k + 1))
            groups = np.concatenate([np.arange(m), rng.integers(0, m, k - m)])
            rng.shuffle(groups)
            alpha = rng.uniform(0, 4)
            coarse = hs_divergence(coarsen(p, groups), coarsen(q, groups), alpha)
            fine = hs_divergence(p, q, alpha)
            assert coarse <= fine + 1e-12
