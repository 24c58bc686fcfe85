"""Code families, prefix-sum scoring, and family selection."""

from itertools import combinations

import numpy as np
import pytest

from dsuwb import (ConfigurationError, UsageError, hadamard_family,
                   orthogonal_pn_family, partial_correlation_score,
                   random_code_plan, select_family)


def brute_score(a, b):
    """Independent prefix-enumeration oracle for the pair score."""
    best = 0
    run = 0
    for x, y in zip(a, b):
        run += int(x) * int(y)
        best = max(best, abs(run))
    return best


class TestHadamard:
    def test_base_case(self):
        h = hadamard_family(2)
        np.testing.assert_array_equal(h, [[1, 1], [1, -1]])

    def test_order16_pairwise_orthogonal(self):
        h = hadamard_family(16)
        gram = h @ h.T
        np.testing.assert_array_equal(gram, 16 * np.eye(16, dtype=np.int64))

    def test_non_power_of_two_rejected(self):
        with pytest.raises(UsageError):
            hadamard_family(12)


class TestOrthogonalPn:
    def test_even_length_exactly_orthogonal(self):
        fam, residual = orthogonal_pn_family(16, 4, rng_seed=7)
        assert residual == 0
        for i, j in combinations(range(4), 2):
            assert int(np.dot(fam[i], fam[j])) == 0

    def test_single_code_trivial(self):
        fam, residual = orthogonal_pn_family(15, 1, rng_seed=0)
        assert residual == 0
        assert set(np.unique(fam)) <= {-1, 1}

    def test_odd_length_residual_one(self):
        fam, residual = orthogonal_pn_family(15, 2, rng_seed=3)
        assert residual == 1
        assert abs(int(np.dot(fam[0], fam[1]))) == 1

    def test_deterministic(self):
        a, _ = orthogonal_pn_family(32, 6, rng_seed=42)
        b, _ = orthogonal_pn_family(32, 6, rng_seed=42)
        np.testing.assert_array_equal(a, b)


class TestPartialCorrelationScore:
    def test_self_score_is_length(self):
        c = np.array([1, -1, -1, 1])
        assert partial_correlation_score(c, c) == 4

    def test_alternating_pair(self):
        a = np.array([1, 1, 1, 1])
        b = np.array([1, -1, 1, -1])
        # prefix sums 1,0,1,0
        assert partial_correlation_score(a, b) == 1

    def test_recomputed_example(self):
        # products 1,-1,1,-1 -> prefixes 1,0,1,0 -> max |.| = 1
        a = np.array([1, 1, -1, -1])
        b = np.array([1, -1, -1, 1])
        assert brute_score(a, b) == 1
        assert partial_correlation_score(a, b) == 1

    def test_matches_oracle_on_random_pairs(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            a = rng.choice([-1, 1], size=16)
            b = rng.choice([-1, 1], size=16)
            assert partial_correlation_score(a, b) == brute_score(a, b)

    def test_symmetry(self):
        rng = np.random.default_rng(6)
        a = rng.choice([-1, 1], size=16)
        b = rng.choice([-1, 1], size=16)
        assert partial_correlation_score(a, b) == partial_correlation_score(b, a)

    def test_length_mismatch_rejected(self):
        with pytest.raises(UsageError):
            partial_correlation_score(np.ones(4), np.ones(5))


class TestSelectFamily:
    def test_forced_choice(self):
        fam, _ = orthogonal_pn_family(16, 4, rng_seed=1)
        plan = select_family(fam, 5)
        np.testing.assert_array_equal(plan.family, fam)
        assert len(plan.layout) == 5

    def test_hadamard16_minimizes_worst_pair(self):
        h = hadamard_family(16)
        plan = select_family(h, 5)
        # independent exhaustive oracle over all C(16,4) subsets
        best = min(max(brute_score(h[i], h[j]) for i, j in combinations(sub, 2))
                   for sub in combinations(range(16), 4))
        assert plan.max_pair_score == best == 2
        worst = max(brute_score(a, b) for a, b in combinations(plan.family, 2))
        assert worst == plan.max_pair_score

    def test_no_other_subset_beats_selection(self):
        h = hadamard_family(16)
        plan = select_family(h, 5)
        for sub in combinations(range(16), 4):
            worst = max(brute_score(h[i], h[j]) for i, j in combinations(sub, 2))
            assert worst >= plan.max_pair_score

    def test_duplicated_code_appears_twice(self):
        plan = select_family(hadamard_family(16), 5)
        counts = np.bincount(plan.layout)
        assert counts[0] == 2
        assert np.all(counts[1:] == 1)
        assert plan.layout[0] == plan.layout[1] == 0

    def test_multiuser_dup_gap(self):
        plan = select_family(hadamard_family(32), 7, dup_gap=3)
        assert plan.layout[0] == plan.layout[3] == 0
        assert len(set(plan.layout.tolist())) == 6

    def test_too_few_candidates_rejected(self):
        with pytest.raises(ConfigurationError):
            select_family(hadamard_family(4), 6)


class TestPrefixSuffixIdentity:
    def test_orthogonal_prefix_equals_negated_suffix(self):
        # for every orthogonal pair the prefix sum mirrors the suffix sum at all cuts
        plan = select_family(hadamard_family(16), 5)
        fam = plan.family
        for a, b in combinations(fam, 2):
            prod = a * b
            assert int(np.sum(prod)) == 0
            for j0 in range(16):
                assert int(np.sum(prod[:j0 + 1])) == -int(np.sum(prod[j0 + 1:]))


def test_random_plan_keeps_layout_structure():
    plan = random_code_plan(16, 5, rng_seed=11)
    assert plan.family.shape == (4, 16)
    assert plan.layout[0] == plan.layout[1] == 0
    assert plan.orthogonality_residual == 16
