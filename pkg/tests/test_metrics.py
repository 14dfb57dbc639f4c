import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modgate.metrics import (
    ScoredSet,
    auc,
    average_ranks,
    evaluate,
    f_beta,
    macro_f_beta,
    precisions,
    spearman,
)

from _oracles import auc_bruteforce, macro_f_naive, spearman_naive


def scored(p, gold, ts=None):
    return ScoredSet.build(p, gold, ts)


class TestAuc:
    def test_worked_example(self):
        assert auc(scored([0.9, 0.8, 0.7, 0.1], [1, 0, 1, 0])) == 0.75

    def test_perfect_separation(self):
        assert auc(scored([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])) == 1.0

    def test_all_ties(self):
        assert auc(scored([0.4, 0.4, 0.4], [1, 0, 1])) == 0.5

    def test_single_class_errors(self):
        with pytest.raises(ValueError, match="AUC undefined"):
            auc(scored([0.2, 0.8], [1, 1]))

    def test_probabilistic_gold_binarized_ties_accept(self):
        # gold 0.5 is an accept: pairs are (0.9 vs 0.5-label comment)
        assert auc(scored([0.9, 0.2], [0.6, 0.5])) == 1.0

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(0)
        for _ in range(80):
            n = int(rng.integers(2, 50))
            p = rng.choice([0.0, 0.25, 0.5, 0.75, 1.0], size=n) if rng.random() < 0.5 else rng.random(n)
            gold = rng.integers(0, 2, size=n).astype(float)
            if gold.min() == gold.max():
                gold[0] = 1.0 - gold[0]
            s = scored(p, gold)
            assert auc(s) == pytest.approx(auc_bruteforce(p, gold), abs=1e-12)

    def test_invariant_under_increasing_transform(self):
        rng = np.random.default_rng(1)
        p = rng.random(40)
        gold = rng.integers(0, 2, size=40).astype(float)
        gold[0], gold[1] = 0.0, 1.0
        a1 = auc(scored(p, gold))
        a2 = auc(scored(p**3, gold))  # strictly increasing on [0, 1]
        assert a1 == pytest.approx(a2, abs=1e-12)

    def test_complement_scores_sum_to_one_when_tie_free(self):
        rng = np.random.default_rng(2)
        p = rng.permutation(np.linspace(0.01, 0.99, 30))
        gold = rng.integers(0, 2, size=30).astype(float)
        gold[0], gold[1] = 0.0, 1.0
        assert auc(scored(p, gold)) + auc(scored(1.0 - p, gold)) == pytest.approx(1.0, abs=1e-12)


class TestSpearman:
    def test_identical_orderings(self):
        assert spearman(scored([0.1, 0.2, 0.9], [0.0, 0.5, 1.0])) == pytest.approx(1.0)

    def test_reversed_orderings(self):
        assert spearman(scored([0.9, 0.5, 0.1], [0.0, 0.5, 1.0])) == pytest.approx(-1.0)

    def test_tied_pairs_example(self):
        s = scored([0.1, 0.4, 0.4, 0.9], [0.0, 0.5, 0.5, 1.0])
        assert spearman(s) == pytest.approx(1.0, abs=1e-12)

    def test_zero_variance_errors(self):
        with pytest.raises(ValueError, match="undefined"):
            spearman(scored([0.5, 0.5], [0.1, 0.9]))

    def test_too_small_errors(self):
        with pytest.raises(ValueError):
            spearman(scored([0.5], [0.5]))

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(80):
            n = int(rng.integers(2, 50))
            p = rng.choice(np.linspace(0, 1, 7), size=n) if rng.random() < 0.5 else rng.random(n)
            gold = rng.choice(np.linspace(0, 1, 5), size=n)
            if len(set(p.tolist())) < 2 or len(set(gold.tolist())) < 2:
                continue
            assert spearman(scored(p, gold)) == pytest.approx(spearman_naive(p, gold), abs=1e-12)

    def test_invariant_under_increasing_transforms(self):
        rng = np.random.default_rng(4)
        p = rng.random(30)
        gold = rng.random(30)
        base = spearman(scored(p, gold))
        assert spearman(scored(p**2, gold)) == pytest.approx(base, abs=1e-12)
        assert spearman(scored(p, gold**3)) == pytest.approx(base, abs=1e-12)


class TestAverageRanks:
    def test_simple(self):
        np.testing.assert_array_equal(average_ranks(np.array([0.3, 0.1, 0.2])), [3, 1, 2])

    def test_ties_get_midrank(self):
        np.testing.assert_array_equal(average_ranks(np.array([0.5, 0.5, 0.1])), [2.5, 2.5, 1])


class TestPrecisions:
    def test_all_correct(self):
        pr = precisions(scored([0.9, 0.1], [1, 0]), t_a=0.5, t_r=0.5)
        assert (pr.p_accept, pr.p_reject) == (1.0, 1.0)

    def test_half_right_rejections(self):
        pr = precisions(scored([0.9, 0.8, 0.1], [1, 0, 0]), t_a=0.5, t_r=0.5)
        assert pr.p_reject == 0.5
        assert pr.n_rejected == 2

    def test_vacuous_precision_is_one(self):
        pr = precisions(scored([0.1, 0.2], [0, 0]), t_a=0.5, t_r=0.5)
        assert pr.p_reject == 1.0
        assert pr.n_rejected == 0

    def test_boundaries_are_gray(self):
        pr = precisions(scored([0.3, 0.5, 0.7], [0, 0, 1]), t_a=0.3, t_r=0.7)
        assert pr.n_gray == 3  # closed interval [t_a, t_r]

    def test_invalid_thresholds(self):
        with pytest.raises(ValueError):
            precisions(scored([0.5], [1]), t_a=0.8, t_r=0.2)


class TestFBeta:
    def test_hand_case(self):
        assert f_beta(0.5, 1.0, beta=2.0) == pytest.approx(5 * 0.5 / 3.0)
        assert f_beta(0.5, 1.0, beta=2.0) == pytest.approx(0.83333, abs=1e-5)

    def test_equal_inputs_fixed_point(self):
        for v in (0.0, 0.3, 1.0):
            for beta in (0.5, 1.0, 2.0):
                assert f_beta(v, v, beta) == pytest.approx(v, abs=1e-12)

    def test_zero(self):
        assert f_beta(0.0, 0.0, 2.0) == 0.0
        assert f_beta(0.0, 1.0, 2.0) == 0.0

    def test_beta_validated(self):
        with pytest.raises(ValueError):
            f_beta(0.5, 0.5, 0.0)


class TestMacroFBeta:
    def test_single_batch_reduces_to_global(self):
        s = scored([0.9, 0.1, 0.8, 0.3], [1, 0, 0, 1])
        pr = precisions(s, 0.5, 0.5)
        assert macro_f_beta(s, 0.5, 0.5, 2.0, batch_size=100) == pytest.approx(
            f_beta(pr.p_reject, pr.p_accept, 2.0)
        )

    def test_two_batch_mean(self):
        # first batch perfect (F=1), second has a wrong rejection
        s = scored(
            [0.9, 0.1, 0.9, 0.9], [1, 0, 1, 0], ts=[1, 2, 3, 4]
        )
        got = macro_f_beta(s, 0.5, 0.5, 2.0, batch_size=2)
        assert got == pytest.approx((1.0 + f_beta(0.5, 1.0, 2.0)) / 2.0)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        p = rng.random(37)
        gold = rng.integers(0, 2, size=37).astype(float)
        ts = rng.permutation(37)
        base = macro_f_beta(ScoredSet.build(p, gold, ts), 0.3, 0.7, 2.0, batch_size=10)
        perm = rng.permutation(37)
        shuffled = macro_f_beta(
            ScoredSet.build(p[perm], gold[perm], ts[perm], ids=perm), 0.3, 0.7, 2.0, batch_size=10
        )
        assert shuffled == pytest.approx(base, abs=1e-12)

    def test_batch_size_at_least_n_equals_global(self):
        rng = np.random.default_rng(6)
        p = rng.random(23)
        gold = rng.integers(0, 2, size=23).astype(float)
        s = scored(p, gold)
        pr = precisions(s, 0.4, 0.6)
        assert macro_f_beta(s, 0.4, 0.6, 2.0, batch_size=23) == pytest.approx(
            f_beta(pr.p_reject, pr.p_accept, 2.0), abs=1e-12
        )

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            n = int(rng.integers(1, 60))
            p = rng.random(n)
            gold = rng.integers(0, 2, size=n).astype(float)
            ts = rng.integers(0, 5, size=n)  # duplicate timestamps exercise id tie-break
            s = ScoredSet.build(p, gold, ts)
            got = macro_f_beta(s, 0.3, 0.7, 2.0, batch_size=7)
            want = macro_f_naive(p.tolist(), gold.tolist(), list(zip(ts.tolist(), range(n))),
                                 0.3, 0.7, 2.0, 7)
            assert got == pytest.approx(want, abs=1e-12)

    def test_empty_errors(self):
        with pytest.raises(ValueError):
            macro_f_beta(scored([], []), 0.5, 0.5)


class TestEvaluate:
    def test_report_fields(self):
        s = scored([0.9, 0.8, 0.7, 0.1], [1, 0, 1, 0])
        rep = evaluate(s, t_a=0.5, t_r=0.5)
        assert rep.auc == 0.75
        assert rep.n == 4
        d = rep.to_dict()
        assert set(d) >= {"auc", "spearman", "p_accept", "p_reject", "macro_f_beta"}

    def test_spearman_none_when_undefined(self):
        rep = evaluate(scored([0.9, 0.8], [1.0, 0.0]))
        assert rep.spearman is not None
        rep2 = evaluate(scored([0.5, 0.5, 0.9], [1.0, 0.0, 1.0]))
        # p has variance but needs both classes for auc; spearman fine here
        assert rep2.auc >= 0.0


class TestScoredSet:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            ScoredSet.build([0.5], [0.5, 0.5])

    def test_range_validation(self):
        with pytest.raises(ValueError):
            ScoredSet.build([1.5], [0.5])
        with pytest.raises(ValueError):
            ScoredSet.build([0.5], [-0.1])

    @given(
        st.lists(
            st.tuples(
                st.floats(min_value=0, max_value=1, allow_nan=False),
                st.floats(min_value=0, max_value=1, allow_nan=False),
            ),
            min_size=2,
            max_size=40,
        )
    )
    @settings(max_examples=100)
    def test_auc_spearman_match_oracles_property(self, rows):
        p = [r[0] for r in rows]
        gold = [r[1] for r in rows]
        s = scored(p, gold)
        pos = sum(1 for g in gold if g > 0.5)
        if 0 < pos < len(gold):
            assert auc(s) == pytest.approx(auc_bruteforce(p, gold), abs=1e-12)
        if len(set(p)) > 1 and len(set(gold)) > 1:
            assert spearman(s) == pytest.approx(spearman_naive(p, gold), abs=1e-12)
