"""Statistics primitives against hand values and an independent oracle."""

import math

import numpy as np
import pytest
import scipy.stats

from peercourse import stats
from peercourse.errors import TooFewSamples, ZeroVariance

# Frozen before the build from scipy.stats.ttest_ind([1,2,3,4,5], [3,4,5,6,7]).
ORACLE_T = -2.0
ORACLE_P = 0.08051623795726257
ORACLE_DF = 8


def test_mean_hand_value():
    assert stats.mean([2, 4, 6]) == 4.0


def test_std_hand_value():
    assert stats.std([2, 4, 6]) == 2.0


def test_mean_empty_raises():
    with pytest.raises(TooFewSamples):
        stats.mean([])


def test_std_single_raises():
    with pytest.raises(TooFewSamples):
        stats.std([7.0])


def test_t_test_frozen_oracle_pair():
    result = stats.pooled_t_test([1, 2, 3, 4, 5], [3, 4, 5, 6, 7])
    assert result.t == ORACLE_T
    assert result.df == ORACLE_DF
    assert result.p == pytest.approx(ORACLE_P, abs=1e-9)


def test_t_test_df_follows_sample_sizes():
    rng = np.random.default_rng(1)
    for n_a, n_b, df in [(29, 29, 56), (25, 25, 48), (3, 2, 3)]:
        result = stats.pooled_t_test(rng.normal(size=n_a), rng.normal(size=n_b))
        assert result.df == df


def test_t_test_identical_samples():
    result = stats.pooled_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert result.t == 0.0
    assert result.p == 1.0


def test_t_test_zero_variance_raises():
    with pytest.raises(ZeroVariance):
        stats.pooled_t_test([3.0, 3.0, 3.0], [3.0, 3.0, 3.0])


def test_t_test_too_few_raises():
    with pytest.raises(TooFewSamples):
        stats.pooled_t_test([1.0], [2.0, 3.0])


def test_t_test_symmetry():
    a = [1.0, 2.0, 5.0]
    b = [2.0, 4.0, 4.5, 6.0]
    ab = stats.pooled_t_test(a, b)
    ba = stats.pooled_t_test(b, a)
    assert ab.t == -ba.t
    assert ab.p == ba.p


def test_oracle_agreement_random_pairs():
    """mean/std/t/p match scipy to 1e-9 on random pairs (subset of acceptance)."""
    rng = np.random.default_rng(20260818)
    for _ in range(200):
        n_a = int(rng.integers(2, 40))
        n_b = int(rng.integers(2, 40))
        a = rng.normal(loc=rng.uniform(-3, 3), scale=rng.uniform(0.5, 4), size=n_a)
        b = rng.normal(loc=rng.uniform(-3, 3), scale=rng.uniform(0.5, 4), size=n_b)
        assert stats.mean(a.tolist()) == pytest.approx(float(np.mean(a)), abs=1e-9)
        assert stats.std(a.tolist()) == pytest.approx(float(np.std(a, ddof=1)), abs=1e-9)
        ref = scipy.stats.ttest_ind(a, b, equal_var=True)
        result = stats.pooled_t_test(a.tolist(), b.tolist())
        assert result.t == pytest.approx(float(ref.statistic), abs=1e-9)
        assert result.p == pytest.approx(float(ref.pvalue), abs=1e-9)
        assert result.df == n_a + n_b - 2


def test_two_sided_p_extremes():
    # large |t| drives p toward 0, t=0 gives exactly 1
    assert stats.t_two_sided_p(0.0, 10) == 1.0
    assert stats.t_two_sided_p(50.0, 10) < 1e-10
    assert stats.t_two_sided_p(-50.0, 10) < 1e-10


def test_percentile_nearest_rank():
    sample = list(range(101))  # 0..100
    assert stats.percentile_nearest_rank(sample, 10) == 10
    assert stats.percentile_nearest_rank(sample, 90) == 90
    assert stats.percentile_nearest_rank(sample, 100) == 100
    assert stats.percentile_nearest_rank([42.0], 50) == 42.0


def test_percentile_is_order_free():
    sample = [5.0, 1.0, 9.0, 3.0]
    assert stats.percentile_nearest_rank(sample, 50) == 3.0  # ceil(2) -> 2nd of sorted
    assert not math.isnan(stats.percentile_nearest_rank(sample, 1))
