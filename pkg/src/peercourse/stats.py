"""Descriptive statistics and the pooled two-sample t-test.

The t-distribution tail is computed here from first principles (regularized
incomplete beta via the modified Lentz continued fraction) so the test suite
can hold it against an independent reference implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import TooFewSamples, ZeroVariance


def mean(sample: Sequence[float]) -> float:
    if len(sample) < 1:
        raise TooFewSamples("mean needs at least one observation")
    return math.fsum(sample) / len(sample)


def std(sample: Sequence[float]) -> float:
    """Sample standard deviation (n-1 denominator)."""
    n = len(sample)
    if n < 2:
        raise TooFewSamples("sample std needs at least two observations")
    m = mean(sample)
    return math.sqrt(math.fsum((x - m) ** 2 for x in sample) / (n - 1))


def percentile_nearest_rank(sample: Sequence[float], pct: float) -> float:
    """Nearest-rank percentile: the ceil(pct/100 * n)-th smallest value."""
    if not sample:
        raise TooFewSamples("percentile of empty sample")
    if not 0 < pct <= 100:
        raise ValueError("pct must lie in (0, 100]")
    ordered = sorted(sample)
    rank = math.ceil(pct / 100 * len(ordered))
    return ordered[max(rank, 1) - 1]


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p: float  # two-sided


def pooled_t_test(sample_a: Sequence[float], sample_b: Sequence[float]) -> TTestResult:
    """Unpaired two-sample t-test with pooled variance.

    t = (m_a - m_b) / sqrt(s_p^2 (1/n_a + 1/n_b)), with the pooled variance
    s_p^2 = ((n_a-1) s_a^2 + (n_b-1) s_b^2) / (n_a + n_b - 2) and
    df = n_a + n_b - 2. The p-value is the two-sided t tail.
    """
    na, nb = len(sample_a), len(sample_b)
    if na < 2 or nb < 2:
        raise TooFewSamples("both samples need at least two observations")
    ma, mb = mean(sample_a), mean(sample_b)
    va = math.fsum((x - ma) ** 2 for x in sample_a) / (na - 1)
    vb = math.fsum((x - mb) ** 2 for x in sample_b) / (nb - 1)
    df = na + nb - 2
    pooled = ((na - 1) * va + (nb - 1) * vb) / df
    if pooled <= 0.0:
        raise ZeroVariance("pooled variance is zero")
    t = (ma - mb) / math.sqrt(pooled * (1 / na + 1 / nb))
    return TTestResult(t=t, df=df, p=t_two_sided_p(t, df))


def t_two_sided_p(t: float, df: int) -> float:
    """P(|T| >= |t|) for T ~ t(df); equals I_x(df/2, 1/2), x = df/(df+t^2)."""
    if df < 1:
        raise ValueError("df must be >= 1")
    x = df / (df + t * t)
    p = _reg_inc_beta(df / 2.0, 0.5, x)
    return min(max(p, 0.0), 1.0)


def _reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # The continued fraction converges fast for x < (a+1)/(a+b+2);
    # otherwise use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    eps = 1e-15
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")
