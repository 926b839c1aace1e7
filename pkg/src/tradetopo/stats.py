"""Pearson correlation and two-sample Kolmogorov-Smirnov testing,
including the exact permutation p-value used for the small recession
samples."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np
from scipy.special import kolmogorov

from .errors import (
    DegenerateVariance,
    EmptySample,
    MissingYear,
    SizeMismatch,
)

EXACT_ENUMERATION_LIMIT = 10**6
_TIE_EPS = 1e-12


@dataclass(frozen=True)
class KsResult:
    d_statistic: float
    p_value: float
    method: str  # "exact-permutation" or "asymptotic"


def pearson(x, y) -> float:
    """Product-moment correlation of two equal-length sequences."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise SizeMismatch(f"lengths differ: {x.shape} vs {y.shape}")
    if x.size < 3:
        raise SizeMismatch(f"need at least 3 points, got {x.size}")
    dx = x - x.mean()
    dy = y - y.mean()
    ss_x = float(np.dot(dx, dx))
    ss_y = float(np.dot(dy, dy))
    if ss_x == 0.0 or ss_y == 0.0:
        raise DegenerateVariance("zero variance input")
    return float(np.dot(dx, dy) / np.sqrt(ss_x * ss_y))


def _ecdf_gaps(pooled_sorted, membership, n, m):
    """Signed ECDF_a - ECDF_b gaps at the end of each tie group of the
    pooled sorted sample; membership marks positions belonging to a."""
    ca = np.cumsum(membership, axis=-1) / n
    cb = np.cumsum(1 - membership, axis=-1) / m
    ends = np.flatnonzero(
        np.append(np.diff(pooled_sorted) != 0, True)
    )
    return (ca - cb)[..., ends]


def ks_statistic(a, b) -> float:
    """D = sup over thresholds of |ECDF_a - ECDF_b|."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise EmptySample("both samples must be nonempty")
    pooled = np.concatenate([a, b])
    order = np.argsort(pooled, kind="stable")
    membership = (order < a.size).astype(float)
    gaps = _ecdf_gaps(pooled[order], membership, a.size, b.size)
    return float(np.max(np.abs(gaps)))


def _enumerate_gaps(pooled, n):
    """Signed ECDF gap rows for every assignment of n of the pooled
    values to the first sample; rows follow itertools.combinations order."""
    total = pooled.size
    pooled_sorted = np.sort(pooled)
    picks = np.fromiter(
        (i for combo in combinations(range(total), n) for i in combo),
        dtype=np.intp,
    ).reshape(-1, n)
    membership = np.zeros((picks.shape[0], total))
    np.put_along_axis(membership, picks, 1.0, axis=1)
    return _ecdf_gaps(pooled_sorted, membership, n, total - n)


def ks_two_sample(a, b) -> KsResult:
    """Two-sided KS test; p by exhaustive permutation when the number of
    label assignments is small enough, otherwise the asymptotic
    Kolmogorov distribution with effective size nm/(n+m)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = ks_statistic(a, b)
    n, m = a.size, b.size
    if comb(n + m, n) <= EXACT_ENUMERATION_LIMIT:
        gaps = _enumerate_gaps(np.concatenate([a, b]), n)
        d_all = np.max(np.abs(gaps), axis=1)
        p = float(np.mean(d_all >= d - _TIE_EPS))
        method = "exact-permutation"
    else:
        en = np.sqrt(n * m / (n + m))
        p = float(min(1.0, max(kolmogorov(en * d), np.finfo(float).tiny)))
        method = "asymptotic"
    return KsResult(d_statistic=d, p_value=p, method=method)


def ks_one_sided_p(a, b) -> float:
    """Permutation p-value for D+ = sup(ECDF_a - ECDF_b), the one-sided
    alternative that a-values sit below b-values."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise EmptySample("both samples must be nonempty")
    pooled = np.concatenate([a, b])
    order = np.argsort(pooled, kind="stable")
    membership = (order < a.size).astype(float)
    d_plus = float(np.max(_ecdf_gaps(pooled[order], membership, a.size, b.size)))
    n, m = a.size, b.size
    if comb(n + m, n) <= EXACT_ENUMERATION_LIMIT:
        gaps = _enumerate_gaps(pooled, n)
        d_all = np.max(gaps, axis=1)
        return float(np.mean(d_all >= d_plus - _TIE_EPS))
    en2 = n * m / (n + m)
    return float(min(1.0, np.exp(-2.0 * en2 * d_plus**2)))


def recession_ccc_shift(series, windows):
    """Compare CCC the year before each recession starts with CCC the
    year after it ends.

    Returns before/after samples, the two-sided KS result and the
    one-sided permutation p for "before larger than after".
    """
    by_year = {p.year: p.ccc for p in series}
    missing = [
        w for w in windows
        if w.start[0] - 1 not in by_year or w.end[0] + 1 not in by_year
    ]
    if missing:
        raise MissingYear(missing)
    before = [by_year[w.start[0] - 1] for w in windows]
    after = [by_year[w.end[0] + 1] for w in windows]
    return {
        "before": before,
        "after": after,
        "two_sided": ks_two_sample(before, after),
        "one_sided_p": ks_one_sided_p(before, after),
    }
