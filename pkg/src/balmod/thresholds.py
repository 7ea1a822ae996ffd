"""Read-threshold selection for cell-level blocks.

A block of n cells is read against a threshold v: cell i gives 1 iff its
level is >= v.  The balancing threshold picks v so the read word has weight
n/2; relaxed variants trade exactness for speed; the optimal threshold is a
simulation-only genie that knows the stored word.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .words import BitWord


def _as_levels(c) -> np.ndarray:
    levels = np.asarray(c, dtype=np.float64)
    if levels.ndim != 1:
        raise ValueError("cell levels must be one-dimensional")
    if not np.all(np.isfinite(levels)):
        raise ValueError("cell levels must be finite")
    return levels


@dataclass(frozen=True)
class ErrorCounts:
    """Read errors split by direction: n10 counts stored 1 read as 0."""

    n10: int
    n01: int

    @property
    def total(self) -> int:
        return self.n10 + self.n01


@dataclass(frozen=True)
class BalancingThreshold:
    """Threshold value plus whether it achieves an exactly balanced read."""

    value: float
    exact: bool


def read_with_threshold(c, v: float) -> BitWord:
    """Read a block: bit i is 1 iff levels[i] >= v."""
    levels = _as_levels(c)
    return BitWord.from_array((levels >= v).astype(np.uint8))


def error_counts(x: BitWord, y: BitWord) -> ErrorCounts:
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    xa = x.to_array()
    ya = y.to_array()
    n10 = int(np.sum((xa == 1) & (ya == 0)))
    n01 = int(np.sum((xa == 0) & (ya == 1)))
    return ErrorCounts(n10=n10, n01=n01)


def balancing_threshold_exact(c) -> BalancingThreshold:
    """Sort the levels and cut between the n/2 largest and the rest.

    Ties straddling the median boundary make exact balance impossible; in that
    case the returned threshold minimizes |weight - n/2| and exact is False.
    """
    levels = _as_levels(c)
    n = levels.size
    if n % 2:
        raise ValueError("exact balancing requires an even number of cells")
    k = n // 2
    desc = np.sort(levels)[::-1]
    v = 0.5 * (desc[k - 1] + desc[k])
    if int(np.sum(levels >= v)) == k:
        return BalancingThreshold(value=float(v), exact=True)
    # Midpoint failed: either tied values straddle the boundary, or the two
    # neighbors are adjacent floats and the midpoint rounded onto one of them.
    if desc[k - 1] > desc[k]:
        return BalancingThreshold(value=float(desc[k - 1]), exact=True)
    best_v, best_gap = None, None
    for v_cand, wt in _cut_candidates(levels):
        gap = abs(wt - k)
        if best_gap is None or gap < best_gap:
            best_v, best_gap = v_cand, gap
    return BalancingThreshold(value=float(best_v), exact=False)


def _cut_candidates(levels: np.ndarray):
    """All realizable (threshold, weight) cuts in ascending threshold order."""
    asc = np.sort(levels)
    n = asc.size
    yield float(asc[0] - 1.0), n
    for j in range(1, n):
        if asc[j - 1] < asc[j]:
            v = 0.5 * (asc[j - 1] + asc[j])
            if v <= asc[j - 1]:
                v = asc[j]  # adjacent floats: the upper value realizes the cut
            yield float(v), n - j
    yield float(asc[-1] + 1.0), 0


def balancing_threshold_bisect(c, lo: float, hi: float, eps: float) -> float:
    """Half-interval search: probe the midpoint, count ones, and shrink the
    interval toward weight n/2; stops on exact balance or width <= eps."""
    levels = _as_levels(c)
    if not lo < hi:
        raise ValueError("need lo < hi")
    if eps <= 0:
        raise ValueError("need eps > 0")
    target = levels.size / 2.0
    while hi - lo > eps:
        mid = 0.5 * (lo + hi)
        k = int(np.sum(levels >= mid))
        if k == target:
            return mid
        if k < target:
            hi = mid  # too few ones: threshold too high
        else:
            lo = mid
    return 0.5 * (lo + hi)


def relaxed_threshold_mean(c) -> float:
    """First-order relaxed threshold: the mean cell level."""
    levels = _as_levels(c)
    if levels.size < 1:
        raise ValueError("need at least one cell")
    return float(np.mean(levels))


def relaxed_threshold_second_order(c, a: float = 0.0) -> float:
    """mean(c) + a * (1/2 - mean(c))**2 with a model-dependent constant a."""
    mu = relaxed_threshold_mean(c)
    return mu + a * (0.5 - mu) ** 2


def optimal_threshold_oracle(c, x: BitWord) -> tuple[float, ErrorCounts]:
    """Genie threshold minimizing total errors given the true stored word.

    Scans the n + 1 realizable cuts (midpoints between distinct consecutive
    sorted levels plus below-min / above-max sentinels).  Ties go to the
    smallest error count, then the lowest threshold.
    """
    levels = _as_levels(c)
    if len(x) != levels.size:
        raise ValueError("stored word and levels must have equal length")
    order = np.argsort(levels, kind="stable")
    truth = x.to_array()[order]
    n = levels.size
    total_ones = int(truth.sum())
    # cut j: the j smallest cells read 0, the rest read 1
    ones_below = np.concatenate(([0], np.cumsum(truth)))
    ne_by_cut = 2 * ones_below - np.arange(n + 1) + (n - total_ones)

    best_v, best_counts = None, None
    cut_iter = _cut_candidates(levels)
    for v_cand, wt in cut_iter:
        j = n - wt
        ne = int(ne_by_cut[j])
        if best_counts is None or ne < best_counts.total:
            n10 = int(ones_below[j])
            n01 = (n - j) - (total_ones - n10)
            best_v, best_counts = v_cand, ErrorCounts(n10=n10, n01=int(n01))
    return best_v, best_counts
