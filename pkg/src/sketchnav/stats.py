"""Paired nonparametric comparison of two conditions: the Wilcoxon signed-rank
test with exact small-sample p-values and the r effect size.

Conventions: zero differences are discarded before ranking; tied absolute
differences receive average ranks; two-sided tests sum both tails of the
(symmetric) null distribution of the positive-rank sum. Small samples get an
exact p-value (rank-sum counting when the ranks are tie-free, full sign
enumeration when ties force fractional ranks); larger samples fall back to
the tie-corrected normal approximation with continuity correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import DegenerateSampleError

EXACT_MAX_N = 25       # tie-free rank sums counted exactly up to here
EXACT_TIES_MAX_N = 20  # ties enumerated over all 2^n sign vectors up to here

ALTERNATIVES = ("two-sided", "greater", "less")


@dataclass(frozen=True)
class PairedSample:
    """Per-participant values under two conditions, aligned by index."""

    condition_a: tuple[float, ...]
    condition_b: tuple[float, ...]

    def __post_init__(self):
        if len(self.condition_a) != len(self.condition_b):
            raise ValueError("conditions must have equal length")
        if len(self.condition_a) < 1:
            raise ValueError("sample must not be empty")
        for v in (*self.condition_a, *self.condition_b):
            if not math.isfinite(v):
                raise ValueError("sample values must be finite")

    @classmethod
    def of(cls, a: Sequence[float], b: Sequence[float]) -> "PairedSample":
        return cls(tuple(float(v) for v in a), tuple(float(v) for v in b))


@dataclass(frozen=True)
class StatResult:
    w_statistic: float      # min(W+, W-)
    p_value: float
    effect_size_r: float
    n_effective: int
    method: str             # "exact" | "normal-approximation"
    z_value: float
    w_plus: float
    w_minus: float
    alternative: str

    def as_dict(self) -> dict:
        return {
            "w_statistic": self.w_statistic,
            "p_value": self.p_value,
            "effect_size_r": self.effect_size_r,
            "n_effective": self.n_effective,
            "method": self.method,
            "z_value": self.z_value,
            "w_plus": self.w_plus,
            "w_minus": self.w_minus,
            "alternative": self.alternative,
        }


def _rank_sum_counts(scaled_ranks: Sequence[int]) -> np.ndarray:
    """counts[s] = number of sign vectors whose positive-rank sum equals s.

    Ranks arrive scaled to integers (doubled when average ranks are
    half-integral); the distribution has 2^n total mass.
    """
    total = sum(scaled_ranks)
    counts = np.zeros(total + 1, dtype=object)
    counts[0] = 1
    for r in scaled_ranks:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    return counts


def _exact_tail_probs(ranks: np.ndarray, w_plus: float) -> tuple[float, float]:
    """P(W+ <= w_plus) and P(W+ >= w_plus) by exact rank-sum counting."""
    scaled = [int(round(2 * r)) for r in ranks]
    counts = _rank_sum_counts(scaled)
    denom = 2 ** len(scaled)
    w_scaled = int(round(2 * w_plus))
    p_le = int(counts[: w_scaled + 1].sum()) / denom
    p_ge = int(counts[w_scaled:].sum()) / denom
    return p_le, p_ge


def _enumerate_tail_probs(ranks: np.ndarray, w_plus: float) -> tuple[float, float]:
    """Tail probabilities over all 2^n sign assignments, ranks as given."""
    sums = np.zeros(1)
    for r in ranks:
        sums = np.concatenate([sums, sums + r])
    eps = 1e-9
    p_le = float(np.count_nonzero(sums <= w_plus + eps)) / sums.size
    p_ge = float(np.count_nonzero(sums >= w_plus - eps)) / sums.size
    return p_le, p_ge


def _null_variance(n: int, ranks: np.ndarray) -> float:
    """Variance of the positive-rank sum under the null, tie-corrected."""
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    return var - float(((tie_counts**3 - tie_counts) / 48.0).sum())


def _normal_z(w: float, n: int, ranks: np.ndarray) -> float:
    """Continuity-corrected deviate of a rank sum statistic under the null."""
    mean = n * (n + 1) / 4.0
    var = _null_variance(n, ranks)
    if var <= 0 or w == mean:
        return 0.0
    correction = 0.5 if w < mean else -0.5
    return (w - mean + correction) / math.sqrt(var)


def _phi(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def wilcoxon_signed_rank(
    sample: PairedSample,
    alternative: str = "two-sided",
    method: str = "auto",
) -> StatResult:
    """Wilcoxon signed-rank test on paired values.

    `alternative` is 'two-sided', 'greater' (condition_a tends larger) or
    'less'. `method` 'auto' picks exact computation for small samples and the
    normal approximation otherwise; 'exact' and 'approx' force one route.
    Raises DegenerateSampleError when every difference is zero.
    """
    if alternative not in ALTERNATIVES:
        raise ValueError(f"alternative must be one of {ALTERNATIVES}")
    if method not in ("auto", "exact", "approx"):
        raise ValueError("method must be 'auto', 'exact' or 'approx'")

    diffs = np.asarray(sample.condition_a, dtype=float) - np.asarray(
        sample.condition_b, dtype=float
    )
    diffs = diffs[diffs != 0.0]
    n = diffs.size
    if n == 0:
        raise DegenerateSampleError("all paired differences are zero")

    ranks = rankdata(np.abs(diffs))
    w_plus = float(ranks[diffs > 0].sum())
    w_minus = float(ranks[diffs < 0].sum())
    w_min = min(w_plus, w_minus)
    total = n * (n + 1) / 2.0

    has_ties = np.unique(np.abs(diffs)).size < n
    if method == "auto":
        exact = (not has_ties and n <= EXACT_MAX_N) or (has_ties and n <= EXACT_TIES_MAX_N)
    else:
        exact = method == "exact"
    if exact and has_ties and n > EXACT_TIES_MAX_N:
        raise ValueError(f"exact computation with ties supports n <= {EXACT_TIES_MAX_N}")

    z = _normal_z(w_min, n, ranks)
    if exact:
        tails = _exact_tail_probs if not has_ties else _enumerate_tail_probs
        if alternative == "two-sided":
            p_low, _ = tails(ranks, w_min)
            _, p_high = tails(ranks, total - w_min)
            p = min(1.0, p_low + p_high)
        elif alternative == "greater":
            _, p = tails(ranks, w_plus)
        else:
            p, _ = tails(ranks, w_plus)
        used = "exact"
    else:
        if alternative == "two-sided":
            p = min(1.0, 2.0 * _phi(-abs(z)))
        elif alternative == "greater":
            p = _one_sided_approx(w_plus, n, ranks, upper=True)
        else:
            p = _one_sided_approx(w_plus, n, ranks, upper=False)
        used = "normal-approximation"

    result = StatResult(
        w_statistic=w_min,
        p_value=p,
        effect_size_r=abs(z) / math.sqrt(n),
        n_effective=n,
        method=used,
        z_value=z,
        w_plus=w_plus,
        w_minus=w_minus,
        alternative=alternative,
    )
    return result


def _one_sided_approx(w_plus: float, n: int, ranks: np.ndarray, upper: bool) -> float:
    """P(W+ >= w) (upper) or P(W+ <= w) by the continuity-corrected normal."""
    mean = n * (n + 1) / 4.0
    var = _null_variance(n, ranks)
    if var <= 0:
        return 1.0
    sd = math.sqrt(var)
    if upper:
        return _phi(-(w_plus - mean - 0.5) / sd)
    return _phi((w_plus - mean + 0.5) / sd)


def effect_size_r(result: StatResult) -> float:
    """The r effect size: |z| / sqrt(n_effective).

    Uses the continuity-corrected normal deviate of min(W+, W-) regardless of
    how the p-value was computed, so exact and approximate results report the
    same magnitude.
    """
    if result.n_effective == 0:
        raise DegenerateSampleError("effect size undefined for an empty sample")
    return abs(result.z_value) / math.sqrt(result.n_effective)
