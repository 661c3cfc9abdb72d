"""Welch's t-test, nearest-rank percentiles, and accuracy-delta accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import betainc


@dataclass(frozen=True)
class WelchResult:
    t_statistic: float
    degrees_of_freedom: float
    p_value: float
    mean_a: float
    mean_b: float
    n_a: int
    n_b: int


@dataclass(frozen=True)
class RecoveryReport:
    """Accuracy accounting in percent: a = a0 + delta_a."""

    a0: float
    delta_a: float
    a: float
    recovered: int
    total: int

    def __post_init__(self):
        if not 0 <= self.recovered <= self.total:
            raise ValueError(
                f"recovered ({self.recovered}) must lie in 0..total ({self.total})"
            )
        if abs(self.a - (self.a0 + self.delta_a)) > 0.005:
            raise ValueError("a must equal a0 + delta_a")
        if abs(self.delta_a - 100.0 * self.recovered / self.total) > 0.005:
            raise ValueError("delta_a must equal 100 * recovered / total")

    def to_dict(self) -> dict:
        return {
            "a0": self.a0,
            "delta_a": self.delta_a,
            "a": self.a,
            "recovered": self.recovered,
            "total": self.total,
        }


@dataclass(frozen=True)
class GroupMeans:
    """Mean normalized complexity by answer outcome; delta = incorrect - correct."""

    correct_mean: float | None
    correct_n: int
    incorrect_mean: float | None
    incorrect_n: int
    delta: float | None


def _mean(xs) -> float:
    return sum(xs) / len(xs)


def _sample_variance(xs, m: float) -> float:
    return sum((x - m) ** 2 for x in xs) / (len(xs) - 1)


def student_t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t via the regularized incomplete beta."""
    if df <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return float(betainc(df / 2.0, 0.5, x))


def welch_t(sample_a, sample_b) -> WelchResult:
    """Two-sample t-test without the equal-variance assumption.

    Uses unbiased sample variances and Welch-Satterthwaite degrees of
    freedom; the p-value is two-sided. When both samples are constant
    and equal in mean the statistic is defined as 0 with p = 1.
    """
    a = [float(x) for x in sample_a]
    b = [float(x) for x in sample_b]
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each sample needs at least 2 observations")
    if not all(map(math.isfinite, a)) or not all(map(math.isfinite, b)):
        raise ValueError("samples must contain only finite values")
    n_a, n_b = len(a), len(b)
    m_a, m_b = _mean(a), _mean(b)
    v_a, v_b = _sample_variance(a, m_a), _sample_variance(b, m_b)
    se2 = v_a / n_a + v_b / n_b
    if se2 == 0.0:
        diff = m_a - m_b
        df = float(n_a + n_b - 2)
        if diff == 0.0:
            t, p = 0.0, 1.0
        else:
            t = math.copysign(math.inf, diff)
            p = 0.0
        return WelchResult(t, df, p, m_a, m_b, n_a, n_b)
    t = (m_a - m_b) / math.sqrt(se2)
    df = se2 * se2 / (
        (v_a / n_a) ** 2 / (n_a - 1) + (v_b / n_b) ** 2 / (n_b - 1)
    )
    p = student_t_two_sided_p(t, df)
    return WelchResult(t, df, p, m_a, m_b, n_a, n_b)


def percentile(values, q: float) -> float:
    """Nearest-rank percentile: the sorted element at rank ceil(q/100 * n)."""
    if not values:
        raise ValueError("percentile of an empty sequence")
    if not 0 < q < 100:
        raise ValueError(f"q must lie strictly between 0 and 100, got {q}")
    ordered = sorted(values)
    rank = math.ceil(q / 100.0 * len(ordered))
    return ordered[max(rank, 1) - 1]


def recovery_report(recovered: int, total: int, a0: float) -> RecoveryReport:
    """Fold a recovered-question count into updated accuracy (percent)."""
    if total <= 0:
        raise ValueError("total must be positive")
    if not 0 <= recovered <= total:
        raise ValueError(f"recovered ({recovered}) must lie in 0..total ({total})")
    delta_a = 100.0 * recovered / total
    return RecoveryReport(
        a0=a0, delta_a=delta_a, a=a0 + delta_a, recovered=recovered, total=total
    )


def group_means(records) -> GroupMeans:
    """Mean normalized complexity for correctly vs incorrectly answered records.

    Each record must expose ``correct`` and ``dlt_normalized``. An empty
    group is reported with n = 0, no mean, and no delta.
    """
    records = list(records)
    if not records:
        raise ValueError("group_means of an empty record list")
    correct = [r.dlt_normalized for r in records if r.correct]
    incorrect = [r.dlt_normalized for r in records if not r.correct]
    correct_mean = _mean(correct) if correct else None
    incorrect_mean = _mean(incorrect) if incorrect else None
    delta = (
        incorrect_mean - correct_mean
        if correct_mean is not None and incorrect_mean is not None
        else None
    )
    return GroupMeans(
        correct_mean=correct_mean,
        correct_n=len(correct),
        incorrect_mean=incorrect_mean,
        incorrect_n=len(incorrect),
        delta=delta,
    )
