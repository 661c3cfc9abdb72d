import math
import random
from dataclasses import dataclass

import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from synloc.stats import (
    GroupMeans,
    RecoveryReport,
    group_means,
    percentile,
    recovery_report,
    student_t_two_sided_p,
    welch_t,
)

# frozen independent oracle for [1..5] vs [2,4,6,8,10], cross-checked
# against a reference statistics library and high-precision quadrature
ORACLE_T = -1.8973665961010275
ORACLE_DF = 5.882352941176471
ORACLE_P = 0.10753119493062718


def test_welch_identical_samples():
    r = welch_t([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert r.t_statistic == 0.0
    assert r.p_value == 1.0


def test_welch_frozen_oracle():
    r = welch_t([1, 2, 3, 4, 5], [2, 4, 6, 8, 10])
    assert r.t_statistic == pytest.approx(ORACLE_T, abs=1e-12)
    assert r.degrees_of_freedom == pytest.approx(ORACLE_DF, abs=1e-12)
    assert r.p_value == pytest.approx(ORACLE_P, abs=1e-6)
    assert r.n_a == r.n_b == 5
    assert r.mean_a == 3.0 and r.mean_b == 6.0


def test_welch_antisymmetry():
    a, b = [1, 2, 3, 4, 5], [2, 4, 6, 8, 10]
    fwd, rev = welch_t(a, b), welch_t(b, a)
    assert rev.t_statistic == -fwd.t_statistic
    assert rev.degrees_of_freedom == fwd.degrees_of_freedom
    assert rev.p_value == fwd.p_value


def test_welch_sign_matches_mean_difference():
    rng = random.Random(515)
    for _ in range(50):
        a = [rng.gauss(0, 1) for _ in range(rng.randrange(2, 20))]
        b = [rng.gauss(0.5, 2) for _ in range(rng.randrange(2, 20))]
        r = welch_t(a, b)
        assert math.copysign(1, r.t_statistic) == math.copysign(1, r.mean_a - r.mean_b) \
            or r.t_statistic == 0 == (r.mean_a - r.mean_b)
        assert 0.0 <= r.p_value <= 1.0
        assert r.degrees_of_freedom > 0


def test_welch_small_samples_rejected():
    with pytest.raises(ValueError):
        welch_t([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        welch_t([1.0, 2.0], [])


def test_welch_nonfinite_rejected():
    with pytest.raises(ValueError):
        welch_t([1.0, float("nan")], [1.0, 2.0])


def test_welch_zero_variance_cases():
    equal = welch_t([3.0, 3.0], [3.0, 3.0, 3.0])
    assert equal.t_statistic == 0.0 and equal.p_value == 1.0
    differ = welch_t([3.0, 3.0], [4.0, 4.0])
    assert math.isinf(differ.t_statistic) and differ.t_statistic < 0
    assert differ.p_value == 0.0


def test_welch_shift_invariance():
    a, b = [1, 2, 3, 4, 5], [2, 4, 6, 8, 10]
    base = welch_t(a, b)
    for c in (-17.5, 3.25, 1000.0):
        shifted = welch_t([x + c for x in a], [x + c for x in b])
        assert shifted.t_statistic == pytest.approx(base.t_statistic, abs=1e-10)
        assert shifted.degrees_of_freedom == pytest.approx(base.degrees_of_freedom, abs=1e-10)
        assert shifted.p_value == pytest.approx(base.p_value, abs=1e-10)


def test_welch_scale_invariance():
    a, b = [1, 2, 3, 4, 5], [2, 4, 6, 8, 10]
    base = welch_t(a, b)
    for c in (0.125, 3.0, 250.0):
        scaled = welch_t([x * c for x in a], [x * c for x in b])
        assert scaled.t_statistic == pytest.approx(base.t_statistic, abs=1e-10)
        assert scaled.degrees_of_freedom == pytest.approx(base.degrees_of_freedom, abs=1e-10)
        assert scaled.p_value == pytest.approx(base.p_value, abs=1e-10)


def _t_density(u, df):
    return (
        math.exp(math.lgamma((df + 1) / 2) - math.lgamma(df / 2))
        / math.sqrt(df * math.pi)
        * (1 + u * u / df) ** (-(df + 1) / 2)
    )


@pytest.mark.parametrize("df", [1.0, 5.0, 30.0])
def test_p_value_matches_numerical_integration(df):
    for t in (-5.0, -2.5, -1.0, -0.2, 0.0, 0.7, 1.9, 3.3, 5.0):
        tail, _ = quad(_t_density, abs(t), math.inf, args=(df,))
        assert student_t_two_sided_p(t, df) == pytest.approx(2 * tail, abs=1e-6)


def test_percentile_nearest_rank():
    assert percentile([1, 2, 3, 4], 75) == 3
    assert percentile([4, 1, 3, 2], 75) == 3
    assert percentile([9], 50) == 9
    assert percentile([9], 99.9) == 9
    assert percentile([5, 5, 5], 75) == 5
    assert percentile([1, 2, 3, 4], 25) == 1
    assert percentile([1, 2, 3, 4], 76) == 4


def test_percentile_validation():
    with pytest.raises(ValueError):
        percentile([], 50)
    with pytest.raises(ValueError):
        percentile([1.0], 0)
    with pytest.raises(ValueError):
        percentile([1.0], 100)


def test_recovery_report_published_row():
    r = recovery_report(109, 1319, 37.76)
    assert abs(r.delta_a - 8.26) <= 0.005
    assert abs(r.a - 46.02) <= 0.005
    assert r.recovered == 109 and r.total == 1319


def test_recovery_report_edges():
    none = recovery_report(0, 50, 42.0)
    assert none.delta_a == 0.0 and none.a == 42.0
    full = recovery_report(10, 10, 0.0)
    assert full.delta_a == 100.0 and full.a == 100.0


def test_recovery_report_contract_violation():
    with pytest.raises(ValueError):
        recovery_report(11, 10, 0.0)
    with pytest.raises(ValueError):
        recovery_report(-1, 10, 0.0)
    with pytest.raises(ValueError):
        recovery_report(0, 0, 0.0)


@given(
    total=st.integers(min_value=1, max_value=100000),
    recovered_frac=st.floats(min_value=0, max_value=1),
    a0=st.floats(min_value=0, max_value=100),
)
def test_recovery_report_invariants(total, recovered_frac, a0):
    recovered = int(recovered_frac * total)
    r = recovery_report(recovered, total, a0)
    assert 0 <= r.recovered <= r.total
    assert abs(r.a - (r.a0 + r.delta_a)) <= 0.005
    assert abs(r.delta_a - 100.0 * r.recovered / r.total) <= 0.005


def test_recovery_report_direct_construction_validates():
    with pytest.raises(ValueError):
        RecoveryReport(a0=10.0, delta_a=5.0, a=99.0, recovered=1, total=20)


@dataclass
class _Rec:
    correct: bool
    dlt_normalized: float


def test_group_means_two_groups():
    recs = [_Rec(True, 2), _Rec(True, 4), _Rec(False, 5), _Rec(False, 7)]
    g = group_means(recs)
    assert g == GroupMeans(correct_mean=3.0, correct_n=2,
                           incorrect_mean=6.0, incorrect_n=2, delta=3.0)


def test_group_means_empty_group():
    g = group_means([_Rec(True, 1.0), _Rec(True, 3.0)])
    assert g.incorrect_n == 0
    assert g.incorrect_mean is None
    assert g.delta is None


def test_group_means_empty_input_rejected():
    with pytest.raises(ValueError):
        group_means([])


def test_group_means_matches_bruteforce_oracle():
    rng = random.Random(2024)
    recs = [_Rec(rng.random() < 0.5, rng.uniform(0, 30)) for _ in range(20)]
    g = group_means(recs)
    corr = [r.dlt_normalized for r in recs if r.correct]
    inc = [r.dlt_normalized for r in recs if not r.correct]
    exp_corr = sum(corr) / len(corr)
    exp_inc = sum(inc) / len(inc)
    assert g.correct_mean == pytest.approx(exp_corr, abs=1e-12)
    assert g.incorrect_mean == pytest.approx(exp_inc, abs=1e-12)
    assert g.delta == pytest.approx(exp_inc - exp_corr, abs=1e-12)
    assert (g.correct_n, g.incorrect_n) == (len(corr), len(inc))
