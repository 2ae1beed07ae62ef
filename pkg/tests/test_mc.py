import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats as sps

from wignerlab.laws import GaussianLaw, GoeLaw, PowerTailLaw, RademacherLaw
from wignerlab.mc import (
    EnsembleConfig,
    sample_matrix,
    sample_stats,
    spectral_stats,
    tail_curve,
    truncation_event_rate,
    universality_compare,
    wilson_interval,
)
from wignerlab.moments import TruncationSpec, exact_trace_moment

RAD = RademacherLaw(Fraction(1, 2))


def test_sampling_deterministic_and_symmetric():
    cfg = EnsembleConfig(n=20, law=RAD, seed=123)
    a = sample_matrix(cfg, 7)
    b = sample_matrix(cfg, 7)
    assert np.array_equal(a, b)
    assert np.array_equal(a, a.T)
    c = sample_matrix(cfg, 8)
    assert not np.array_equal(a, c)
    # a different seed changes every replicate
    other = sample_matrix(EnsembleConfig(n=20, law=RAD, seed=124), 7)
    assert not np.array_equal(a, other)


def test_entry_scale_and_values():
    cfg = EnsembleConfig(n=16, law=RAD, seed=5)
    mat = sample_matrix(cfg, 0)
    vals = np.unique(np.abs(mat[np.triu_indices(16)]))
    assert np.allclose(vals, 0.5 / math.sqrt(16))


def test_sign_pattern_uniformity():
    # n=2 Rademacher: 8 equally likely sign patterns of (a11, a12, a22)
    cfg = EnsembleConfig(n=2, law=RAD, seed=42)
    counts = {}
    reps = 100_000
    for rep in range(reps):
        m = sample_matrix(cfg, rep)
        key = (m[0, 0] > 0, m[0, 1] > 0, m[1, 1] > 0)
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 8
    chi2, p = sps.chisquare(list(counts.values()))
    assert p > 0.001


def test_dilution_c_equals_n_matches_wigner_exactly():
    dil = EnsembleConfig(n=15, law=RAD, dilution_c=15, seed=9)
    wig = EnsembleConfig(n=15, law=RAD, seed=9)
    for rep in (0, 3):
        assert np.array_equal(sample_matrix(dil, rep), sample_matrix(wig, rep))


def test_dilution_sparsity():
    cfg = EnsembleConfig(n=200, law=RademacherLaw(Fraction(1)), dilution_c=10, seed=2)
    mat = sample_matrix(cfg, 0)
    frac_nonzero = np.mean(mat[np.triu_indices(200)] != 0)
    assert 0.03 <= frac_nonzero <= 0.07  # c/n = 0.05


def test_truncated_sampling_respects_cutoff():
    law = PowerTailLaw(v=1.0, gamma=24.0)
    tr = TruncationSpec(law, delta=0.05)
    cfg = EnsembleConfig(n=60, law=law, truncation=tr, seed=10)
    cutoff = tr.cutoff(60)
    for rep in range(5):
        mat = sample_matrix(cfg, rep)
        assert np.max(np.abs(mat)) * math.sqrt(60) <= cutoff + 1e-12


def test_goe_diagonal_variance():
    law = GoeLaw(Fraction(1))
    cfg = EnsembleConfig(n=40, law=law, seed=77)
    diag = []
    off = []
    for rep in range(300):
        m = sample_matrix(cfg, rep) * math.sqrt(40)
        diag.extend(np.diag(m))
        off.extend(m[np.triu_indices(40, k=1)])
    ratio = np.var(diag) / np.var(off)
    assert 1.7 <= ratio <= 2.3


def test_spectral_stats_trivial_cases():
    d = np.diag([1.0, -3.0, 2.0])
    out = spectral_stats(d, (1, 2))
    assert out["lambda_max"] == pytest.approx(3.0)
    assert out["traces"][1] == pytest.approx(1 + 9 + 4)
    assert out["traces"][2] == pytest.approx(1 + 81 + 16)
    a = 0.7
    two = np.array([[0.0, a], [a, 0.0]])
    out2 = spectral_stats(two, (2,))
    assert out2["lambda_max"] == pytest.approx(a)
    assert out2["traces"][2] == pytest.approx(2 * a**4)


def test_trace_matches_matrix_powers():
    rng = np.random.Generator(np.random.Philox(key=np.array([3, 1], dtype=np.uint64)))
    for n in (4, 6, 8):
        m = rng.standard_normal((n, n))
        m = (m + m.T) / 2
        out = spectral_stats(m, (1, 2, 3, 4))
        power = np.eye(n)
        for s in (1, 2, 3, 4):
            power = power @ m @ m
            assert out["traces"][s] == pytest.approx(np.trace(power), rel=1e-8)


def test_mc_agrees_with_exact_moments():
    cfg = EnsembleConfig(n=30, law=RAD, seed=314)
    st = sample_stats(cfg, 3000, s_list=(2, 3, 4))
    spec = cfg.moment_spec()
    for s in (2, 3, 4):
        exact = float(exact_trace_moment(spec, s).total)
        assert abs(st.zscore_against(s, exact)) <= 4


def test_mc_agrees_with_exact_moments_all_ensembles():
    # the walk sum serves every sampling configuration: GOE diagonals,
    # dilution masks and entry truncation included
    from wignerlab.laws import GoeLaw

    pt = PowerTailLaw(v=1.0, gamma=24.0)
    configs = [
        EnsembleConfig(n=30, law=GoeLaw(Fraction(1, 2)), seed=41),
        EnsembleConfig(n=30, law=RademacherLaw(Fraction(1)), dilution_c=10, seed=42),
        EnsembleConfig(n=30, law=pt, truncation=TruncationSpec(pt, delta=0.05), seed=43),
    ]
    for cfg in configs:
        st = sample_stats(cfg, 2500, s_list=(1, 2, 3, 4))
        spec = cfg.moment_spec()
        for s in (1, 2, 3, 4):
            exact = float(exact_trace_moment(spec, s).total)
            z = st.zscore_against(s, exact)
            assert abs(z) <= 4, (cfg.law.name, s, z)


def test_sample_stats_reproducible():
    cfg = EnsembleConfig(n=10, law=RAD, seed=1000)
    a = sample_stats(cfg, 50, s_list=(1, 2))
    b = sample_stats(cfg, 50, s_list=(1, 2))
    assert np.array_equal(a.lambda_max, b.lambda_max)
    assert np.array_equal(a.traces[2], b.traces[2])
    assert a.rows() == b.rows()


def test_wilson_interval():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and hi < 0.05
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    lo2, hi2 = wilson_interval(50, 1000)
    assert hi2 - lo2 < hi - lo  # narrower with more trials


def test_tail_curve_monotone_and_extremes():
    cfg = EnsembleConfig(n=60, law=RAD, seed=21)
    curve = tail_curve(cfg, (-2.0, 0.0, 2.0, 50.0), replicates=400, chebyshev_s=3)
    probs = curve.probabilities()
    cis = curve.intervals()
    for i in range(len(probs) - 1):
        assert probs[i + 1] <= probs[i] + (cis[i][1] - cis[i][0])
    # threshold beyond the deterministic entry bound: probability zero
    assert probs[-1] == 0.0
    assert all(b >= 0 for b in curve.chebyshev_bounds)
    rows = curve.rows()
    assert rows[0]["replicates"] == 400
    with pytest.raises(ValueError):
        tail_curve(cfg, (0.0,), replicates=50)


def test_dilute_tail_scale():
    cfg = EnsembleConfig(n=80, law=RademacherLaw(Fraction(1)), dilution_c=20, seed=33)
    curve = tail_curve(cfg, (0.0, 1.0), scale="dilute", replicates=150)
    assert curve.thresholds[0] == pytest.approx(2.0)
    assert curve.thresholds[1] == pytest.approx(2.0 * (1 + 1 / 20))


def test_universality_same_law_agrees():
    a = EnsembleConfig(n=40, law=RAD, seed=1)
    b = EnsembleConfig(n=40, law=RAD, seed=2)
    rep = universality_compare(a, b, s=3, replicates=600)
    assert rep["agrees_within_3sd"]
    assert abs(rep["z_vs_se"]) < 4


def test_universality_reports_systematic_difference():
    # at s=2 the exact means differ by (V4_a - V4_b)/n; the report's raw
    # difference must reproduce that within MC error
    n = 60
    a = EnsembleConfig(n=n, law=RAD, seed=11)
    b = EnsembleConfig(n=n, law=GaussianLaw(Fraction(1, 2)), seed=12)
    rep = universality_compare(a, b, s=2, replicates=4000)
    v = 0.5
    expected = (v**4 - 3 * v**4) / n  # per (1/n) Tr normalization
    assert rep["difference"] == pytest.approx(expected, abs=4 * rep["se_of_difference"])


def test_truncation_event_rate_bounded_law():
    law = RademacherLaw(Fraction(1))
    tr = TruncationSpec(law, delta=0.01)
    cfg = EnsembleConfig(n=100, law=law, truncation=tr, seed=8)
    out = truncation_event_rate(cfg, 200)
    assert out["rate"] == 0.0  # cutoff 100^(1/6-0.01) > 1


def test_truncation_event_rate_power_tail():
    law = PowerTailLaw(v=1.0, gamma=24.0)
    tr = TruncationSpec(law, delta=0.05, delta0=0.5)
    rates = {}
    for n in (50, 200):
        cfg = EnsembleConfig(n=n, law=law, truncation=tr, seed=44)
        out = truncation_event_rate(cfg, 1200)
        rates[n] = out["rate"]
        assert out["rate"] <= out["union_bound"] + (out["ci_high"] - out["rate"])
    assert rates[200] < rates[50]
