import math
from fractions import Fraction

import numpy as np
import pytest

from wignerlab.laws import (
    GaussianLaw,
    GoeLaw,
    PowerTailLaw,
    RademacherLaw,
    ThreePointLaw,
    quadrature_moment,
)
from wignerlab.moments import (
    DEFAULT_C1,
    MomentSpec,
    TruncationSpec,
    brute_force_trace_moment,
    default_c0,
    dilute_lower_bound,
    dilute_spec,
    exact_trace_moment,
    semicircle_moment,
    trace_moment_formula_s2,
    truncated_moments,
    truncated_spec,
    weight_bound_check,
    wigner_spec,
    z_decomposition,
)
from wignerlab.walks import cached_even_walks

RAD = RademacherLaw(Fraction(1, 2))
GAU = GaussianLaw(Fraction(1, 2))


def test_semicircle_moments():
    v = Fraction(1, 2)
    assert semicircle_moment(2, v) == v**2
    assert semicircle_moment(4, v) == 2 * v**4
    assert semicircle_moment(5, v) == 0
    assert semicircle_moment(6, Fraction(1)) == 5


def test_entry_moments():
    assert RAD.moment(4) == Fraction(1, 16)
    assert GAU.moment(4) == 3 * Fraction(1, 16)
    assert GAU.moment(6) == 15 * Fraction(1, 64)
    goe = GoeLaw(Fraction(1, 2))
    spec = MomentSpec(n=3, law=goe, kind="goe")
    assert spec.entry_moment(2, is_loop=True) == 2 * Fraction(1, 4)
    assert spec.entry_moment(2, is_loop=False) == Fraction(1, 4)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("s", [1, 2, 3])
def test_oracle_equivalence_wigner(n, s):
    for law in (RAD, GAU):
        spec = wigner_spec(law, n)
        assert exact_trace_moment(spec, s).total == brute_force_trace_moment(spec, s)


def test_oracle_equivalence_other_ensembles():
    goe = MomentSpec(n=3, law=GAU, kind="goe")
    assert exact_trace_moment(goe, 2).total == brute_force_trace_moment(goe, 2)
    dil = dilute_spec(RademacherLaw(Fraction(1)), 3, 2)
    assert exact_trace_moment(dil, 3).total == brute_force_trace_moment(dil, 3)
    trunc = truncated_spec(TruncationSpec(ThreePointLaw(), delta=0.05), 3)
    assert exact_trace_moment(trunc, 2).total == brute_force_trace_moment(trunc, 2)


def test_single_site_collapse():
    for s in (1, 2, 3, 4):
        assert exact_trace_moment(wigner_spec(RAD, 1), s).total == RAD.moment(2 * s)


def test_s1_trace_is_n_v_squared():
    for n in (2, 7, 30):
        assert exact_trace_moment(wigner_spec(RAD, n), 1).total == n * Fraction(1, 4)


def test_s2_closed_form():
    for n in range(1, 12):
        spec = wigner_spec(RAD, n)
        expect = trace_moment_formula_s2(spec)
        assert exact_trace_moment(spec, 2).total == expect
        assert expect == RAD.moment(4) + 2 * (n - 1) * Fraction(1, 16)
    assert exact_trace_moment(wigner_spec(RAD, 2), 2).total == Fraction(3, 16)


def test_odd_moments_vanish():
    # symmetric laws kill every odd edge moment; the full index-tuple sum for
    # an odd power must vanish identically
    from itertools import product

    spec = wigner_spec(RAD, 3)
    assert spec.edge_moment(3) == 0
    for power in (1, 3, 5):
        total = 0
        for tup in product(range(3), repeat=power):
            closed = tup + (tup[0],)
            passes = {}
            for t in range(power):
                a, b = closed[t], closed[t + 1]
                e = (a, b) if a <= b else (b, a)
                passes[e] = passes.get(e, 0) + 1
            w = Fraction(1)
            for (a, b), m in passes.items():
                w *= spec.edge_moment(m, a == b)
                if w == 0:
                    break
            total += w
        assert total == 0


def test_semicircle_convergence_rate():
    v = Fraction(1, 2)
    for s in (2, 3, 4):
        err = {}
        for n in (50, 100, 200):
            total = exact_trace_moment(wigner_spec(RAD, n), s).total
            err[n] = abs(Fraction(total, n) - semicircle_moment(2 * s, v))
        assert 1.4 <= float(err[50] / err[100]) <= 2.6
        assert 1.4 <= float(err[100] / err[200]) <= 2.6


def test_z_decomposition_parts_sum():
    spec = wigner_spec(RAD, 50)
    res = z_decomposition(spec, 3, delta=0.1)
    assert sum(res.z_parts.values()) == res.total
    assert res.total == exact_trace_moment(spec, 3).total
    assert res.z1_fraction >= 0.9


def test_z_decomposition_s1_small_n():
    # at s = 1 no multiple edges exist; with the threshold above 1 both walks
    # (including the loop walk, a root self-intersection) land in Z1
    res = z_decomposition(wigner_spec(RAD, 2), 1, delta=0.1)
    assert res.z_parts[1] == res.total
    assert res.z_parts[2] == res.z_parts[3] == res.z_parts[4] == 0


def test_default_constants():
    assert DEFAULT_C1 == pytest.approx(2 * math.e)
    # C1 really is the supremum of 2k / (k!)^(1/k): increasing toward 2e
    seq = [2 * k * math.exp(-math.lgamma(k + 1) / k) for k in range(2, 2000)]
    assert all(x < DEFAULT_C1 for x in seq)
    assert seq[-1] > DEFAULT_C1 - 0.02
    assert all(b > a for a, b in zip(seq, seq[1:]))
    assert default_c0(1.0) == pytest.approx(math.e * (1 + 8 * 4 * math.e**2))


def test_truncated_moments_rademacher():
    tr = TruncationSpec(RademacherLaw(Fraction(1)), delta=0.05)
    for n in (10, 100):
        vals = truncated_moments(tr, n, max_order=12)
        assert all(v == 1 for v in vals)


def test_truncated_moments_gaussian_quadrature_and_mc():
    law = GaussianLaw(Fraction(1))
    cutoff = 2.0
    closed = law.truncated_moment(2, cutoff)
    quad = quadrature_moment(
        lambda x: math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi), 2, cutoff
    )
    assert closed == pytest.approx(quad, rel=1e-10)
    rng = np.random.Generator(np.random.Philox(key=np.array([7, 0], dtype=np.uint64)))
    sample = rng.standard_normal(10_000_000)
    est = np.mean(np.where(np.abs(sample) <= cutoff, sample**2, 0.0))
    se = np.std(np.where(np.abs(sample) <= cutoff, sample**2, 0.0)) / math.sqrt(len(sample))
    assert abs(est - closed) <= 3 * se
    # higher orders against quadrature
    for order in (4, 6, 8):
        q = quadrature_moment(
            lambda x: math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi), order, cutoff
        )
        assert law.truncated_moment(order, cutoff) == pytest.approx(q, rel=1e-10)


def test_truncated_moments_monotone_in_n():
    law = PowerTailLaw(v=1.0, gamma=24.0)
    tr = TruncationSpec(law, delta=0.05, delta0=0.5)
    prev = None
    for n in (20, 80, 320, 1280):
        vals = truncated_moments(tr, n, max_order=12)
        assert all(v <= law.moment(2 * (i + 1)) + 1e-12 for i, v in enumerate(vals))
        if prev is not None:
            assert all(b >= a - 1e-15 for a, b in zip(prev, vals))
        prev = vals
    # power-tail closed form against quadrature
    x0, g = law.x0, law.gamma
    for order in (2, 6, 12):
        q = quadrature_moment(
            lambda x: 0.5 * g * x0**g / x ** (g + 1) if x >= x0 else 0.0, order, 5.0
        )
        assert law.truncated_moment(order, 5.0) == pytest.approx(q, rel=1e-9)


def test_power_tail_moment_condition():
    law = PowerTailLaw(v=1.0, gamma=24.0)
    assert law.abs_moment(13) < math.inf  # 12 + 2 delta0 with delta0 = 0.5
    assert law.moment(2) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        law.abs_moment(25)


def test_weight_bound_exhaustive_hypothesis_laws():
    # n = 1000 keeps the truncation level above the three-point spikes, so the
    # truncated moment chain 1 <= V4 <= ... <= V12 is intact
    for law in (ThreePointLaw(), RademacherLaw(Fraction(1))):
        spec = truncated_spec(TruncationSpec(law, delta=0.05), 1000)
        for s in range(1, 5):
            for walk in cached_even_walks(s):
                res = weight_bound_check(walk, spec)
                assert res.precondition_ok
                assert res.passed, (law.name, walk)


def test_weight_bound_tree_walks_tight():
    spec = truncated_spec(TruncationSpec(ThreePointLaw(), delta=0.05), 1000)
    from wignerlab.walks import Walk

    res = weight_bound_check(Walk((1, 2, 3, 2, 1)), spec)
    assert res.passed and res.nu_profile == {}
    assert res.lhs <= Fraction(1, 4) ** 2  # v^(2s) with v^2 = 1/4


def test_weight_bound_refuses_outside_hypotheses():
    # Rademacher at v = 1/2 has V4 = 1/16 < 1: the moment chain fails and the
    # bound is not claimed there (it would in fact be violated)
    spec = truncated_spec(TruncationSpec(RademacherLaw(Fraction(1, 2)), delta=0.05), 100)
    res = weight_bound_check(cached_even_walks(2)[0], spec)
    assert not res.precondition_ok


def test_dilute_lower_bound_grid():
    law = GaussianLaw(Fraction(1, 2))
    for s in (3, 4):
        for n in (40,):
            for c in (5, 20):
                total = exact_trace_moment(dilute_spec(law, n, c), s).total
                assert total >= dilute_lower_bound(law, n, c, s)


def test_dilute_spec_validation():
    with pytest.raises(ValueError):
        dilute_spec(RAD, 10, 11)


def test_by_nu_weight_breakdown_matches_per_walk_sum():
    # recompute the breakdown walk by walk, independently of the shape cache
    from wignerlab.walks import analyze, cached_even_walks

    spec = wigner_spec(RAD, 7)
    s = 3
    expect: dict[int, Fraction] = {}
    for walk in cached_even_walks(s):
        an = analyze(walk)
        w = Fraction(1)
        for (a, b), m in an.frame_passes.items():
            w *= spec.edge_moment(m, a == b)
        ff = 1
        for i in range(walk.n_vertices):
            ff *= spec.n - i
        if w * ff == 0:
            continue
        nu1 = an.nu_weight()
        expect[nu1] = expect.get(nu1, Fraction(0)) + w * ff
    res = exact_trace_moment(spec, s)
    assert res.by_nu_weight == expect
    assert sum(expect.values()) == res.total


def test_moment_result_serialization():
    res = z_decomposition(wigner_spec(RAD, 20), 2, delta=0.1)
    d = res.to_dict()
    assert d["total_exact"] == str(res.total)
    assert set(d["z_parts"]) == {"1", "2", "3", "4"}


def test_z_decomposition_exercises_z2_and_z3():
    # small n with a tight degree cut pushes multiple-edge walks into Z3;
    # a loose cut pulls the same weight into Z2. The total never moves.
    spec = wigner_spec(RAD, 5)
    tight = z_decomposition(spec, 4, delta=0.05, c0=50.0)
    loose = z_decomposition(spec, 4, delta=0.95, c0=50.0)
    assert tight.total == loose.total == exact_trace_moment(spec, 4).total
    assert tight.z_parts[3] > 0 and loose.z_parts[2] > 0
    assert tight.z_parts[2] + tight.z_parts[3] == loose.z_parts[2] + loose.z_parts[3]
    # a tiny census constant sends self-intersecting walks to Z4
    strict = z_decomposition(spec, 4, delta=0.5, c0=1e-9)
    assert strict.z_parts[4] > 0
    assert sum(strict.z_parts.values()) == strict.total


def test_walk_sum_identity_for_arbitrary_moment_assignments():
    # the walk sum against the index-tuple sum is a formal identity: it must
    # hold for any assignment of even edge moments, not only true moments
    from hypothesis import given, settings
    from hypothesis import strategies as st
    from wignerlab.laws import CustomMomentLaw

    @settings(max_examples=25, deadline=None)
    @given(
        st.integers(1, 3),
        st.integers(1, 3),
        st.lists(st.fractions(min_value=-3, max_value=3), min_size=3, max_size=3),
    )
    def inner(n, s, ms):
        law = CustomMomentLaw(even_moments=tuple(ms))
        spec = wigner_spec(law, n)
        assert exact_trace_moment(spec, s).total == brute_force_trace_moment(spec, s)

    inner()
