"""Shared verification suites behind the acceptance tests and `verify`.

Each suite returns a SuiteResult whose checks are (name, ok, detail) rows;
the CLI prints one line per criterion and exits nonzero on any failure, the
test suite asserts on the same objects.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import classes as cls
from . import dyck, moments, series
from .laws import GaussianLaw, PowerTailLaw, RademacherLaw, ThreePointLaw
from .walks import (
    Walk,
    analyze,
    cached_even_walks,
    verify_exit_degree_tree_link,
    verify_vertex_ledger,
    verify_cell_bounds,
)

W14 = Walk((1, 2, 3, 4, 3, 5, 2, 3, 4, 3, 2, 5, 3, 2, 1))


@dataclass
class SuiteResult:
    name: str
    checks: list[tuple[str, bool, str]] = field(default_factory=list)
    elapsed: float = 0.0

    def add(self, label: str, ok: bool, detail: str = "") -> None:
        self.checks.append((label, bool(ok), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list[tuple[str, str]]:
        return [(label, detail) for label, ok, detail in self.checks if not ok]

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name} ({len(self.checks)} checks, {self.elapsed:.1f}s)"


def _timed(fn):
    def wrapper(*args, **kwargs) -> SuiteResult:
        t0 = time.time()
        res = fn(*args, **kwargs)
        res.elapsed = time.time() - t0
        return res

    return wrapper


@_timed
def criterion_1_catalan(k_max: int = 12) -> SuiteResult:
    res = SuiteResult("1 catalan suite")
    ok = all(
        dyck.catalan(k) == sum(dyck.catalan(j) * dyck.catalan(k - 1 - j) for j in range(k))
        for k in range(1, k_max + 1)
    )
    res.add("main recurrence", ok)
    enum_max = min(k_max, 12)
    res.add(
        "enumeration counts",
        all(len(dyck.enumerate_dyck(k)) == dyck.catalan(k) for k in range(enum_max + 1)),
    )
    res.add(
        "root degree 2 equals t_(s-1)",
        all(dyck.count_trees_root_degree(s, 2) == dyck.catalan(s - 1) for s in range(2, k_max + 1)),
    )
    rec_ok = True
    for s in range(1, k_max + 1):
        for d in range(2, s + 1):
            lhs = dyck.count_trees_root_degree(s, d)
            rhs = dyck.count_trees_root_degree(s, d - 1) - (
                dyck.count_trees_root_degree(s - 1, d - 2) if s >= 1 else 0
            )
            rec_ok = rec_ok and lhs == rhs
    res.add("root-degree recurrence", rec_ok)
    res.add(
        "root degrees sum to t_s",
        all(
            sum(dyck.count_trees_root_degree(s, d) for d in range(0, s + 1)) == dyck.catalan(s)
            for s in range(k_max + 1)
        ),
    )
    return res


@_timed
def criterion_2_exit_degree_tail(s_max: int = 12) -> SuiteResult:
    res = SuiteResult("2 exit-degree tail bound")
    worst = None
    ok = True
    for s in range(2, s_max + 1):
        for d in range(2, s + 1):
            exact_ge = dyck.count_trees_with_exit_degree_ge(s, d)
            exact_eq = dyck.count_trees_with_exit_degree_eq(s, d)
            bound = dyck.exit_degree_tail_bound(s, d)
            if exact_ge > bound or exact_eq > exact_ge:
                ok = False
                worst = (s, d, exact_ge, bound)
    res.add("exact <= (2s+1)(3/4)^(d-2) t_s", ok, detail=str(worst) if worst else "")
    return res


@_timed
def criterion_3_genfun(order: int = 40, brute_s: int = 10, nm_s: int = 12) -> SuiteResult:
    res = SuiteResult("3 generating-function identities")
    ids = series.check_catalan_identities(order)
    res.add("t phi^2 = phi - 1", ids["t_phi_sq"])
    res.add("t phi' = invsqrt - phi", ids["t_phi_prime"])
    res.add(
        "invsqrt coefficients (k+1) t_k",
        all(
            series.invsqrt_one_minus_4t(order)[k] == (k + 1) * dyck.catalan(k)
            for k in range(order + 1)
        ),
    )
    res.add(
        "n2 closed form integral and matches brute force",
        all(series.n2_count(s) == series.brute_force_same_cluster_pairs(s) for s in range(brute_s + 1)),
    )
    res.add(
        "n2 series matches counts",
        all(series.n2_series(nm_s)[s] == series.n2_count(s) for s in range(nm_s + 1)),
    )
    res.add(
        "nm convolution agrees with n2 at m=2",
        all(series.nm_count(2, s) == series.n2_count(s) for s in range(2, nm_s + 1)),
    )
    res.add(
        "nm bound 2^m s t_s",
        all(
            series.nm_count(m, s) <= series.nm_bound(m, s)
            for m in range(2, 6)
            for s in range(m, nm_s + 1)
        ),
    )
    return res


@_timed
def criterion_4_walk_structure(s_max: int = 5) -> SuiteResult:
    res = SuiteResult("4 walk structure suite")
    balance = kappa = partition = bts_open = l52 = l55 = dyckp = literal = treelink = True
    for s in range(s_max + 1):
        for walk in cached_even_walks(s):
            an = analyze(walk)
            n_marked = sum(an.marked)
            balance &= n_marked == s and walk.n_steps - n_marked == s
            kappa &= all(
                an.kappa_mu[v] <= an.kappa_nu[v] for v in an.vertices
            )
            n_classified = len(an.mu_edges) + len(an.p_edges) + sum(an.q_counts)
            partition &= n_classified == s
            bts_open &= set(an.bts_instants) <= set(an.open_instants)
            l52 &= verify_vertex_ledger(walk, an).passed
            l55 &= verify_cell_bounds(walk, an).passed
            treelink &= verify_exit_degree_tree_link(walk, an).passed
            dyckp &= an.theta is not None and an.theta.k == s
            for v in an.vertices:
                lit = len(an.reduced_nonmarked_arrivals[v])
                literal &= lit <= an.bts_remote(v) + an.kappa_nu[v]
    res.add("marked/non-marked balance", balance)
    res.add("kappa_mu <= kappa_nu", kappa)
    res.add("mu/p/q partition of marked steps", partition)
    res.add("BTS instants are open self-intersections", bts_open)
    res.add("walk projects to a Dyck path", dyckp)
    res.add("vertex in/out ledger and open-edge bounds", l52)
    res.add("imported-cell count bounds", l55)
    res.add("cells bound holds for unfiltered reduced arrivals too", literal)
    res.add("exit clusters fit the cell bound on the underlying tree", treelink)
    return res


@_timed
def criterion_5_worked_example() -> SuiteResult:
    res = SuiteResult("5 worked example walk")
    an = analyze(W14)
    res.add("kappa_nu(a2) = 3", an.kappa_nu[2] == 3)
    res.add("kappa_nu(a4) = 2", an.kappa_nu[4] == 2)
    res.add("open instants {6, 10}", an.open_instants == (6, 10))
    res.add("BTS instants {6, 10}", an.bts_instants == (6, 10))
    res.add(
        "mu class mu1=4 mu2=0 mu3=1",
        an.mu_profile() == {1: 4, 3: 1},
    )
    res.add("one p-edge, no q-edges", an.p_count == 1 and an.q_counts == ())
    res.add("one double mu-edge", an.double_mu_count == 1)
    res.add("a3 primary cell at t=2", an.primary_cells[3] == (2,))
    res.add("a3 imported cell at t=7", an.imported_cells[3] == (7,))
    return res


@_timed
def criterion_6_class_bounds(s_max: int = 5, k0: int = 4) -> SuiteResult:
    res = SuiteResult("6 class-bound domination")
    nu_ok = mu_ok = census_ok = True
    detail = ""
    for s in range(1, s_max + 1):
        total = len(cached_even_walks(s))
        census_ok &= sum(cls.nu_census(s).values()) == total
        census_ok &= sum(cls.mu_census(s).values()) == total
        for row in cls.nu_domination_report(s):
            if row.bound is not None and row.exact > row.bound:
                nu_ok = False
                detail = f"s={s} {row.signature}"
        for row in cls.mu_domination_report(s, k0):
            if row.bound is not None and row.exact > row.bound:
                mu_ok = False
                detail = f"s={s} {row.signature}"
    res.add("nu classes: exact <= bound", nu_ok, detail)
    res.add("mu classes: exact <= bound", mu_ok, detail)
    res.add("class sizes partition the walk census", census_ok)
    psi3 = cls.psi_bound(3, {2: 1})
    psi4 = cls.psi_bound(4, {2: 2})
    res.add(
        "psi examples",
        psi3 == (Fraction(3), Fraction(9, 2)) and psi4 == (Fraction(3), Fraction(32)),
    )
    return res


@_timed
def criterion_7_moment_oracle(n_max: int = 4, s_max: int = 4) -> SuiteResult:
    res = SuiteResult("7 trace-moment oracle equivalence")
    rad = RademacherLaw(Fraction(1, 2))
    gau = GaussianLaw(Fraction(1, 2))
    specs = []
    for n in range(1, n_max + 1):
        specs.append((f"wigner-rademacher n={n}", moments.wigner_spec(rad, n)))
        specs.append((f"wigner-gaussian n={n}", moments.wigner_spec(gau, n)))
        specs.append(
            (
                f"goe n={n}",
                moments.MomentSpec(n=n, law=gau, kind="goe"),
            )
        )
        specs.append(
            (
                f"truncated n={n}",
                moments.truncated_spec(
                    moments.TruncationSpec(ThreePointLaw(), delta=0.05), n
                ),
            )
        )
        for c in (1, max(1, n // 2), n):
            specs.append((f"dilute n={n} c={c}", moments.dilute_spec(rad, n, c)))
    ok = True
    detail = ""
    for label, spec in specs:
        for s in range(1, s_max + 1):
            walk_sum = moments.exact_trace_moment(spec, s).total
            brute = moments.brute_force_trace_moment(spec, s)
            if walk_sum != brute:
                ok = False
                detail = f"{label} s={s}: {walk_sum} != {brute}"
    res.add("walk sum equals index-tuple brute force (exact)", ok, detail)
    res.add(
        "n=1 collapses to V_2s",
        all(
            moments.exact_trace_moment(moments.wigner_spec(rad, 1), s).total
            == rad.moment(2 * s)
            for s in range(1, s_max + 1)
        ),
    )
    res.add(
        "s=2 closed form V4 + 2(n-1) v^4",
        all(
            moments.exact_trace_moment(moments.wigner_spec(rad, n), 2).total
            == moments.trace_moment_formula_s2(moments.wigner_spec(rad, n))
            for n in range(1, 10)
        ),
    )
    return res


@_timed
def criterion_8_semicircle(s_list=(2, 3, 4)) -> SuiteResult:
    res = SuiteResult("8 semicircle convergence")
    rad = RademacherLaw(Fraction(1, 2))
    v = Fraction(1, 2)
    ok = True
    detail = ""
    for s in s_list:
        err = {}
        for n in (100, 200):
            total = moments.exact_trace_moment(moments.wigner_spec(rad, n), s).total
            err[n] = abs(Fraction(total, n) - moments.semicircle_moment(2 * s, v))
        ratio = float(err[100] / err[200])
        if not 1.4 <= ratio <= 2.6:
            ok = False
            detail = f"s={s}: ratio {ratio:.3f}"
    res.add("error halves from n=100 to n=200", ok, detail)
    exact_s1 = all(
        moments.exact_trace_moment(moments.wigner_spec(rad, n), 1).total == n * v * v
        for n in (100, 200)
    )
    res.add("s=1 normalized moment is exactly m_2", exact_s1)
    return res


@_timed
def criterion_10_excursion() -> SuiteResult:
    res = SuiteResult("10 excursion functional")
    res.add(
        "B_k(0) = 1 exactly",
        all(dyck.excursion_functional(k, 0.0) == 1.0 for k in (1, 7, 50, 400)),
    )
    taus = (0.25, 0.5, 1.0, 2.0, 3.0)
    res.add(
        "strictly increasing in tau",
        all(
            dyck.excursion_functional(100, a) < dyck.excursion_functional(100, b)
            for a, b in zip(taus, taus[1:])
        ),
    )
    res.add(
        "nondecreasing in k",
        all(
            dyck.excursion_functional(k1, 1.0) <= dyck.excursion_functional(k2, 1.0)
            for k1, k2 in ((50, 100), (100, 200), (200, 400))
        ),
    )
    for tau in (0.5, 1.0, 2.0):
        b200 = dyck.excursion_functional(200, tau)
        b400 = dyck.excursion_functional(400, tau)
        rel = abs(b400 - b200) / b400
        res.add(
            f"stabilization at tau={tau}: |B400-B200| <= 0.05 B400",
            rel <= 0.05,
            f"relative gap {rel:.4f}",
        )
    ratio = dyck.mean_max_height(2000) / math.sqrt(2000)
    rel = abs(ratio - math.sqrt(math.pi)) / math.sqrt(math.pi)
    res.add("mean height ratio at k=2000 within 2% of sqrt(pi)", rel <= 0.02, f"rel {rel:.4f}")
    return res


@_timed
def criterion_11_dilute(
    s_list=(3, 4, 5), n_list=(40, 80), c_list=(5, 10, 20)
) -> SuiteResult:
    res = SuiteResult("11 dilute lower bound")
    law = GaussianLaw(Fraction(1, 2))
    ok = True
    detail = ""
    for s in s_list:
        for n in n_list:
            for c in c_list:
                total = moments.exact_trace_moment(moments.dilute_spec(law, n, c), s).total
                bound = moments.dilute_lower_bound(law, n, c, s)
                if total < bound:
                    ok = False
                    detail = f"s={s} n={n} c={c}: {float(total):.4f} < {float(bound):.4f}"
    res.add("exact dilute moment >= n m_2s (1 + (s-3) V4 / c)", ok, detail)
    return res


VERIFY_SUITES = {
    1: criterion_1_catalan,
    2: criterion_2_exit_degree_tail,
    3: criterion_3_genfun,
    4: criterion_4_walk_structure,
    5: criterion_5_worked_example,
    6: criterion_6_class_bounds,
    7: criterion_7_moment_oracle,
    10: criterion_10_excursion,
    11: criterion_11_dilute,
}


def run_verify_suites(max_halfsteps: int = 5, k0: int = 4) -> list[SuiteResult]:
    """The identity/bound suites behind `verify` (the exact, seedless criteria)."""
    s_cap = min(max_halfsteps, 6)
    return [
        criterion_1_catalan(),
        criterion_2_exit_degree_tail(),
        criterion_3_genfun(),
        criterion_4_walk_structure(s_max=s_cap),
        criterion_5_worked_example(),
        criterion_6_class_bounds(s_max=s_cap, k0=k0),
        criterion_7_moment_oracle(),
        criterion_10_excursion(),
        criterion_11_dilute(),
    ]
