"""Walk equivalence classes and the exact-vs-bound counting machinery.

Walks are grouped by their underlying Dyck path together with either the
self-intersection profile (nu classes, with open/simple-double refinements)
or the last-marked-passage profile (mu classes, with p-edges, double
mu-edges and layered q-edges). Each class carries a closed-form counting
bound; exhaustive enumeration provides the exact cardinalities the bounds
are checked against. All bounds are exact rationals so comparisons never
suffer rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BoundPreconditionError
from .walks import ROOT, Walk, WalkAnalysis, analyze, cached_even_walks


@dataclass(frozen=True)
class NuSignature:
    """Class key: Dyck path, nu profile (k >= 2), open/double-simple counts.

    The root enters the nu profile with its +1 convention; root_kappa and
    root_open keep enough information to evaluate the counting bound with the
    root's true number of marked-arrival windows (one less than its degree).
    """

    theta: tuple[int, ...] | None
    nu: tuple[tuple[int, int], ...]
    r: int
    p: int
    d: int
    root_kappa: int = 1
    root_open: bool = False

    def nu_dict(self) -> dict[int, int]:
        return dict(self.nu)


@dataclass(frozen=True)
class MuSignature:
    """Class key: Dyck path, mu profile (m >= 1), p/double-mu/q-layer counts."""

    theta: tuple[int, ...] | None
    mu: tuple[tuple[int, int], ...]
    p_count: int
    double_mu: int
    q_counts: tuple[int, ...]
    r: int
    d: int
    max_kappa_nu: int

    def mu_dict(self) -> dict[int, int]:
        return dict(self.mu)


def _sparse(profile: dict[int, int]) -> tuple[tuple[int, int], ...]:
    return tuple(sorted((k, c) for k, c in profile.items() if c))


def classify_nu(walk: Walk, analysis: WalkAnalysis | None = None) -> NuSignature:
    """Self-intersection signature of a walk.

    r counts simple self-intersections whose closing arrival is open; p counts
    the remaining simple ones whose two arrivals ride the same oriented edge
    (the same-orientation double edges). Open wins when both apply.
    """
    an = analysis or analyze(walk)
    r = 0
    p = 0
    for v, kappa in an.kappa_nu.items():
        if kappa != 2:
            continue
        arrivals = an.marked_arrivals[v]
        closing = arrivals[-1] if arrivals else None
        if closing is not None and closing in an.open_by_vertex[v]:
            r += 1
        elif v != ROOT and len(arrivals) == 2:
            lab = walk.labels
            if lab[arrivals[0] - 1] == lab[arrivals[1] - 1]:
                p += 1
    theta = tuple(an.theta.steps) if an.theta is not None else None
    root_kappa = an.kappa_nu.get(ROOT, 1)
    root_open = bool(
        an.marked_arrivals[ROOT]
        and an.marked_arrivals[ROOT][-1] in an.open_by_vertex[ROOT]
    )
    return NuSignature(
        theta=theta,
        nu=_sparse(an.nu_profile()),
        r=r,
        p=p,
        d=an.max_exit_degree,
        root_kappa=root_kappa,
        root_open=root_open,
    )


def classify_mu(walk: Walk, analysis: WalkAnalysis | None = None) -> MuSignature:
    """Modified signature built on the mu-structure.

    r here counts only the open simple nu-intersections realized as double
    mu-arrivals (kappa_mu = 2); an open simple vertex whose second arrival is
    a p-edge is charged to the p-window instead, which is what the counting
    bound's (mu_2 - r)! factor requires.
    """
    an = analysis or analyze(walk)
    r = 0
    for v, kappa in an.kappa_nu.items():
        if kappa != 2 or an.kappa_mu[v] != 2:
            continue
        arrivals = an.marked_arrivals[v]
        if arrivals and arrivals[-1] in an.open_by_vertex[v]:
            r += 1
    theta = tuple(an.theta.steps) if an.theta is not None else None
    return MuSignature(
        theta=theta,
        mu=_sparse(an.mu_profile()),
        p_count=an.p_count,
        double_mu=an.double_mu_count,
        q_counts=an.q_counts,
        r=r,
        d=an.max_exit_degree,
        max_kappa_nu=max(an.kappa_nu.values(), default=1),
    )


# ---------------------------------------------------------------------------
# Partition counting and bounds.


def psi_exact(s: int, nu: dict[int, int]) -> Fraction:
    """Number of ways to partition s labelled marked instants into the nu plets.

    s! / ((s - sum k nu_k)! * prod (k!)^{nu_k} nu_k!).
    """
    used = sum(k * c for k, c in nu.items())
    if used > s:
        raise BoundPreconditionError(f"infeasible nu profile: uses {used} > s={s}")
    denom = math.factorial(s - used)
    for k, c in nu.items():
        denom *= math.factorial(k) ** c * math.factorial(c)
    return Fraction(math.factorial(s), denom)


def psi_product_bound(s: int, nu: dict[int, int]) -> Fraction:
    """prod_k (s^k / k!)^{nu_k} / nu_k!, the product relaxation of psi_exact."""
    used = sum(k * c for k, c in nu.items())
    if used > s:
        raise BoundPreconditionError(f"infeasible nu profile: uses {used} > s={s}")
    out = Fraction(1)
    for k, c in nu.items():
        out *= Fraction(s**k, math.factorial(k)) ** c / math.factorial(c)
    return out


def psi_bound(s: int, nu: dict[int, int]) -> tuple[Fraction, Fraction]:
    """(exact multinomial, product upper bound); exact <= bound always."""
    return psi_exact(s, nu), psi_product_bound(s, nu)


def psi_exact_with_root(s: int, nu: dict[int, int], n_root: int) -> Fraction:
    """Partition count with the root's N marked arrivals kept as a separate plet."""
    used = sum(k * c for k, c in nu.items()) + n_root
    if used > s:
        raise BoundPreconditionError("infeasible nu profile with root arrivals")
    denom = math.factorial(s - used) * math.factorial(n_root)
    for k, c in nu.items():
        denom *= math.factorial(k) ** c * math.factorial(c)
    return Fraction(math.factorial(s), denom)


def upsilon_nu(k: int) -> int:
    """Exit-prescription bound (2k)^k used for self-intersections of degree k >= 3."""
    return (2 * k) ** k


def ss_bound(s: int, sig: NuSignature, h_theta: int) -> Fraction:
    """Counting bound for a nu class with max exit degree capped by sig.d.

    Non-root vertices get the usual window factors; the root, when it is a
    self-intersection, is unfolded to its true window count N = kappa - 1
    (partition factor s^N / N!, openness refinement for N = 1, general exit
    prescription for N >= 2), which keeps the bound valid at small s where
    folding the root into the nu profile undercounts.
    """
    nu = sig.nu_dict()
    root_simple_open = sig.root_open and sig.root_kappa == 2
    if sig.root_kappa >= 2:
        nu[sig.root_kappa] = nu.get(sig.root_kappa, 0) - 1
        if nu[sig.root_kappa] < 0:
            raise BoundPreconditionError("root degree missing from nu profile")
        if nu[sig.root_kappa] == 0:
            del nu[sig.root_kappa]
    r_nonroot = sig.r - (1 if root_simple_open else 0)
    plain = nu.get(2, 0) - r_nonroot - sig.p
    if plain < 0 or r_nonroot < 0:
        raise BoundPreconditionError("r + p exceeds nu_2")
    out = Fraction(s**2, 2) ** plain / math.factorial(plain)
    out *= Fraction(6 * s * h_theta) ** r_nonroot / math.factorial(r_nonroot)
    out *= Fraction(s * sig.d) ** sig.p / math.factorial(sig.p)
    for k, c in nu.items():
        if k >= 3:
            out *= Fraction(s**k * upsilon_nu(k), math.factorial(k)) ** c / math.factorial(c)
    n_root = sig.root_kappa - 1
    if n_root == 1:
        out *= Fraction(6 * h_theta) if sig.root_open else Fraction(s)
    elif n_root >= 2:
        out *= Fraction(s**n_root, math.factorial(n_root)) * upsilon_nu(n_root + 1)
    return out


def mu_bound(s: int, sig: MuSignature, k0: int) -> Fraction:
    """Counting bound for a mu class with max exit degree equal to sig.d.

    Refuses outside its hypotheses: the mu weight sum_(m>=2) (m-1) mu_m must
    not exceed (s-1)/6 and every nu self-intersection degree must be <= k0.
    """
    mu = sig.mu_dict()
    mu_weight = sum((m - 1) * c for m, c in mu.items() if m >= 2)
    if Fraction(mu_weight) > Fraction(s - 1, 6):
        raise BoundPreconditionError(
            f"|mu|_1 = {mu_weight} exceeds (s-1)/6 = {Fraction(s-1,6)}"
        )
    if sig.max_kappa_nu > k0:
        raise BoundPreconditionError(
            f"kappa_nu reaches {sig.max_kappa_nu} > k0 = {k0}"
        )
    h = DyckHeight(sig.theta) if sig.theta else 0
    mu2 = mu.get(2, 0)
    plain = mu2 - sig.r
    if plain < 0:
        raise BoundPreconditionError("r exceeds mu_2")
    d = sig.d
    out = Fraction(s**2, 2) ** plain / math.factorial(plain)
    out *= Fraction(2 * s * h) ** sig.r / math.factorial(sig.r)
    for m, c in mu.items():
        if 3 <= m <= k0:
            out *= Fraction(s**m, math.factorial(m)) ** c / math.factorial(c)
    pp, ppp = sig.p_count, sig.double_mu
    out *= Fraction(s * d) ** pp / math.factorial(pp)
    out *= Fraction(mu_weight * d, s) ** ppp / math.factorial(ppp)
    q = sig.q_counts
    if q:
        out *= Fraction((pp + ppp) * d) ** q[0] / math.factorial(q[0])
        for j in range(1, len(q)):
            out *= Fraction(q[j - 1] * d) ** q[j] / math.factorial(q[j])
    out *= upsilon_mu(sig, k0)
    return out


def upsilon_mu(sig: MuSignature, k0: int) -> int:
    """3^r (2 k0)^(4P' + |Q|) 2^(6 mu_3) prod_(m>=4) (2 k0)^(m mu_m)."""
    mu = sig.mu_dict()
    out = 3**sig.r
    out *= (2 * k0) ** (4 * sig.p_count + sum(sig.q_counts))
    out *= 2 ** (6 * mu.get(3, 0))
    for m, c in mu.items():
        if 4 <= m <= k0:
            out *= (2 * k0) ** (m * c)
    return out


def DyckHeight(theta: tuple[int, ...]) -> int:
    height = 0
    best = 0
    for st in theta:
        height += st
        if height > best:
            best = height
    return best


# ---------------------------------------------------------------------------
# Exhaustive census.


@dataclass
class ClassCensusRow:
    signature: object
    exact: int
    bound: Fraction | None
    note: str = ""

    @property
    def slack(self) -> float | None:
        if self.bound is None or self.exact == 0:
            return None
        return float(Fraction(self.bound) / self.exact)


def nu_census(s: int, ceiling: int | None = None) -> dict[NuSignature, int]:
    """Exact cardinality of every realized nu class among even walks of 2s steps."""
    kwargs = {} if ceiling is None else {"ceiling": ceiling}
    census: dict[NuSignature, int] = {}
    for walk in cached_even_walks(s, **kwargs):
        sig = classify_nu(walk)
        census[sig] = census.get(sig, 0) + 1
    return census


def mu_census(s: int, ceiling: int | None = None) -> dict[MuSignature, int]:
    kwargs = {} if ceiling is None else {"ceiling": ceiling}
    census: dict[MuSignature, int] = {}
    for walk in cached_even_walks(s, **kwargs):
        sig = classify_mu(walk)
        census[sig] = census.get(sig, 0) + 1
    return census


def exact_class_size(s: int, signature: NuSignature | MuSignature) -> int:
    """Count enumerated walks matching the signature.

    A None theta in the signature matches any Dyck path (aggregate count).
    Formally infeasible signatures simply match nothing and count 0.
    """
    total = 0
    for walk in cached_even_walks(s):
        an = analyze(walk)
        if isinstance(signature, NuSignature):
            sig = classify_nu(walk, an)
            if (
                (signature.theta is None or sig.theta == signature.theta)
                and sig.nu == signature.nu
                and sig.r == signature.r
                and sig.p == signature.p
                and sig.d <= signature.d
            ):
                total += 1
        else:
            sig = classify_mu(walk, an)
            if (
                (signature.theta is None or sig.theta == signature.theta)
                and sig.mu == signature.mu
                and sig.p_count == signature.p_count
                and sig.double_mu == signature.double_mu
                and sig.q_counts == signature.q_counts
                and sig.r == signature.r
                and sig.d == signature.d
            ):
                total += 1
    return total


def nu_domination_report(s: int) -> list[ClassCensusRow]:
    """exact <= ss_bound for every realized (theta, nu, r, p) at each realized d.

    The nu class bound caps the exit degree, so for a given key the exact
    count at cap d aggregates all walks of the key with max exit degree <= d.
    """
    census = nu_census(s)
    by_key: dict[tuple, dict[int, int]] = {}
    for sig, cnt in census.items():
        key = (sig.theta, sig.nu, sig.r, sig.p, sig.root_kappa, sig.root_open)
        by_key.setdefault(key, {})[sig.d] = by_key.setdefault(key, {}).get(sig.d, 0) + cnt
    rows: list[ClassCensusRow] = []
    for (theta, nu, r, p, rk, ro), d_counts in sorted(by_key.items()):
        h = DyckHeight(theta)
        running = 0
        for d in sorted(d_counts):
            running += d_counts[d]
            sig = NuSignature(theta=theta, nu=nu, r=r, p=p, d=d, root_kappa=rk, root_open=ro)
            rows.append(ClassCensusRow(sig, running, ss_bound(s, sig, h)))
    return rows


def mu_domination_report(s: int, k0: int = 4) -> list[ClassCensusRow]:
    """exact <= mu_bound on every realized mu signature satisfying the hypotheses."""
    rows: list[ClassCensusRow] = []
    for sig, cnt in sorted(mu_census(s).items(), key=lambda kv: repr(kv[0])):
        try:
            bound = mu_bound(s, sig, k0)
        except BoundPreconditionError as exc:
            rows.append(ClassCensusRow(sig, cnt, None, note=str(exc)))
            continue
        rows.append(ClassCensusRow(sig, cnt, bound))
    return rows


def census_csv_rows(s: int, k0: int = 4) -> list[dict]:
    """Flat census rows (both class families) for CSV emission."""
    out: list[dict] = []
    for row in nu_domination_report(s):
        sig = row.signature
        out.append(
            {
                "family": "nu",
                "s": s,
                "theta": "".join("U" if x == 1 else "D" for x in sig.theta),
                "profile": ";".join(f"{k}:{c}" for k, c in sig.nu),
                "r": sig.r,
                "p_or_Pp": sig.p,
                "Ppp": "",
                "Q": "",
                "d": sig.d,
                "exact": row.exact,
                "bound": "" if row.bound is None else str(row.bound),
                "slack": "" if row.slack is None else f"{row.slack:.6g}",
                "note": row.note,
            }
        )
    for row in mu_domination_report(s, k0):
        sig = row.signature
        out.append(
            {
                "family": "mu",
                "s": s,
                "theta": "".join("U" if x == 1 else "D" for x in sig.theta),
                "profile": ";".join(f"{m}:{c}" for m, c in sig.mu),
                "r": sig.r,
                "p_or_Pp": sig.p_count,
                "Ppp": sig.double_mu,
                "Q": ";".join(str(q) for q in sig.q_counts),
                "d": sig.d,
                "exact": row.exact,
                "bound": "" if row.bound is None else str(row.bound),
                "slack": "" if row.slack is None else f"{row.slack:.6g}",
                "note": row.note,
            }
        )
    return out
