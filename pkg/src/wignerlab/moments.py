"""Exact finite-(n, s) trace moments as weighted sums over canonical walks.

The trace of the 2s-th matrix power expands into a sum over index
trajectories; grouping trajectories by their canonical walk turns it into

    E Tr A^(2s) = sum_w [ prod_(frame edges) edge_moment(passes) ] * n(n-1)...(n-|V(w)|+1).

The per-edge moment function carries the whole ensemble (entry law,
truncation, dilution and the matrix normalization), so one enumeration
serves every ensemble. A brute-force sum over all n^(2s) index tuples is
kept alongside as the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .errors import BoundPreconditionError
from .laws import GoeLaw, RademacherLaw
from .walks import Walk, WalkAnalysis, analyze, cached_even_walks

#: C1 = sup over k >= 2 of 2k / (k!)^(1/k); the supremum is the k -> infinity
#: limit 2e (the sequence increases to it, not attaining it).
DEFAULT_C1 = 2 * math.e


def default_c0(v12: float, c1: float = DEFAULT_C1) -> float:
    """Smallest admissible census threshold constant, e (1 + 8 C1^2 V12)."""
    return math.e * (1 + 8 * c1 * c1 * float(v12))


@dataclass(frozen=True)
class TruncationSpec:
    """Entry truncation at U_n = n^(1/eta - delta); zero out larger entries."""

    law: object
    delta: float
    eta: float = 6.0
    delta0: float | None = None

    def __post_init__(self):
        if not 0 < self.delta < 1 / self.eta:
            raise ValueError("delta must lie in (0, 1/eta)")

    def cutoff(self, n: int) -> float:
        return float(n) ** (1 / self.eta - self.delta)


@dataclass(frozen=True)
class MomentSpec:
    """Per-frame-edge moment function for one ensemble at one dimension n."""

    n: int
    law: object
    kind: str = "wigner"
    truncation: TruncationSpec | None = None
    dilution_c: int | None = None

    def entry_moment(self, order: int, is_loop: bool = False):
        """Moment of the unscaled entry (truncated if configured)."""
        if order % 2:
            return 0
        if self.truncation is not None:
            base = self.truncation.law.truncated_moment(order, self.truncation.cutoff(self.n))
        else:
            base = self.law.moment(order)
        if is_loop and self.kind == "goe":
            # GOE doubles the diagonal variance: scale a ~ N(0, v^2) by sqrt(2)
            base = base * (2 ** (order // 2))
        return base

    def edge_moment(self, order: int, is_loop: bool = False):
        """Moment of the scaled matrix entry: E[(A_ij)^order]."""
        if order % 2:
            return 0
        base = self.entry_moment(order, is_loop)
        half = order // 2
        if self.dilution_c is not None:
            c = self.dilution_c
            return base * Fraction(c, self.n) / Fraction(c) ** half
        return base / Fraction(self.n) ** half

    def v_squared(self):
        return self.law.moment(2)

    def descriptor(self) -> dict:
        out = {"kind": self.kind, "n": self.n}
        out.update(self.law.descriptor())
        if self.truncation is not None:
            out["truncation"] = {
                "delta": self.truncation.delta,
                "eta": self.truncation.eta,
                "cutoff": self.truncation.cutoff(self.n),
            }
        if self.dilution_c is not None:
            out["dilution_c"] = self.dilution_c
        return out


def wigner_spec(law, n: int) -> MomentSpec:
    kind = "goe" if isinstance(law, GoeLaw) else "wigner"
    return MomentSpec(n=n, law=law, kind=kind)


def truncated_spec(trunc: TruncationSpec, n: int) -> MomentSpec:
    return MomentSpec(n=n, law=trunc.law, kind="truncated", truncation=trunc)


def dilute_spec(law, n: int, c: int) -> MomentSpec:
    if not 1 <= c <= n:
        raise ValueError("dilution concentration must satisfy 1 <= c <= n")
    return MomentSpec(n=n, law=law, kind="dilute", dilution_c=c)


def semicircle_moment(order: int, v):
    """Limiting normalized trace moment: v^(2k) Catalan(k) for order 2k, 0 odd.

    Exact when v is a Fraction or int, float otherwise.
    """
    if order % 2:
        return 0 if isinstance(v, (int, Fraction)) else 0.0
    k = order // 2
    cat = math.comb(2 * k, k) // (k + 1)
    if isinstance(v, (int, Fraction)):
        return Fraction(v) ** (2 * k) * cat
    return float(v) ** (2 * k) * cat


@dataclass
class MomentResult:
    """Trace moment with its per-class breakdown and the four-way split."""

    n: int
    s: int
    total: object
    by_nu_weight: dict[int, object] = field(default_factory=dict)
    z_parts: dict[int, object] | None = None
    c0: float | None = None
    delta: float | None = None
    descriptor: dict = field(default_factory=dict)

    @property
    def z1_fraction(self) -> float | None:
        if not self.z_parts or float(self.total) == 0:
            return None
        return float(self.z_parts[1]) / float(self.total)

    def normalized(self) -> float:
        return float(self.total) / self.n

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "s": self.s,
            "total": float(self.total),
            "total_exact": str(self.total),
            "normalized": self.normalized(),
            "by_nu_weight": {str(k): float(val) for k, val in sorted(self.by_nu_weight.items())},
        }
        if self.z_parts is not None:
            out["z_parts"] = {str(i): float(val) for i, val in sorted(self.z_parts.items())}
            out["z1_fraction"] = self.z1_fraction
            out["c0"] = self.c0
            out["delta"] = self.delta
        out["ensemble"] = self.descriptor
        return out


@lru_cache(maxsize=None)
def _walk_shapes(s: int) -> tuple[tuple[tuple, int, int, int, int], ...]:
    """Aggregated walk data: (edge profile, n_vertices, max_passes, D) -> count.

    The edge profile is the multiset of (pass count, is_loop) over frame
    edges; together with the vertex count it determines the walk's weight
    for any ensemble, so thousands of walks collapse to a few dozen rows.
    """
    groups: dict[tuple, int] = {}
    for walk in cached_even_walks(s):
        an = analyze(walk)
        profile = tuple(
            sorted((m, a == b) for (a, b), m in an.frame_passes.items())
        )
        key = (profile, walk.n_vertices, max((m for m, _ in profile), default=0), an.max_exit_degree)
        groups[key] = groups.get(key, 0) + 1
    return tuple((*key, cnt) for key, cnt in sorted(groups.items()))


def _falling(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


def exact_trace_moment(spec: MomentSpec, s: int) -> MomentResult:
    """E Tr A^(2s) as the exact weighted walk sum."""
    total = 0
    by_weight: dict[int, object] = {}
    for profile, nv, _maxm, _d, count in _walk_shapes(s):
        ff = _falling(spec.n, nv)
        if ff == 0:
            continue
        w = Fraction(1)
        for passes, is_loop in profile:
            w = w * spec.edge_moment(passes, is_loop)
            if w == 0:
                break
        if w == 0:
            continue
        contrib = count * w * ff
        total = total + contrib
        nu1 = s + 1 - nv
        by_weight[nu1] = by_weight.get(nu1, 0) + contrib
    return MomentResult(
        n=spec.n, s=s, total=total, by_nu_weight=by_weight, descriptor=spec.descriptor()
    )


def z_decomposition(
    spec: MomentSpec, s: int, delta: float, c0: float | None = None
) -> MomentResult:
    """Split the exact walk sum into the four census categories.

    Z1: no frame edge passed more than twice and small self-intersection
    weight; Z2/Z3: some multiple edge, split by max exit degree at n^delta;
    Z4: self-intersection weight above the threshold (strictly, so the four
    parts partition).
    """
    if c0 is None:
        c0 = default_c0(float(spec.entry_moment(12)))
    n = spec.n
    threshold = c0 * s * s / n
    degree_cut = n**delta
    parts: dict[int, object] = {1: 0, 2: 0, 3: 0, 4: 0}
    total = 0
    by_weight: dict[int, object] = {}
    for profile, nv, maxm, d, count in _walk_shapes(s):
        ff = _falling(n, nv)
        if ff == 0:
            continue
        w = Fraction(1)
        for passes, is_loop in profile:
            w = w * spec.edge_moment(passes, is_loop)
            if w == 0:
                break
        if w == 0:
            continue
        contrib = count * w * ff
        nu1 = s + 1 - nv
        if nu1 > threshold:
            idx = 4
        elif maxm <= 2:
            idx = 1
        elif d <= degree_cut:
            idx = 2
        else:
            idx = 3
        parts[idx] = parts[idx] + contrib
        total = total + contrib
        by_weight[nu1] = by_weight.get(nu1, 0) + contrib
    return MomentResult(
        n=n,
        s=s,
        total=total,
        by_nu_weight=by_weight,
        z_parts=parts,
        c0=c0,
        delta=delta,
        descriptor=spec.descriptor(),
    )


def brute_force_trace_moment(spec: MomentSpec, s: int, max_n: int = 4):
    """Oracle: sum E[a_{i0 i1} ... a_{i_{2s-1} i0}] over all n^(2s) index tuples."""
    n = spec.n
    if n > max_n:
        raise ValueError(f"brute force oracle limited to n <= {max_n}")
    total = 0
    for tup in product(range(n), repeat=2 * s):
        passes: dict[tuple[int, int], int] = {}
        closed = tup + (tup[0],)
        for t in range(2 * s):
            a, b = closed[t], closed[t + 1]
            e = (a, b) if a <= b else (b, a)
            passes[e] = passes.get(e, 0) + 1
        w = Fraction(1)
        for (a, b), m in passes.items():
            w = w * spec.edge_moment(m, a == b)
            if w == 0:
                break
        total = total + w
    return total


def trace_moment_formula_s2(spec: MomentSpec, symbolic_n=None):
    """Closed form at s = 2 for undiluted specs: V4_scaled + 2 (n-1) v^4-type check."""
    n = symbolic_n if symbolic_n is not None else spec.n
    v4 = spec.entry_moment(4)
    v2 = spec.entry_moment(2)
    return Fraction(v4) + 2 * (n - 1) * Fraction(v2) ** 2


def truncated_moments(trunc: TruncationSpec, n: int, max_order: int = 12) -> list:
    """V-hat_{2m} = E[a^{2m}; |a| <= U_n] for 2m = 2, 4, ..., max_order."""
    cutoff = trunc.cutoff(n)
    return [trunc.law.truncated_moment(order, cutoff) for order in range(2, max_order + 1, 2)]


@dataclass
class WeightBoundResult:
    passed: bool
    lhs: object
    rhs: object
    nu_profile: dict[int, int]
    precondition_ok: bool
    note: str = ""

    @property
    def slack(self) -> float | None:
        return float(self.rhs) / float(self.lhs) if float(self.lhs) else None


def weight_bound_check(
    walk: Walk, spec: MomentSpec, analysis: WalkAnalysis | None = None
) -> WeightBoundResult:
    """Coloring-argument bound on the unscaled walk weight.

    Checks  prod_edges Vhat_(passes) <= v^(2s) * prod_k (4 V12 (2 U_n)^(2(k-2)))^(nu_k)
    where nu_k is the walk's self-intersection profile. The bound is claimed
    under the moment hypotheses v^2 <= 1 <= V4 <= V6 <= ... <= V12; outside
    them the check refuses rather than reporting a meaningless verdict.
    """
    if spec.truncation is None:
        raise BoundPreconditionError("weight bound is about truncated specs")
    an = analysis or analyze(walk)
    s = walk.s
    cutoff = spec.truncation.cutoff(spec.n)
    v2 = Fraction(spec.law.moment(2))
    chain = [Fraction(spec.entry_moment(2 * m)) for m in range(2, 7)]
    precondition_ok = v2 <= 1 <= chain[0] and all(
        chain[i] <= chain[i + 1] for i in range(len(chain) - 1)
    )
    if not precondition_ok:
        return WeightBoundResult(
            passed=False,
            lhs=None,
            rhs=None,
            nu_profile=an.nu_profile(),
            precondition_ok=False,
            note="moment chain 1 <= V4 <= ... <= V12 does not hold; bound not claimed",
        )
    lhs = Fraction(1)
    for (a, b), m in an.frame_passes.items():
        lhs *= Fraction(spec.entry_moment(m, a == b))
    v12 = chain[-1]
    rhs = v2**s
    for k, c in an.nu_profile().items():
        rhs *= (4 * v12 * Fraction(2 * cutoff) ** (2 * (k - 2))) ** c
    return WeightBoundResult(
        passed=lhs <= rhs,
        lhs=lhs,
        rhs=rhs,
        nu_profile=an.nu_profile(),
        precondition_ok=True,
    )


def dilute_lower_bound(law, n: int, c: int, s: int):
    """Right side of the dilute edge estimate: n m_{2s} (1 + (s-3) V4 / c)."""
    v2 = Fraction(law.moment(2))
    v4 = Fraction(law.moment(4))
    m2s = v2**s * Fraction(math.comb(2 * s, s), s + 1)
    return n * m2s * (1 + Fraction(s - 3) * v4 / c)
