"""Exact formal power series over the rationals, and the Catalan identities.

Everything here is coefficientwise-exact: no floating point, no root
extraction. The reciprocal square root of 1-4t is *defined* by its central
binomial coefficients, so all identities live in Q[[t]] truncated at a
chosen order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dyck import catalan, enumerate_dyck, exit_degree_profile
from math import comb


@dataclass(frozen=True)
class Series:
    """Truncated power series with exact rational coefficients."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", tuple(Fraction(c) for c in self.coeffs)
        )

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k <= self.order else Fraction(0)

    def truncate(self, order: int) -> "Series":
        cs = list(self.coeffs[: order + 1])
        cs += [Fraction(0)] * (order + 1 - len(cs))
        return Series(tuple(cs))

    def __add__(self, other: "Series") -> "Series":
        n = min(self.order, other.order)
        return Series(tuple(self[k] + other[k] for k in range(n + 1)))

    def __sub__(self, other: "Series") -> "Series":
        n = min(self.order, other.order)
        return Series(tuple(self[k] - other[k] for k in range(n + 1)))

    def __mul__(self, other):
        if isinstance(other, Series):
            n = min(self.order, other.order)
            out = [Fraction(0)] * (n + 1)
            for i, a in enumerate(self.coeffs[: n + 1]):
                if a == 0:
                    continue
                for j in range(n + 1 - i):
                    b = other[j]
                    if b:
                        out[i + j] += a * b
            return Series(tuple(out))
        return Series(tuple(c * Fraction(other) for c in self.coeffs))

    __rmul__ = __mul__

    def shift(self, m: int) -> "Series":
        """Multiply by t^m, keeping the truncation order."""
        cs = (Fraction(0),) * m + self.coeffs
        return Series(cs[: self.order + 1])

    def derivative(self) -> "Series":
        if self.order == 0:
            return Series((Fraction(0),))
        return Series(tuple(Fraction(k) * self.coeffs[k] for k in range(1, self.order + 1)))

    def pow(self, e: int) -> "Series":
        out = Series((Fraction(1),) + (Fraction(0),) * self.order)
        for _ in range(e):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def le(self, other: "Series") -> bool:
        """Coefficientwise comparison up to the common order."""
        n = min(self.order, other.order)
        return all(self[k] <= other[k] for k in range(n + 1))


def catalan_gf(order: int) -> Series:
    """phi(t) = sum_k t_k t^k."""
    return Series(tuple(Fraction(catalan(k)) for k in range(order + 1)))


def invsqrt_one_minus_4t(order: int) -> Series:
    """1/sqrt(1-4t), defined by its coefficients C(2k, k) = (k+1) t_k."""
    return Series(tuple(Fraction(comb(2 * k, k)) for k in range(order + 1)))


def one(order: int) -> Series:
    return Series((Fraction(1),) + (Fraction(0),) * order)


def check_catalan_identities(order: int) -> dict[str, bool]:
    """t*phi^2 = phi - 1 and t*phi' = 1/sqrt(1-4t) - phi, coefficientwise."""
    phi = catalan_gf(order)
    lhs1 = (phi * phi).shift(1)
    rhs1 = phi - one(order)
    # one extra order so the derivative keeps the top coefficient
    lhs2 = catalan_gf(order + 1).derivative().shift(1).truncate(order)
    rhs2 = invsqrt_one_minus_4t(order) - phi
    return {
        "t_phi_sq": (lhs1 - rhs1).is_zero(),
        "t_phi_prime": (lhs2 - rhs2).is_zero(),
    }


# ---------------------------------------------------------------------------
# Same-exit-cluster marking counts.


def n2_count(s: int) -> int:
    """Walks with exactly one 2-fold multiple edge and no other self-intersections.

    Closed form t_s (s - 3s/(s+2)); the rational must come out integral.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    val = Fraction(catalan(s)) * (Fraction(s) - Fraction(3 * s, s + 2))
    if val.denominator != 1:
        raise ArithmeticError(f"n2_count({s}) is not integral: {val}")
    return int(val)


def _odd_weighted_catalan(order: int) -> Series:
    """A(t) = sum_u (2u+1) t_u t^u."""
    return Series(tuple(Fraction((2 * u + 1) * catalan(u)) for u in range(order + 1)))


def nm_count(m: int, s: int) -> int:
    """Number of ways to mark m edges of one exit cluster, over trees with s edges.

    Convolution sum_{u+v_1+..+v_{2m-1}=s-m} (2u+1) t_u t_{v_1} ... t_{v_{2m-1}}.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    if s < m:
        return 0
    order = s - m
    prod = _odd_weighted_catalan(order)
    phi = catalan_gf(order)
    for _ in range(2 * m - 1):
        prod = prod * phi
    val = prod[order]
    assert val.denominator == 1
    return int(val)


def n2_series(order: int) -> Series:
    """Generating function of n2_count: phi'(t) - 3/sqrt(1-4t) + 2 phi(t).

    Equivalently [(1-3t)/sqrt(1-4t) + (2t-1) phi(t)] / t: the closed form in
    that shape carries one spurious factor of t relative to the convolution
    definition of the counts, which the division removes (the tests pin both).
    """
    inv = invsqrt_one_minus_4t(order)
    phi = catalan_gf(order)
    phi_prime = catalan_gf(order + 1).derivative().truncate(order)
    return phi_prime - 3 * inv + 2 * phi


def n2_closed_form_shifted(order: int) -> Series:
    """(1-3t)/sqrt(1-4t) + (2t-1) phi(t), which equals t * n2_series(t)."""
    inv = invsqrt_one_minus_4t(order)
    phi = catalan_gf(order)
    one_minus_3t = Series((Fraction(1), Fraction(-3)) + (Fraction(0),) * (order - 1))
    two_t_minus_1 = Series((Fraction(-1), Fraction(2)) + (Fraction(0),) * (order - 1))
    return one_minus_3t * inv + two_t_minus_1 * phi


def nm_bound(m: int, s: int) -> int:
    """The companion inequality: nm_count(m, s) <= 2^m * s * t_s."""
    return (2**m) * s * catalan(s)


def g_series(level: int, order: int) -> Series:
    """G^(l)(t) = (2 t phi(t))^l / sqrt(1-4t); coefficientwise decreasing in l."""
    base = (2 * catalan_gf(order)).shift(1)
    return base.pow(level) * invsqrt_one_minus_4t(order)


def brute_force_same_cluster_pairs(s: int, m: int = 2) -> int:
    """Oracle: sum over all plane trees with s edges of C(exit degree, m)."""
    total = 0
    for path in enumerate_dyck(s):
        for deg in exit_degree_profile(path):
            if deg >= m:
                total += comb(deg, m)
    return total


def coefficient_table(order: int) -> list[dict]:
    """Exact coefficient rows for CSV emission."""
    phi = catalan_gf(order)
    inv = invsqrt_one_minus_4t(order)
    n2 = n2_series(order)
    return [
        {
            "k": k,
            "catalan": str(phi[k]),
            "inv_sqrt_1_minus_4t": str(inv[k]),
            "n2": str(n2[k]),
        }
        for k in range(order + 1)
    ]
