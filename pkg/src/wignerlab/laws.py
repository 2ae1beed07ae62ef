"""Symmetric entry laws: exact even moments, truncated moments, samplers.

Moments are exact `Fraction`s wherever the law allows it, so the walk-sum
trace moments downstream stay exact. Samplers draw from a numpy Generator
and are only used by the Monte Carlo layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, special


def _double_factorial_odd(m: int) -> int:
    """(2m-1)!! = (2m)! / (2^m m!)."""
    return math.factorial(2 * m) // (2**m * math.factorial(m))


@dataclass(frozen=True)
class RademacherLaw:
    """a = +-v with equal probability."""

    v: Fraction = Fraction(1)
    name: str = "rademacher"

    def moment(self, order: int) -> Fraction:
        if order % 2:
            return Fraction(0)
        return Fraction(self.v) ** order

    def truncated_moment(self, order: int, cutoff: float) -> Fraction:
        if order % 2:
            return Fraction(0)
        return self.moment(order) if Fraction(self.v) <= Fraction(cutoff) else Fraction(0)

    def support_bound(self) -> float:
        return float(self.v)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return (2.0 * rng.integers(0, 2, size=size) - 1.0) * float(self.v)

    def descriptor(self) -> dict:
        return {"law": self.name, "v": str(self.v)}


@dataclass(frozen=True)
class GaussianLaw:
    """Centered normal with standard deviation v."""

    v: Fraction = Fraction(1)
    name: str = "gaussian"

    def moment(self, order: int) -> Fraction:
        if order % 2:
            return Fraction(0)
        m = order // 2
        return Fraction(self.v) ** order * _double_factorial_odd(m)

    def truncated_moment(self, order: int, cutoff: float) -> float:
        """E[a^order; |a| <= cutoff] by the two-sided integration-by-parts recursion."""
        if order % 2:
            return 0.0
        sigma = float(self.v)
        u = cutoff / sigma
        phi_u = math.exp(-0.5 * u * u) / math.sqrt(2 * math.pi)
        val = special.erf(u / math.sqrt(2))  # E[1_{|Z|<=u}]
        for m in range(1, order // 2 + 1):
            val = (2 * m - 1) * val - 2 * u ** (2 * m - 1) * phi_u
        return sigma**order * val

    def support_bound(self) -> None:
        return None

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.standard_normal(size) * float(self.v)

    def descriptor(self) -> dict:
        return {"law": self.name, "v": str(self.v)}


@dataclass(frozen=True)
class GoeLaw(GaussianLaw):
    """Gaussian off-diagonal law whose diagonal variance is doubled downstream."""

    name: str = "goe"


@dataclass(frozen=True)
class PowerTailLaw:
    """Symmetrized Pareto: |a| has density gamma x0^gamma / x^(gamma+1) on [x0, inf).

    The scale x0 is set so the variance is v^2; moments of order >= gamma
    diverge, so choose gamma above the largest moment the experiment needs.
    """

    v: float = 1.0
    gamma: float = 24.0
    name: str = "power-tail"

    def __post_init__(self):
        if self.gamma <= 2:
            raise ValueError("gamma must exceed 2 for a finite variance")

    @property
    def x0(self) -> float:
        return float(self.v) * math.sqrt((self.gamma - 2) / self.gamma)

    def abs_moment(self, order: float) -> float:
        if order >= self.gamma:
            raise ValueError(f"E|a|^{order} diverges for gamma={self.gamma}")
        return self.gamma * self.x0**order / (self.gamma - order)

    def moment(self, order: int) -> float:
        if order % 2:
            return 0.0
        return self.abs_moment(order)

    def truncated_moment(self, order: int, cutoff: float) -> float:
        if order % 2:
            return 0.0
        if cutoff <= self.x0:
            return 0.0
        g, p = self.gamma, order
        return g * self.x0**p / (g - p) * (1 - (self.x0 / cutoff) ** (g - p))

    def support_bound(self) -> None:
        return None

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        mag = self.x0 * (1.0 - rng.random(size)) ** (-1.0 / self.gamma)
        sign = 2.0 * rng.integers(0, 2, size=size) - 1.0
        return mag * sign

    def descriptor(self) -> dict:
        return {"law": self.name, "v": repr(self.v), "gamma": repr(self.gamma)}


@dataclass(frozen=True)
class ThreePointLaw:
    """a = +-spike with probability q each, else 0; heavy even moments.

    With spike=2, q=1/32 this realizes v^2 = 1/4 together with the moment
    chain 1 <= V_4 <= ... <= V_12 that the walk-weight bound assumes.
    """

    spike: Fraction = Fraction(2)
    q: Fraction = Fraction(1, 32)
    name: str = "three-point"

    @property
    def v(self):
        val = 2 * self.q * Fraction(self.spike) ** 2
        num, den = val.numerator, val.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return Fraction(rn, rd)  # exact when the variance is a perfect square
        return math.sqrt(float(val))

    def moment(self, order: int) -> Fraction:
        if order % 2:
            return Fraction(0)
        return 2 * self.q * Fraction(self.spike) ** order

    def truncated_moment(self, order: int, cutoff: float) -> Fraction:
        if order % 2:
            return Fraction(0)
        return self.moment(order) if Fraction(self.spike) <= Fraction(cutoff) else Fraction(0)

    def support_bound(self) -> float:
        return float(self.spike)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        out = np.zeros(size)
        q = float(self.q)
        out[u < q] = float(self.spike)
        out[(u >= q) & (u < 2 * q)] = -float(self.spike)
        return out

    def descriptor(self) -> dict:
        return {"law": self.name, "spike": str(self.spike), "q": str(self.q)}


@dataclass(frozen=True)
class CustomMomentLaw:
    """Ensemble defined only by a finite list of even moments (no sampler)."""

    even_moments: tuple  # index m -> E a^(2m), starting at m=1
    name: str = "custom"

    @property
    def v(self) -> float:
        return math.sqrt(float(self.even_moments[0]))

    def moment(self, order: int):
        if order % 2:
            return 0
        if order == 0:
            return 1
        m = order // 2
        if m > len(self.even_moments):
            raise ValueError(f"moment of order {order} not supplied")
        return self.even_moments[m - 1]

    def truncated_moment(self, order: int, cutoff: float):
        raise ValueError("custom moment lists do not support truncation")

    def support_bound(self) -> None:
        return None

    def descriptor(self) -> dict:
        return {"law": self.name, "moments": [str(m) for m in self.even_moments]}


def quadrature_moment(density, order: int, cutoff: float) -> float:
    """E[a^order; |a| <= cutoff] for a symmetric density, by adaptive quadrature."""
    if order % 2:
        return 0.0
    val, _err = integrate.quad(
        lambda x: 2 * x**order * density(x), 0, cutoff, epsrel=1e-12, limit=200
    )
    return val


def make_law(name: str, v: float | Fraction = 1, gamma: float = 24.0):
    name = name.lower()
    if name == "rademacher":
        return RademacherLaw(Fraction(v))
    if name == "gaussian":
        return GaussianLaw(Fraction(v))
    if name == "goe":
        return GoeLaw(Fraction(v))
    if name in ("power-tail", "powertail", "pareto"):
        return PowerTailLaw(float(v), gamma)
    if name in ("three-point", "threepoint"):
        return ThreePointLaw()
    raise ValueError(f"unknown entry law {name!r}")
