"""Exact Dyck-path / plane-rooted-tree combinatorics.

Catalan numbers, exhaustive path enumeration, the chronological-run bijection
with plane rooted trees, exit-degree counts and their exponential tail bound,
and the exponential moment of the normalized maximal height of a uniform
Dyck path (computed from the exact height distribution, never by sampling).

All counts are arbitrary-precision integers; bounds that must be compared
against exact counts are returned as `Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import EnumerationCeilingError

#: Default ceiling on the half-length k for exhaustive enumerations.
#: catalan(14) = 2_674_440 paths is the largest batch we accept by default.
DYCK_ENUMERATION_CEILING = 14


def catalan(k: int) -> int:
    """k-th Catalan number (2k)! / (k! (k+1)!), exactly."""
    if k < 0:
        raise ValueError("k must be a nonnegative integer")
    return math.comb(2 * k, k) // (k + 1)


@dataclass(frozen=True)
class DyckPath:
    """Balanced nonnegative +-1 step sequence of length 2k."""

    steps: tuple[int, ...]

    def __post_init__(self):
        height = 0
        for st in self.steps:
            if st not in (1, -1):
                raise ValueError("steps must be +1 or -1")
            height += st
            if height < 0:
                raise ValueError("prefix sums must stay nonnegative")
        if height != 0:
            raise ValueError("total sum must be zero")

    @property
    def k(self) -> int:
        return len(self.steps) // 2

    def heights(self) -> tuple[int, ...]:
        """Prefix sums theta(0..2k), starting and ending at 0."""
        out = [0]
        for st in self.steps:
            out.append(out[-1] + st)
        return tuple(out)

    @property
    def max_height(self) -> int:
        return max(self.heights())

    def __str__(self) -> str:
        return "".join("U" if st == 1 else "D" for st in self.steps)


@dataclass(frozen=True)
class PlaneTree:
    """Plane rooted tree; child order is significant."""

    children: tuple["PlaneTree", ...] = ()

    @property
    def edge_count(self) -> int:
        return sum(c.edge_count + 1 for c in self.children)

    def exit_degrees(self) -> list[int]:
        """Child counts of all vertices, root first, depth-first order."""
        out = [len(self.children)]
        for c in self.children:
            out.extend(c.exit_degrees())
        return out


def enumerate_dyck(k: int, ceiling: int = DYCK_ENUMERATION_CEILING) -> list[DyckPath]:
    """All Dyck paths of half-length k, lexicographic with up-steps first."""
    if k > ceiling:
        raise EnumerationCeilingError("enumerate_dyck", k, ceiling)
    paths: list[DyckPath] = []
    steps: list[int] = []

    def rec(ups: int, downs: int) -> None:
        if ups == k and downs == k:
            paths.append(DyckPath(tuple(steps)))
            return
        if ups < k:
            steps.append(1)
            rec(ups + 1, downs)
            steps.pop()
        if downs < ups:
            steps.append(-1)
            rec(ups, downs + 1)
            steps.pop()

    rec(0, 0)
    return paths


def dyck_to_tree(path: DyckPath) -> PlaneTree:
    """Chronological run: an up-step descends to a new child, a down-step returns."""
    stack: list[list[PlaneTree]] = [[]]
    for st in path.steps:
        if st == 1:
            stack.append([])
        else:
            kids = stack.pop()
            stack[-1].append(PlaneTree(tuple(kids)))
    return PlaneTree(tuple(stack[0]))


def tree_to_dyck(tree: PlaneTree) -> DyckPath:
    steps: list[int] = []

    def rec(node: PlaneTree) -> None:
        for c in node.children:
            steps.append(1)
            rec(c)
            steps.append(-1)

    rec(tree)
    return DyckPath(tuple(steps))


def exit_degree_profile(path: DyckPath) -> list[int]:
    """Exit degrees (child counts) of the tree of `path`, without building it."""
    counts: list[int] = []
    stack = [0]
    for st in path.steps:
        if st == 1:
            stack[-1] += 1
            stack.append(0)
        else:
            counts.append(stack.pop())
    counts.append(stack.pop())
    return counts


# ---------------------------------------------------------------------------
# Exit-degree counts over trees with s edges.


@lru_cache(maxsize=None)
def _catalan_power(d: int, order: int) -> tuple[int, ...]:
    """Coefficients of (sum_k t_k x^k)^d up to x^order."""
    if d == 0:
        return (1,) + (0,) * order
    prev = _catalan_power(d - 1, order)
    cat = [catalan(i) for i in range(order + 1)]
    out = [0] * (order + 1)
    for i, p in enumerate(prev):
        if p == 0:
            continue
        for j in range(order + 1 - i):
            out[i + j] += p * cat[j]
    return tuple(out)


def count_trees_root_degree(s: int, d: int) -> int:
    """Number of plane trees with s edges whose root has exit degree exactly d.

    Equals the d-fold Catalan convolution at order s-d; satisfies the
    recurrence checked exhaustively in the tests.
    """
    if s < 0 or d < 0:
        raise ValueError("s and d must be nonnegative")
    if d > s:
        return 0
    if d == 0:
        return 1 if s == 0 else 0
    return _catalan_power(d, s - d)[s - d]


@lru_cache(maxsize=None)
def _exit_degree_tables(s: int, ceiling: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(tail, exact) where tail[d] counts trees with max exit degree >= d and
    exact[d] counts trees having at least one vertex of exit degree == d."""
    if s > ceiling:
        raise EnumerationCeilingError("exit-degree tree enumeration", s, ceiling)
    tail = [0] * (s + 2)
    exact = [0] * (s + 2)
    counts: list[int] = []
    stack = [0]

    def visit(steps: tuple[int, ...]) -> None:
        counts.clear()
        stack[:] = [0]
        for st in steps:
            if st == 1:
                stack[-1] += 1
                stack.append(0)
            else:
                counts.append(stack.pop())
        counts.append(stack.pop())
        tail[max(counts)] += 1
        for deg in set(counts):
            exact[deg] += 1

    steps: list[int] = []

    def rec(ups: int, downs: int) -> None:
        if ups == s and downs == s:
            visit(tuple(steps))
            return
        if ups < s:
            steps.append(1)
            rec(ups + 1, downs)
            steps.pop()
        if downs < ups:
            steps.append(-1)
            rec(ups, downs + 1)
            steps.pop()

    rec(0, 0)
    # turn the max-degree histogram into a tail
    for dd in range(s, -1, -1):
        tail[dd] += tail[dd + 1]
    return tuple(tail), tuple(exact)


def count_trees_with_exit_degree_ge(
    s: int, d: int, ceiling: int = DYCK_ENUMERATION_CEILING
) -> int:
    """Trees with s edges having some vertex of exit degree >= d (brute force)."""
    if s < 0 or d < 0:
        raise ValueError("s and d must be nonnegative")
    if d == 0:
        return catalan(s)
    if d > s:
        return 0
    return _exit_degree_tables(s, ceiling)[0][d]


def count_trees_with_exit_degree_eq(
    s: int, d: int, ceiling: int = DYCK_ENUMERATION_CEILING
) -> int:
    """Trees with s edges having some vertex of exit degree exactly d."""
    if s < 0 or d < 0:
        raise ValueError("s and d must be nonnegative")
    if d == 0:
        return catalan(s)  # leaves always exist
    if d > s:
        return 0
    return _exit_degree_tables(s, ceiling)[1][d]


def exit_degree_tail_bound(s: int, d: int) -> Fraction:
    """(2s+1) * (3/4)^(d-2) * t_s, the exponential tail bound for exit degrees.

    Only claimed for d >= 2.
    """
    if d < 2:
        raise ValueError("the tail bound is only stated for d >= 2")
    return Fraction(2 * s + 1) * Fraction(3, 4) ** (d - 2) * catalan(s)


# ---------------------------------------------------------------------------
# Exact height distribution and the excursion functional.


@lru_cache(maxsize=8)
def _binomial_row(n: int) -> tuple[int, ...]:
    row = [1] * (n + 1)
    for j in range(n):
        row[j + 1] = row[j] * (n - j) // (j + 1)
    return tuple(row)


def paths_with_max_height_le(k: int, h: int) -> int:
    """Number of 2k-step Dyck paths with maximal height <= h.

    Exact double-reflection sum over the strip [0, h]:
        sum_j C(2k, k + j(h+2)) - C(2k, k + j(h+2) - 1).
    """
    if h < 0:
        return 1 if k == 0 else 0
    if h >= k:
        return catalan(k)
    row = _binomial_row(2 * k)
    period = h + 2
    total = 0
    j = 0
    while True:
        hit = False
        for idx in ({k + j * period, k - j * period} if j else {k}):
            if 0 <= idx <= 2 * k:
                total += row[idx]
                hit = True
            if 0 <= idx - 1 <= 2 * k and idx - 1 >= 0:
                total -= row[idx - 1]
                hit = True
        if not hit:
            break
        j += 1
    return total


@lru_cache(maxsize=8)
def height_counts(k: int) -> tuple[int, ...]:
    """cnt[m] = number of 2k-step Dyck paths with maximal height exactly m.

    Index m runs 0..k; cnt[0] is 1 only for k = 0.
    """
    if k == 0:
        return (1,)
    counts = [0] * (k + 1)
    prev = 0
    for m in range(1, k + 1):
        cur = paths_with_max_height_le(k, m)
        counts[m] = cur - prev
        prev = cur
    return tuple(counts)


def excursion_functional(k: int, tau: float) -> float:
    """Mean of exp(tau * H / sqrt(k)) over uniform 2k-step Dyck paths, H the max height.

    Exact height counts feed a log-space sum, so k of a few thousand is fine.
    Normalization is exact: the value at tau = 0 is identically 1.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if tau == 0:
        return 1.0
    counts = height_counts(k)
    log_tk = math.log(catalan(k))
    scale = tau / math.sqrt(k)
    return math.fsum(
        math.exp(math.log(c) - log_tk + scale * m)
        for m, c in enumerate(counts)
        if c > 0
    )


def mean_max_height(k: int) -> float:
    """Exact expected maximal height of a uniform 2k-step Dyck path."""
    counts = height_counts(k)
    num = sum(m * c for m, c in enumerate(counts))
    return float(Fraction(num, catalan(k)))
