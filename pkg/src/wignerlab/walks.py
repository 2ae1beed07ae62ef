"""Canonical even closed walks and their structural analysis.

A walk is a label sequence w(0..2s) in first-appearance order starting at 1.
The analysis computes everything the counting machinery needs: marked steps,
the frame multigraph with pass counts, self-intersection degrees and open
instants, the last-marked-passage (mu) classification of marked edges with
its p-edges and layered q-edges, the backtrack-erasing reduction to a fixed
point, instants of broken tree structure, and primary/imported cells.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

from .dyck import DyckPath
from .errors import EnumerationCeilingError

#: Default ceiling on the number of steps 2s for exhaustive walk enumeration.
WALK_ENUMERATION_CEILING = 12

ROOT = 1


@dataclass(frozen=True)
class Walk:
    """Closed label sequence in canonical first-appearance order.

    Even walks have 2s+1 labels; odd-step closed sequences are accepted too so
    that the structural analysis can be exercised on textbook fragments.
    """

    labels: tuple[int, ...]

    def __post_init__(self):
        lab = self.labels
        if not lab:
            raise ValueError("a walk has at least one label")
        if lab[0] != ROOT or lab[-1] != ROOT:
            raise ValueError("walks start and end at the root label 1")
        seen = 0
        for x in lab:
            if x < 1 or x > seen + 1:
                raise ValueError("labels must appear in first-appearance order")
            seen = max(seen, x)

    @property
    def n_steps(self) -> int:
        return len(self.labels) - 1

    @property
    def s(self) -> int:
        return len(self.labels) // 2

    @property
    def n_vertices(self) -> int:
        return max(self.labels)

    def steps(self) -> list[tuple[int, int]]:
        lab = self.labels
        return [(lab[t - 1], lab[t]) for t in range(1, len(lab))]

    def is_even(self) -> bool:
        passes: dict[tuple[int, int], int] = {}
        for a, b in self.steps():
            e = (a, b) if a <= b else (b, a)
            passes[e] = passes.get(e, 0) + 1
        return all(m % 2 == 0 for m in passes.values())

    def to_string(self) -> str:
        return ",".join(str(x) for x in self.labels)

    @staticmethod
    def from_string(text: str) -> "Walk":
        return Walk(tuple(int(tok) for tok in text.strip().split(",")))

    @staticmethod
    def from_labels(raw: list[int] | tuple[int, ...]) -> "Walk":
        """Relabel an arbitrary closed label sequence into canonical form."""
        mapping: dict[int, int] = {}
        out = []
        for x in raw:
            if x not in mapping:
                mapping[x] = len(mapping) + 1
            out.append(mapping[x])
        return Walk(tuple(out))


def _frame_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


def _marked_flags(labels: tuple[int, ...]) -> list[bool]:
    """marked[t-1] for steps t = 1..len-1: odd cumulative pass count of the frame edge."""
    parity: dict[tuple[int, int], int] = {}
    out = []
    for t in range(1, len(labels)):
        e = _frame_key(labels[t - 1], labels[t])
        parity[e] = parity.get(e, 0) ^ 1
        out.append(parity[e] == 1)
    return out


@dataclass
class CheckReport:
    """Outcome of one structural verification (pass/fail plus a ledger)."""

    name: str
    passed: bool
    ledger: list[dict] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)


@dataclass
class WalkAnalysis:
    """Full structural report for one walk (graph, mu-structure, reduction)."""

    walk: Walk
    s: int
    marked: tuple[bool, ...]
    theta: DyckPath | None
    frame_passes: dict[tuple[int, int], int]
    marked_arrivals: dict[int, tuple[int, ...]]
    kappa_nu: dict[int, int]
    open_instants: tuple[int, ...]
    open_by_vertex: dict[int, tuple[int, ...]]
    exit_clusters: dict[int, tuple[int, ...]]
    exit_degree: dict[int, int]
    max_exit_degree: int
    mu_edges: dict[tuple[int, int], int]
    p_edges: dict[tuple[int, int], int]
    q_layers: tuple[tuple[int, ...], ...]
    step_roles: dict[int, str]
    kappa_mu: dict[int, int]
    p_count: int
    double_mu_count: int
    double_mu_pairs: tuple[tuple[int, int], ...]
    q_counts: tuple[int, ...]
    reduced: Walk
    reduced_raw: tuple[int, ...]
    reduced_step_map: tuple[int, ...]
    bts_instants: tuple[int, ...]
    primary_cells: dict[int, tuple[int, ...]]
    imported_cells: dict[int, tuple[int, ...]]
    reduced_nonmarked_arrivals: dict[int, tuple[int, ...]]
    max_open_attached: dict[int, int]

    @property
    def vertices(self) -> list[int]:
        return list(range(1, self.walk.n_vertices + 1))

    @property
    def bts_total(self) -> int:
        return len(self.bts_instants)

    def bts_remote(self, beta: int) -> int:
        lab = self.walk.labels
        return sum(1 for t in self.bts_instants if lab[t] != beta)

    def nu_profile(self) -> dict[int, int]:
        """nu_k = number of vertices of self-intersection degree k, k >= 2."""
        prof: dict[int, int] = {}
        for _, k in self.kappa_nu.items():
            if k >= 2:
                prof[k] = prof.get(k, 0) + 1
        return prof

    def mu_profile(self) -> dict[int, int]:
        """mu_m = number of vertices of mu-self-intersection degree m, m >= 1."""
        prof: dict[int, int] = {}
        for _, m in self.kappa_mu.items():
            prof[m] = prof.get(m, 0) + 1
        return prof

    def nu_weight(self) -> int:
        """Sum of (k-1) over self-intersection degrees: equals s+1 - |V|."""
        return sum(k - 1 for k in self.kappa_nu.values())


def _reduce_raw(labels: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Erase marked backtracks to a fixed point.

    Removes instants t where step t is marked and w(t+1) = w(t-1) (the step
    t+1 is then the non-marked closure of the same frame edge) until none
    remain. Returns (raw label sequence, surviving original step indices).
    """
    seq = list(labels)
    step_ids = list(range(1, len(labels)))
    while True:
        marked = _marked_flags(tuple(seq))
        found = -1
        for t in range(1, len(seq) - 1):
            if marked[t - 1] and seq[t + 1] == seq[t - 1]:
                found = t
                break
        if found < 0:
            break
        del seq[found : found + 2]
        del step_ids[found - 1 : found + 1]
    return tuple(seq), tuple(step_ids)


def reduce_walk(walk: Walk) -> Walk:
    """Fixed point of the backtrack-erasing reduction, canonically relabeled."""
    raw, _ = _reduce_raw(walk.labels)
    return Walk.from_labels(raw)


def analyze(walk: Walk) -> WalkAnalysis:
    lab = walk.labels
    s = walk.s
    two_s = walk.n_steps
    marked = tuple(_marked_flags(lab))

    frame_passes: dict[tuple[int, int], int] = {}
    marked_arrivals: dict[int, list[int]] = {v: [] for v in range(1, walk.n_vertices + 1)}
    exit_clusters: dict[int, list[int]] = {v: [] for v in range(1, walk.n_vertices + 1)}
    open_instants: list[int] = []
    open_by_vertex: dict[int, list[int]] = {v: [] for v in range(1, walk.n_vertices + 1)}
    directed_marked: dict[tuple[int, int], list[int]] = {}

    # open-edge bookkeeping: number of odd-parity frame edges at each vertex
    parity: dict[tuple[int, int], int] = {}
    open_count: dict[int, int] = {v: 0 for v in range(1, walk.n_vertices + 1)}
    max_open_attached: dict[int, int] = {v: 0 for v in range(1, walk.n_vertices + 1)}

    for t in range(1, two_s + 1):
        a, b = lab[t - 1], lab[t]
        e = _frame_key(a, b)
        is_marked = marked[t - 1]
        if is_marked:
            # openness is judged on [0, t-1], before this step flips anything
            if open_count[b] > 0:
                open_instants.append(t)
                open_by_vertex[b].append(t)
            marked_arrivals[b].append(t)
            exit_clusters[a].append(t)
            directed_marked.setdefault((a, b), []).append(t)
        frame_passes[e] = frame_passes.get(e, 0) + 1
        delta = 1 if frame_passes[e] % 2 == 1 else -1
        open_count[a] += delta
        if b != a:
            open_count[b] += delta
        for v in (a, b) if b != a else (a,):
            if open_count[v] > max_open_attached[v]:
                max_open_attached[v] = open_count[v]

    kappa_nu = {
        v: len(marked_arrivals[v]) + (1 if v == ROOT else 0)
        for v in range(1, walk.n_vertices + 1)
    }

    # mu / p / q classification per directed edge, last marked passage first
    mu_edges: dict[tuple[int, int], int] = {}
    p_edges: dict[tuple[int, int], int] = {}
    q_layer_map: dict[int, list[int]] = {}
    step_roles: dict[int, str] = {}
    for edge, instants in directed_marked.items():
        mu_edges[edge] = instants[-1]
        step_roles[instants[-1]] = "mu"
        if len(instants) >= 2:
            p_edges[edge] = instants[-2]
            step_roles[instants[-2]] = "p"
        for depth, t in enumerate(reversed(instants[:-2]), start=1):
            q_layer_map.setdefault(depth, []).append(t)
            step_roles[t] = f"q{depth}"
    q_layers = tuple(
        tuple(sorted(q_layer_map[j])) for j in sorted(q_layer_map)
    )
    q_counts = tuple(len(layer) for layer in q_layers)

    kappa_mu: dict[int, int] = {}
    for v in range(1, walk.n_vertices + 1):
        m = sum(1 for (_, head) in mu_edges if head == v)
        kappa_mu[v] = m + (1 if v == ROOT else 0)

    double_pairs: list[tuple[int, int]] = []
    for (a, b), t in mu_edges.items():
        if a < b and (b, a) in mu_edges:
            t2 = mu_edges[(b, a)]
            double_pairs.append((min(t, t2), max(t, t2)))
    double_pairs.sort()

    # reduction, BTS instants, cells
    raw, step_map = _reduce_raw(lab)
    reduced = Walk.from_labels(raw)
    red_marked = _marked_flags(raw)
    bts: list[int] = []
    primary_cells = {v: tuple(marked_arrivals[v]) for v in range(1, walk.n_vertices + 1)}
    imported: dict[int, list[int]] = {v: [] for v in range(1, walk.n_vertices + 1)}
    nonmarked_red: dict[int, list[int]] = {v: [] for v in range(1, walk.n_vertices + 1)}
    for r in range(1, len(raw)):
        head = raw[r]
        if red_marked[r - 1]:
            if r < len(raw) - 1 and not red_marked[r]:
                bts.append(step_map[r - 1])
        else:
            nonmarked_red[head].append(step_map[r - 1])
            # an arrival imports exit capacity only if the walk leaves by a
            # marked step; pass-through arrivals open no new exit group
            if r < len(raw) - 1 and red_marked[r]:
                imported[head].append(step_map[r - 1])

    theta = None
    if walk.is_even():
        theta = DyckPath(tuple(1 if m else -1 for m in marked))

    exit_degree = {v: len(exit_clusters[v]) for v in exit_clusters}
    return WalkAnalysis(
        walk=walk,
        s=s,
        marked=marked,
        theta=theta,
        frame_passes=frame_passes,
        marked_arrivals={v: tuple(ts) for v, ts in marked_arrivals.items()},
        kappa_nu=kappa_nu,
        open_instants=tuple(open_instants),
        open_by_vertex={v: tuple(ts) for v, ts in open_by_vertex.items()},
        exit_clusters={v: tuple(ts) for v, ts in exit_clusters.items()},
        exit_degree=exit_degree,
        max_exit_degree=max(exit_degree.values(), default=0),
        mu_edges=mu_edges,
        p_edges=p_edges,
        q_layers=q_layers,
        step_roles=step_roles,
        kappa_mu=kappa_mu,
        p_count=len(p_edges),
        double_mu_count=len(double_pairs),
        double_mu_pairs=tuple(double_pairs),
        q_counts=q_counts,
        reduced=reduced,
        reduced_raw=raw,
        reduced_step_map=step_map,
        bts_instants=tuple(bts),
        primary_cells=primary_cells,
        imported_cells={v: tuple(ts) for v, ts in imported.items()},
        reduced_nonmarked_arrivals={v: tuple(ts) for v, ts in nonmarked_red.items()},
        max_open_attached=max_open_attached,
    )


# ---------------------------------------------------------------------------
# Enumeration.


def enumerate_even_walks(
    s: int,
    allow_loops: bool = True,
    ceiling: int = WALK_ENUMERATION_CEILING,
) -> list[Walk]:
    """All canonical even closed walks of 2s steps, in lexicographic label order."""
    if 2 * s > ceiling:
        raise EnumerationCeilingError("enumerate_even_walks", 2 * s, ceiling)
    if s == 0:
        return [Walk((ROOT,))]
    results: list[Walk] = []
    labels = [ROOT]
    parity: dict[tuple[int, int], int] = {}
    two_s = 2 * s

    def rec(t: int, cur: int, vmax: int, nopen: int) -> None:
        remaining = two_s - t
        if remaining == 0:
            if cur == ROOT and nopen == 0:
                results.append(Walk(tuple(labels)))
            return
        closing_only = nopen == remaining
        hi = vmax + 1 if (vmax <= s and not closing_only) else vmax
        for nxt in range(1, hi + 1):
            if nxt == cur and not allow_loops:
                continue
            e = _frame_key(cur, nxt)
            odd = parity.get(e, 0) == 1
            if closing_only and not odd:
                continue
            parity[e] = parity.get(e, 0) ^ 1
            labels.append(nxt)
            rec(t + 1, nxt, max(vmax, nxt), nopen - 1 if odd else nopen + 1)
            labels.pop()
            parity[e] = parity.get(e, 0) ^ 1

    rec(0, ROOT, 1, 0)
    return results


def is_tree_structure(walk: Walk) -> bool:
    """No self-intersections and no loops: the walk is a depth-first tree run."""
    if any(a == b for a, b in walk.steps()):
        return False
    an = analyze(walk)
    return all(k == 1 for k in an.kappa_nu.values())


@lru_cache(maxsize=None)
def cached_even_walks(s: int, ceiling: int = WALK_ENUMERATION_CEILING) -> tuple[Walk, ...]:
    return tuple(enumerate_even_walks(s, ceiling=ceiling))


# ---------------------------------------------------------------------------
# Structural verifications.


def verify_vertex_ledger(walk: Walk, analysis: WalkAnalysis | None = None) -> CheckReport:
    """Per-vertex in/out ledger and open-edge bounds.

    For every vertex: the number of non-marked exit steps equals the number of
    marked arrivals (split into mu/p/q parts), and at every instant the number
    of open attached frame edges is at most min(2 * kappa_nu, kappa_mu + exit
    degree), with the root's +1 conventions on both kappas.
    """
    an = analysis or analyze(walk)
    check = CheckReport(name="vertex-ledger", passed=True)
    lab = walk.labels
    nonmarked_exits: dict[int, int] = {v: 0 for v in an.vertices}
    for t in range(1, walk.n_steps + 1):
        if not an.marked[t - 1]:
            nonmarked_exits[lab[t - 1]] += 1
    for v in an.vertices:
        m_part = an.kappa_mu[v] - (1 if v == ROOT else 0)
        p_part = sum(1 for (_, head), _t in an.p_edges.items() if head == v)
        q_part = sum(
            1 for layer in an.q_layers for t in layer if lab[t] == v
        )
        arrivals = len(an.marked_arrivals[v])
        row = {
            "vertex": v,
            "nonmarked_exits": nonmarked_exits[v],
            "marked_arrivals": arrivals,
            "mu_part": m_part,
            "p_part": p_part,
            "q_part": q_part,
            "max_open_attached": an.max_open_attached[v],
            "open_bound_nu": 2 * an.kappa_nu[v],
            "open_bound_mu": an.kappa_mu[v] + an.exit_degree[v],
        }
        check.ledger.append(row)
        if nonmarked_exits[v] != arrivals:
            check.passed = False
            check.failures.append(f"vertex {v}: non-marked exits != marked arrivals")
        if m_part + p_part + q_part != arrivals:
            check.passed = False
            check.failures.append(f"vertex {v}: mu/p/q parts do not sum to arrivals")
        bound = min(2 * an.kappa_nu[v], an.kappa_mu[v] + an.exit_degree[v])
        if an.max_open_attached[v] > bound:
            check.passed = False
            check.failures.append(
                f"vertex {v}: open attached edges {an.max_open_attached[v]} > {bound}"
            )
    return check


def verify_exit_degree_tree_link(walk: Walk, analysis: WalkAnalysis | None = None) -> CheckReport:
    """Each vertex's exit cluster splits into at most 2 kappa + L groups, every
    group living inside one exit cluster of the underlying tree; hence the tree
    has a vertex of exit degree at least deg_e(beta) / (2 kappa(beta) + L)."""
    from .dyck import exit_degree_profile

    an = analysis or analyze(walk)
    check = CheckReport(name="exit-degree-tree-link", passed=True)
    if an.theta is None:
        return check
    tree_max = max(exit_degree_profile(an.theta))
    L = an.bts_total
    for v in an.vertices:
        d = an.exit_degree[v]
        if d == 0:
            continue
        groups = 2 * an.kappa_nu[v] + L
        check.ledger.append(
            {"vertex": v, "exit_degree": d, "cell_bound": groups, "tree_max_degree": tree_max}
        )
        if tree_max * groups < d:
            check.passed = False
            check.failures.append(
                f"vertex {v}: exit degree {d} unreachable from {groups} cells on a "
                f"tree of max degree {tree_max}"
            )
    return check


def verify_cell_bounds(walk: Walk, analysis: WalkAnalysis | None = None) -> CheckReport:
    """Imported-cell count bounds J <= remote BTS + kappa and Psi <= 2 kappa + L."""
    an = analysis or analyze(walk)
    check = CheckReport(name="cell-bounds", passed=True)
    L = an.bts_total
    for v in an.vertices:
        j = len(an.imported_cells[v])
        remote = an.bts_remote(v)
        kappa = an.kappa_nu[v]
        psi = len(an.primary_cells[v]) + j
        row = {
            "vertex": v,
            "imported": j,
            "remote_bts": remote,
            "kappa": kappa,
            "cells_total": psi,
            "bts_total": L,
        }
        check.ledger.append(row)
        if j > remote + kappa:
            check.passed = False
            check.failures.append(f"vertex {v}: J={j} > remote {remote} + kappa {kappa}")
        if psi > 2 * kappa + L:
            check.passed = False
            check.failures.append(f"vertex {v}: Psi={psi} > 2*{kappa} + {L}")
    return check


# ---------------------------------------------------------------------------
# Serialization.


def report_to_dict(an: WalkAnalysis) -> dict:
    """Stable JSON-ready summary of an analysis (documented schema)."""

    def edgekey(e: tuple[int, int]) -> str:
        return f"{e[0]}->{e[1]}"

    return {
        "walk": an.walk.to_string(),
        "s": an.s,
        "marked_steps": [t for t in range(1, an.walk.n_steps + 1) if an.marked[t - 1]],
        "dyck_path": str(an.theta) if an.theta is not None else None,
        "frame_passes": {f"{a}-{b}": m for (a, b), m in sorted(an.frame_passes.items())},
        "kappa_nu": {str(v): k for v, k in sorted(an.kappa_nu.items())},
        "kappa_mu": {str(v): k for v, k in sorted(an.kappa_mu.items())},
        "open_instants": list(an.open_instants),
        "exit_degree": {str(v): d for v, d in sorted(an.exit_degree.items())},
        "max_exit_degree": an.max_exit_degree,
        "mu_instants": {edgekey(e): t for e, t in sorted(an.mu_edges.items())},
        "p_instants": {edgekey(e): t for e, t in sorted(an.p_edges.items())},
        "q_layer_counts": list(an.q_counts),
        "p_count": an.p_count,
        "double_mu_count": an.double_mu_count,
        "reduced_walk": an.reduced.to_string(),
        "bts_instants": list(an.bts_instants),
        "primary_cells": {str(v): list(ts) for v, ts in sorted(an.primary_cells.items())},
        "imported_cells": {str(v): list(ts) for v, ts in sorted(an.imported_cells.items())},
    }


def report_to_json(an: WalkAnalysis) -> str:
    return json.dumps(report_to_dict(an), sort_keys=True, indent=2)
