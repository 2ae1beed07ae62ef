"""Seeded sampling of the matrix ensembles and spectral-edge statistics.

Every replicate draws from its own counter-based Philox stream keyed by
(seed, replicate index), so results are bit-reproducible no matter how
replicates are scheduled. Entries are drawn in a fixed order (upper triangle
row-major, then the dilution mask), which makes a dilute run at c = n
reproduce the corresponding Wigner run entry for entry.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .laws import GoeLaw
from .moments import MomentSpec, TruncationSpec, dilute_spec, truncated_spec, wigner_spec


@dataclass(frozen=True)
class EnsembleConfig:
    n: int
    law: object
    truncation: TruncationSpec | None = None
    dilution_c: int | None = None
    seed: int = 20240229

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.dilution_c is not None and not 1 <= self.dilution_c <= self.n:
            raise ValueError("dilution concentration must satisfy 1 <= c <= n")

    def descriptor(self) -> dict:
        out = {"n": self.n, "seed": self.seed}
        out.update(self.law.descriptor())
        if self.truncation is not None:
            out["truncation"] = {
                "delta": self.truncation.delta,
                "eta": self.truncation.eta,
            }
        if self.dilution_c is not None:
            out["dilution_c"] = self.dilution_c
        return out

    def fingerprint(self) -> str:
        blob = json.dumps(self.descriptor(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def moment_spec(self) -> MomentSpec:
        """The exact-moment counterpart of this sampling configuration."""
        if self.dilution_c is not None:
            return dilute_spec(self.law, self.n, self.dilution_c)
        if self.truncation is not None:
            return truncated_spec(self.truncation, self.n)
        return wigner_spec(self.law, self.n)


def _rng(config: EnsembleConfig, replicate: int) -> np.random.Generator:
    key = np.array(
        [config.seed & 0xFFFFFFFFFFFFFFFF, replicate & 0xFFFFFFFFFFFFFFFF],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def sample_entries(config: EnsembleConfig, replicate: int) -> np.ndarray:
    """Raw upper-triangle entries (row-major, diagonal included), untruncated."""
    n = config.n
    rng = _rng(config, replicate)
    return rng, config.law.sample(rng, n * (n + 1) // 2)


def sample_matrix(config: EnsembleConfig, replicate: int) -> np.ndarray:
    """One symmetric matrix draw, scaled by 1/sqrt(n) (or masked and 1/sqrt(c))."""
    n = config.n
    rng, vals = sample_entries(config, replicate)
    if isinstance(config.law, GoeLaw):
        # double the diagonal variance
        iu = np.triu_indices(n)
        diag_positions = np.flatnonzero(iu[0] == iu[1])
        vals = vals.copy()
        vals[diag_positions] *= math.sqrt(2.0)
    if config.truncation is not None:
        cutoff = config.truncation.cutoff(n)
        vals = np.where(np.abs(vals) <= cutoff, vals, 0.0)
    if config.dilution_c is not None:
        c = config.dilution_c
        mask = rng.random(vals.shape[0]) < c / n
        vals = vals * mask / math.sqrt(c)
    else:
        vals = vals / math.sqrt(n)
    mat = np.zeros((n, n))
    iu = np.triu_indices(n)
    mat[iu] = vals
    mat.T[iu] = vals
    return mat


def spectral_stats(matrix: np.ndarray, s_list: tuple[int, ...]) -> dict:
    """Largest absolute eigenvalue and even trace powers from the spectrum."""
    eigs = np.linalg.eigvalsh(matrix)
    lam = max(abs(eigs[0]), abs(eigs[-1]))
    return {
        "lambda_max": float(lam),
        "traces": {s: float(np.sum(eigs ** (2 * s))) for s in s_list},
    }


@dataclass
class SampleStats:
    """Per-replicate spectral statistics plus aggregates."""

    config: EnsembleConfig
    replicates: int
    s_list: tuple[int, ...]
    lambda_max: np.ndarray = field(repr=False, default=None)
    traces: dict[int, np.ndarray] = field(repr=False, default_factory=dict)
    failed_replicates: list[int] = field(default_factory=list)

    def trace_mean(self, s: int) -> float:
        return float(np.mean(self.traces[s]))

    def trace_std(self, s: int) -> float:
        return float(np.std(self.traces[s], ddof=1))

    def trace_ci(self, s: int, z: float = 1.96) -> tuple[float, float]:
        half = z * self.trace_std(s) / math.sqrt(len(self.traces[s]))
        m = self.trace_mean(s)
        return (m - half, m + half)

    def zscore_against(self, s: int, exact_value: float) -> float:
        se = self.trace_std(s) / math.sqrt(len(self.traces[s]))
        return (self.trace_mean(s) - exact_value) / se

    def rows(self) -> list[dict]:
        out = []
        for i in range(len(self.lambda_max)):
            row = {"replicate": i, "lambda_max": float(self.lambda_max[i])}
            for s in self.s_list:
                row[f"trace_{2*s}"] = float(self.traces[s][i])
            out.append(row)
        return out


def sample_stats(
    config: EnsembleConfig, replicates: int, s_list: tuple[int, ...] = (1, 2, 3, 4)
) -> SampleStats:
    lam = np.empty(replicates)
    traces = {s: np.empty(replicates) for s in s_list}
    failed: list[int] = []
    filled = 0
    for rep in range(replicates):
        mat = sample_matrix(config, rep)
        try:
            stats = spectral_stats(mat, tuple(s_list))
        except np.linalg.LinAlgError:
            failed.append(rep)
            continue
        lam[filled] = stats["lambda_max"]
        for s in s_list:
            traces[s][filled] = stats["traces"][s]
        filled += 1
    lam = lam[:filled]
    traces = {s: a[:filled] for s, a in traces.items()}
    return SampleStats(
        config=config,
        replicates=replicates,
        s_list=tuple(s_list),
        lambda_max=lam,
        traces=traces,
        failed_replicates=failed,
    )


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials == 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass
class TailCurve:
    config: EnsembleConfig
    scale: str
    x_grid: tuple[float, ...]
    thresholds: tuple[float, ...]
    exceed_counts: tuple[int, ...]
    replicates: int
    chebyshev_s: int | None = None
    chebyshev_bounds: tuple[float, ...] | None = None

    def probabilities(self) -> list[float]:
        return [c / self.replicates for c in self.exceed_counts]

    def intervals(self) -> list[tuple[float, float]]:
        return [wilson_interval(c, self.replicates) for c in self.exceed_counts]

    def rows(self) -> list[dict]:
        out = []
        probs = self.probabilities()
        cis = self.intervals()
        for i, x in enumerate(self.x_grid):
            row = {
                "x": x,
                "threshold": self.thresholds[i],
                "probability": probs[i],
                "ci_low": cis[i][0],
                "ci_high": cis[i][1],
                "exceed_count": self.exceed_counts[i],
                "replicates": self.replicates,
            }
            if self.chebyshev_bounds is not None:
                row["chebyshev_bound"] = self.chebyshev_bounds[i]
            out.append(row)
        return out


def tail_curve(
    config: EnsembleConfig,
    x_grid: tuple[float, ...],
    scale: str = "wigner",
    replicates: int = 1000,
    chebyshev_s: int | None = None,
) -> TailCurve:
    """Empirical exceedance of lambda_max over 2v (1 + x / n^(2/3)) or 2v (1 + x / c).

    Also reports, per grid point, the Markov-style bound mean(Tr A^(2s)) /
    threshold^(2s) estimated from the same replicates when chebyshev_s is set.
    """
    if replicates < 100:
        raise ValueError("at least 100 replicates are required for a tail curve")
    v = float(config.law.v)
    if scale == "wigner":
        denom = config.n ** (2.0 / 3.0)
    elif scale == "dilute":
        if config.dilution_c is None:
            raise ValueError("dilute scale needs a dilution concentration")
        denom = float(config.dilution_c)
    else:
        raise ValueError("scale must be 'wigner' or 'dilute'")
    thresholds = tuple(2 * v * (1 + x / denom) for x in x_grid)
    s_list = (chebyshev_s,) if chebyshev_s else ()
    stats = sample_stats(config, replicates, s_list=s_list or (1,))
    lam = stats.lambda_max
    counts = tuple(int(np.sum(lam > thr)) for thr in thresholds)
    cheb = None
    if chebyshev_s:
        mean_trace = stats.trace_mean(chebyshev_s)
        cheb = tuple(
            mean_trace / thr ** (2 * chebyshev_s) if thr > 0 else math.inf
            for thr in thresholds
        )
    return TailCurve(
        config=config,
        scale=scale,
        x_grid=tuple(x_grid),
        thresholds=thresholds,
        exceed_counts=counts,
        replicates=len(lam),
        chebyshev_s=chebyshev_s,
        chebyshev_bounds=cheb,
    )


def universality_compare(
    config_a: EnsembleConfig,
    config_b: EnsembleConfig,
    s: int,
    replicates: int,
) -> dict:
    """Compare mean (1/n) Tr A^(2s) between two ensembles of the same (n, v).

    The agreement verdict asks whether the difference of means stays within
    three pooled per-replicate standard deviations: the exact finite-n means
    of two entry laws provably differ at order 1/n, so with many replicates a
    standard-error z-test would flag that known systematic difference rather
    than anything interesting. The z-score against the standard error is
    reported alongside for reference.
    """
    if config_a.n != config_b.n:
        raise ValueError("configs must share the dimension n")
    a = sample_stats(config_a, replicates, s_list=(s,))
    b = sample_stats(config_b, replicates, s_list=(s,))
    n = config_a.n
    mean_a = a.trace_mean(s) / n
    mean_b = b.trace_mean(s) / n
    sd_a = a.trace_std(s) / n
    sd_b = b.trace_std(s) / n
    pooled_sd = math.sqrt((sd_a**2 + sd_b**2) / 2)
    se = math.sqrt(sd_a**2 / len(a.traces[s]) + sd_b**2 / len(b.traces[s]))
    diff = mean_a - mean_b
    return {
        "n": n,
        "s": s,
        "replicates": replicates,
        "mean_a": mean_a,
        "mean_b": mean_b,
        "difference": diff,
        "pooled_sd": pooled_sd,
        "se_of_difference": se,
        "z_vs_se": diff / se if se else math.inf,
        "effect_in_sd": diff / pooled_sd if pooled_sd else math.inf,
        "agrees_within_3sd": abs(diff) <= 3 * pooled_sd,
    }


def truncation_event_rate(config: EnsembleConfig, replicates: int) -> dict:
    """Empirical probability that some raw entry exceeds the truncation level."""
    if config.truncation is None:
        raise ValueError("config has no truncation")
    cutoff = config.truncation.cutoff(config.n)
    hits = 0
    for rep in range(replicates):
        _rng_obj, vals = sample_entries(config, rep)
        if np.any(np.abs(vals) > cutoff):
            hits += 1
    rate = hits / replicates
    ci = wilson_interval(hits, replicates)
    out = {
        "n": config.n,
        "replicates": replicates,
        "cutoff": cutoff,
        "rate": rate,
        "ci_low": ci[0],
        "ci_high": ci[1],
    }
    delta0 = config.truncation.delta0
    if delta0 is not None:
        order = 12 + 2 * delta0
        abs_moment = config.law.abs_moment(order)
        out["moment_order"] = order
        out["union_bound"] = config.n**2 * abs_moment / cutoff**order
    return out
