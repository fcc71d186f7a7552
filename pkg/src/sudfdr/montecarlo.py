"""Seeded Monte-Carlo estimation of FDR, FDP distribution, and k-FWER.

Plain Monte-Carlo only: it is the independent oracle for the exact formulas
and must stay simple.  Replicates are generated in fixed-size chunks, each
chunk drawing from its own RNG stream derived from (seed, chunk index), so a
run is bit-reproducible given (seed, n, config) no matter how the chunks are
scheduled.  Chunk aggregates are combined with exact (fsum) accumulation.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from sudfdr.models import MixtureConfig
from sudfdr.thresholds import ThresholdCollection

__all__ = [
    "McEstimate",
    "VerdictReport",
    "simulate_fdr",
    "simulate_fdr_sweep",
    "simulate_fdp_hist",
    "simulate_kfwer",
    "simulate_joint_counts",
    "cross_validate",
]

CHUNK = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float | None
    n_replicates: int
    seed: int
    per_bin: tuple | None = None


@dataclass(frozen=True)
class VerdictReport:
    passed: bool
    z_score: float
    exact: float
    estimate: McEstimate
    sigmas: float


def config_hash(t: ThresholdCollection, lam, cfg: MixtureConfig) -> str:
    payload = json.dumps(
        {"t": list(t.t), "lambda": lam, "cfg": cfg.to_config()}, sort_keys=True
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _sample_chunk(rng, cfg: MixtureConfig, size: int):
    """Draw `size` p-value families; returns (p, null_mask)."""
    m = cfg.m
    if cfg.model == "FM":
        m0 = np.full(size, cfg.m0)
    else:
        m0 = rng.binomial(m, cfg.pi0, size)
    u = rng.random((size, m))
    null_mask = np.arange(m)[None, :] < m0[:, None]
    kind = cfg.F.kind
    if kind == "identity":
        p = u
    elif kind == "dirac_zero":
        p = np.where(null_mask, u, 0.0)
    elif kind == "step_at_one":
        p = np.where(null_mask, u, 1.0)
    elif kind == "gaussian":
        # inverse-c.d.f. transform of the same uniforms
        p = np.where(null_mask, u, ndtr(ndtri(u) - cfg.F.mu))
    else:
        raise ValueError(f"unsupported alternative for sampling: {kind!r}")
    return p, null_mask


def _selection_tables(below: np.ndarray):
    """Per-replicate clearance summaries shared by every order lambda.

    run[:, k] is the length of the consecutive-clearance streak starting at
    rank k+1; prev[:, k] is the largest cleared rank at or before k+1 (0 if
    none).  Together they reduce each lambda to two gathers.
    """
    size, m = below.shape
    run = np.zeros((size, m), dtype=np.int32)
    run[:, m - 1] = below[:, m - 1]
    for k in range(m - 2, -1, -1):
        run[:, k] = below[:, k] * (run[:, k + 1] + 1)
    ranks = np.arange(1, m + 1, dtype=np.int32)
    prev = np.maximum.accumulate(np.where(below, ranks[None, :], 0), axis=1)
    return run, prev


def _khat_from_tables(below, run, prev, lam: int) -> np.ndarray:
    return np.where(below[:, lam - 1], lam - 1 + run[:, lam - 1], prev[:, lam - 1])


def _khat(below: np.ndarray, lam: int) -> np.ndarray:
    """Vectorized SUD rank selection from the sorted clearance matrix."""
    run, prev = _selection_tables(below)
    return _khat_from_tables(below, run, prev, lam)


def _chunk_outcomes(p, null_mask, t_arr, lam):
    """Per-replicate (khat, false rejections) for one chunk."""
    below = np.sort(p, axis=1) <= t_arr[None, :]
    khat = _khat(below, lam)
    thr = np.where(khat > 0, t_arr[np.maximum(khat - 1, 0)], -1.0)
    v = ((p <= thr[:, None]) & null_mask).sum(axis=1)
    return khat, v


def _iter_chunks(n: int):
    start = 0
    index = 0
    while start < n:
        yield index, min(CHUNK, n - start)
        start += CHUNK
        index += 1


def _mean_se(total: float, total_sq: float, n: int):
    mean = total / n
    if n < 2:
        return mean, None
    var = max(total_sq - n * mean * mean, 0.0) / (n - 1)
    return mean, math.sqrt(var / n)


def simulate_fdr(t: ThresholdCollection, lam: int, cfg: MixtureConfig, n: int, seed: int) -> McEstimate:
    """Sample mean of the FDP over n independent p-value families."""
    return simulate_fdr_sweep(t, [lam], cfg, n, seed)[lam]


def simulate_fdr_sweep(t: ThresholdCollection, lambdas, cfg: MixtureConfig, n: int, seed: int) -> dict:
    """simulate_fdr for several orders lambda sharing the same samples.

    Sharing the sampling and sorting pass across the lambda sweep keeps the
    dominant cost paid once; estimates for a given lambda are identical to a
    standalone simulate_fdr call with the same seed.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    t_arr = t.as_array()
    thr_table = np.concatenate(([-1.0], t_arr))  # thr_table[khat] = t_khat
    sums = {lam: [] for lam in lambdas}
    sums_sq = {lam: [] for lam in lambdas}
    for index, size in _iter_chunks(n):
        p, null_mask = _sample_chunk(_chunk_rng(seed, index), cfg, size)
        below = np.sort(p, axis=1) <= t_arr[None, :]
        run, prev = _selection_tables(below)
        null_p = np.where(null_mask, p, 2.0)  # sentinel above every threshold
        for lam in lambdas:
            khat = _khat_from_tables(below, run, prev, lam)
            thr = thr_table[khat]
            v = (null_p <= thr[:, None]).sum(axis=1)
            fdp = v / np.maximum(khat, 1)
            sums[lam].append(float(np.sum(fdp)))
            sums_sq[lam].append(float(np.sum(fdp * fdp)))
    out = {}
    for lam in lambdas:
        mean, se = _mean_se(math.fsum(sums[lam]), math.fsum(sums_sq[lam]), n)
        out[lam] = McEstimate(mean=mean, std_error=se, n_replicates=n, seed=seed)
    return out


def simulate_fdp_hist(
    t: ThresholdCollection, lam: int, cfg: MixtureConfig, n: int, bins: int, seed: int
) -> McEstimate:
    """Binned FDP frequencies; bin i covers [i/bins, (i+1)/bins), the last
    bin holding the atom at 1.  Mirrors the exact histogram convention."""
    if n < 1 or bins < 1:
        raise ValueError("need n >= 1 and bins >= 1")
    t_arr = t.as_array()
    counts = np.zeros(bins + 1, dtype=np.int64)
    total = []
    total_sq = []
    for index, size in _iter_chunks(n):
        p, null_mask = _sample_chunk(_chunk_rng(seed, index), cfg, size)
        khat, v = _chunk_outcomes(p, null_mask, t_arr, lam)
        fdp = v / np.maximum(khat, 1)
        idx = np.minimum(np.floor(fdp * bins + 1e-9).astype(np.int64), bins)
        counts += np.bincount(idx, minlength=bins + 1)
        total.append(float(np.sum(fdp)))
        total_sq.append(float(np.sum(fdp * fdp)))
    mean, se = _mean_se(math.fsum(total), math.fsum(total_sq), n)
    freq = counts / n
    bin_se = np.sqrt(np.maximum(freq * (1.0 - freq), 0.0) / n)
    per_bin = tuple((float(f), float(s)) for f, s in zip(freq, bin_se))
    return McEstimate(mean=mean, std_error=se, n_replicates=n, seed=seed, per_bin=per_bin)


def simulate_kfwer(
    t: ThresholdCollection, lam: int, cfg: MixtureConfig, k: int, n: int, seed: int
) -> McEstimate:
    """Frequency of {at least k false rejections}."""
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    t_arr = t.as_array()
    hits = []
    for index, size in _iter_chunks(n):
        p, null_mask = _sample_chunk(_chunk_rng(seed, index), cfg, size)
        _, v = _chunk_outcomes(p, null_mask, t_arr, lam)
        hits.append(int(np.sum(v >= k)))
    n_hits = sum(hits)
    mean, se = _mean_se(float(n_hits), float(n_hits), n)  # indicator: x^2 = x
    return McEstimate(mean=mean, std_error=se, n_replicates=n, seed=seed)


def simulate_joint_counts(
    t: ThresholdCollection, lam: int, cfg: MixtureConfig, n: int, seed: int
) -> np.ndarray:
    """Counts of (khat, false rejections) over n replicates; shape (m+1, m+1).

    With lam = m this samples the step-up joint law, with lam = 1 the
    step-down one.
    """
    t_arr = t.as_array()
    counts = np.zeros((t.m + 1, t.m + 1), dtype=np.int64)
    for index, size in _iter_chunks(n):
        p, null_mask = _sample_chunk(_chunk_rng(seed, index), cfg, size)
        khat, v = _chunk_outcomes(p, null_mask, t_arr, lam)
        np.add.at(counts, (khat, v), 1)
    return counts


def cross_validate(exact_value: float, mc: McEstimate, sigmas: float) -> VerdictReport:
    """Pass iff |exact - mc.mean| <= sigmas * mc.std_error."""
    if sigmas <= 0:
        raise ValueError(f"need sigmas > 0, got {sigmas}")
    diff = exact_value - mc.mean
    if not mc.std_error:
        # degenerate estimator (constant statistic or n = 1)
        passed = abs(diff) <= 1e-12
        z = 0.0 if passed else math.inf
    else:
        z = diff / mc.std_error
        passed = abs(diff) <= sigmas * mc.std_error
    return VerdictReport(passed=passed, z_score=z, exact=exact_value, estimate=mc, sigmas=sigmas)
