"""Exact joint distributions, FDR, and FDP distribution of SUD procedures.

For step-up and step-down procedures the joint law of (number of rejections,
number of falsely rejected nulls) has closed forms combining binomial
prefactors with boundary-noncrossing probabilities; a step-up-down procedure
of order lambda is a two-case combination of a step-up run on the capped
collection (t_lambda ^ t_j)_j and a step-down run on the floored collection
(t_lambda v t_j)_j, and the two cases partition the probability space.  All
FDR and FDP-distribution outputs are assembled from these joint masses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from sudfdr.models import AlternativeCdf, IdentityCdf, MixtureConfig
from sudfdr.steck import PsiTable, psi_prefix
from sudfdr.thresholds import ThresholdCollection, sd_part, su_part

__all__ = [
    "JointPmf",
    "FdrResult",
    "joint_su_rm",
    "joint_sd_rm",
    "joint_su_fm",
    "joint_sd_fm",
    "joint_pmf",
    "sud_joint_masses",
    "fdr_sud_fm",
    "fdr_sud_rm",
    "fdr_sud",
    "fdp_cdf",
    "fdp_pmf_histogram",
    "step_at_one_closed_forms",
]

SUM_TOL = 1e-8


def _pow0(base: float, exp: int) -> float:
    return 1.0 if exp == 0 else base**exp


def _require_continuous(F: AlternativeCdf):
    if not F.continuous:
        raise ValueError(
            "exact formulas require a continuous alternative c.d.f.; "
            "the point-mass-at-one distribution is only supported by the "
            "closed forms and the Monte-Carlo engine"
        )


def _fm_j_range(m: int, m0: int, k: int):
    return range(max(0, k - (m - m0)), min(m0, k) + 1)


@dataclass(frozen=True)
class JointPmf:
    """Triangular map (k, j) -> P(|R| = k, |R n nulls| = j)."""

    m: int
    entries: dict
    model_tag: str  # "FM" or "RM"
    procedure_tag: str  # "SU", "SD" or "SUD"

    def get(self, k: int, j: int) -> float:
        return self.entries.get((k, j), 0.0)

    def total(self) -> float:
        return math.fsum(self.entries.values())


@dataclass(frozen=True)
class FdrResult:
    fdr: float
    su_component: float
    sd_component: float
    config: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# joint mass tables for pure step-up / step-down procedures
# ---------------------------------------------------------------------------


def _su_fm_masses(t: ThresholdCollection, m0: int, F: AlternativeCdf) -> dict:
    """P(|R n nulls| = j, |R| = k) for the step-up procedure, fixed mixture."""
    m = t.m
    arr = t.as_array()
    s = 1.0 - arr[::-1]  # s_l = 1 - t_{m+1-l}, nondecreasing
    tab = PsiTable(s, F.reflected(), allow_degenerate=True)
    out = {}
    for k in range(m + 1):
        tk = t[k]
        Ftk = float(F(tk)) if k >= 1 else 1.0
        for j in _fm_j_range(m, m0, k):
            out[(k, j)] = (
                math.comb(m0, j)
                * math.comb(m - m0, k - j)
                * _pow0(tk, j)
                * _pow0(Ftk, k - j)
                * tab.get(m - k, m0 - j)
            )
    return out


def _sd_fm_masses(t: ThresholdCollection, m0: int, F: AlternativeCdf) -> dict:
    """Step-down counterpart of _su_fm_masses."""
    m = t.m
    tab = PsiTable(t.as_array(), F)
    out = {}
    for k in range(m + 1):
        tk1 = t[k + 1]  # t_{m+1} = 1 convention
        Ftk1 = float(F(tk1))
        for j in _fm_j_range(m, m0, k):
            out[(k, j)] = (
                math.comb(m0, j)
                * math.comb(m - m0, k - j)
                * _pow0(1.0 - tk1, m0 - j)
                * _pow0(1.0 - Ftk1, (m - m0) - (k - j))
                * tab.get(k, j)
            )
    return out


def _su_rm_masses(t: ThresholdCollection, pi0: float, F: AlternativeCdf) -> dict:
    """Step-up joint masses in the random mixture model."""
    m = t.m
    arr = t.as_array()
    g = pi0 * arr + (1.0 - pi0) * np.asarray(F(arr), dtype=float)
    s = np.maximum(1.0 - g[::-1], 0.0)
    psi1 = psi_prefix(s)
    out = {}
    for k in range(m + 1):
        tk = t[k]
        Ftk = float(F(tk)) if k >= 1 else 1.0
        tail = float(psi1[m - k])
        for j in range(k + 1):
            out[(k, j)] = (
                math.comb(m, j)
                * math.comb(m - j, k - j)
                * _pow0(pi0, j)
                * _pow0(1.0 - pi0, k - j)
                * _pow0(tk, j)
                * _pow0(Ftk, k - j)
                * tail
            )
    return out


def _sd_rm_masses(t: ThresholdCollection, pi0: float, F: AlternativeCdf) -> dict:
    """Step-down joint masses in the random mixture model."""
    m = t.m
    tab = PsiTable(t.as_array(), F)
    out = {}
    for k in range(m + 1):
        tk1 = t[k + 1]
        g1 = pi0 * tk1 + (1.0 - pi0) * float(F(tk1))
        for j in range(k + 1):
            out[(k, j)] = (
                math.comb(m, j)
                * math.comb(m - j, k - j)
                * _pow0(pi0, j)
                * _pow0(1.0 - pi0, k - j)
                * _pow0(max(1.0 - g1, 0.0), m - k)
                * tab.get(k, j)
            )
    return out


# ---------------------------------------------------------------------------
# single-entry accessors (shared contract)
# ---------------------------------------------------------------------------


def joint_su_rm(t: ThresholdCollection, k: int, j: int, pi0: float, F: AlternativeCdf) -> float:
    """P(|R n nulls| = j, |R| = k) for R = SU(t) in RM(m, pi0, F)."""
    _require_continuous(F)
    _check_rm_indices(t.m, k, j)
    return _su_rm_masses(t, pi0, F)[(k, j)]


def joint_sd_rm(t: ThresholdCollection, k: int, j: int, pi0: float, F: AlternativeCdf) -> float:
    """P(|R n nulls| = j, |R| = k) for R = SD(t) in RM(m, pi0, F)."""
    _require_continuous(F)
    _check_rm_indices(t.m, k, j)
    return _sd_rm_masses(t, pi0, F)[(k, j)]


def joint_su_fm(t: ThresholdCollection, k: int, j: int, m0: int, F: AlternativeCdf) -> float:
    """P(|R n nulls| = j, |R| = k) for R = SU(t) in FM(m, m0, F)."""
    _require_continuous(F)
    _check_fm_indices(t.m, m0, k, j)
    return _su_fm_masses(t, m0, F)[(k, j)]


def joint_sd_fm(t: ThresholdCollection, k: int, j: int, m0: int, F: AlternativeCdf) -> float:
    """P(|R n nulls| = j, |R| = k) for R = SD(t) in FM(m, m0, F)."""
    _require_continuous(F)
    _check_fm_indices(t.m, m0, k, j)
    return _sd_fm_masses(t, m0, F)[(k, j)]


def _check_rm_indices(m: int, k: int, j: int):
    if not (0 <= k <= m and 0 <= j <= k):
        raise ValueError(f"need 0 <= j <= k <= m, got k={k}, j={j}, m={m}")


def _check_fm_indices(m: int, m0: int, k: int, j: int):
    if not 0 <= k <= m:
        raise ValueError(f"need 0 <= k <= m, got k={k}")
    if j not in _fm_j_range(m, m0, k):
        raise ValueError(
            f"j={j} outside the admissible range "
            f"[{max(0, k - (m - m0))}, {min(m0, k)}] for k={k}, m0={m0}, m={m}"
        )


def joint_pmf(t: ThresholdCollection, cfg: MixtureConfig, procedure: str) -> JointPmf:
    """Full joint table for a pure step-up ("SU") or step-down ("SD") rule."""
    _require_continuous(cfg.F)
    if t.m != cfg.m:
        raise ValueError("threshold collection and model disagree on m")
    if procedure not in ("SU", "SD"):
        raise ValueError(f"procedure must be 'SU' or 'SD', got {procedure!r}")
    if cfg.model == "FM":
        builder = _su_fm_masses if procedure == "SU" else _sd_fm_masses
        entries = builder(t, cfg.m0, cfg.F)
    else:
        builder = _su_rm_masses if procedure == "SU" else _sd_rm_masses
        entries = builder(t, cfg.pi0, cfg.F)
    return JointPmf(m=t.m, entries=entries, model_tag=cfg.model, procedure_tag=procedure)


# ---------------------------------------------------------------------------
# SUD combination
# ---------------------------------------------------------------------------


def sud_joint_masses(t: ThresholdCollection, lam: int, cfg: MixtureConfig) -> JointPmf:
    """Joint (k, j) masses of the order-lambda SUD procedure.

    Ranks k < lambda come from the step-up rule on (t_lambda ^ t_j)_j, ranks
    k >= lambda from the step-down rule on (t_lambda v t_j)_j; the two events
    partition the probability space.
    """
    _require_continuous(cfg.F)
    m = t.m
    if t.m != cfg.m:
        raise ValueError("threshold collection and model disagree on m")
    if not 1 <= lam <= m:
        raise ValueError(f"lambda must be in [1, {m}], got {lam}")
    tsu = su_part(t, lam)
    tsd = sd_part(t, lam)
    if cfg.model == "FM":
        su = _su_fm_masses(tsu, cfg.m0, cfg.F)
        sd = _sd_fm_masses(tsd, cfg.m0, cfg.F)
    else:
        su = _su_rm_masses(tsu, cfg.pi0, cfg.F)
        sd = _sd_rm_masses(tsd, cfg.pi0, cfg.F)
    entries = {kj: v for kj, v in su.items() if kj[0] < lam}
    entries.update({kj: v for kj, v in sd.items() if kj[0] >= lam})
    return JointPmf(m=m, entries=entries, model_tag=cfg.model, procedure_tag="SUD")


def _fdr_from_masses(pmf: JointPmf, lam: int) -> FdrResult:
    su_terms = [j / k * v for (k, j), v in pmf.entries.items() if 1 <= k < lam]
    sd_terms = [j / k * v for (k, j), v in pmf.entries.items() if k >= lam]
    su_sum = math.fsum(su_terms)
    sd_sum = math.fsum(sd_terms)
    return FdrResult(fdr=su_sum + sd_sum, su_component=su_sum, sd_component=sd_sum)


def fdr_sud_fm(t: ThresholdCollection, lam: int, m0: int, F: AlternativeCdf) -> FdrResult:
    """Exact FDR of the order-lambda SUD procedure in FM(m, m0, F)."""
    if not 0 <= m0 <= t.m:
        raise ValueError(f"need 0 <= m0 <= m, got m0={m0}")
    cfg_echo = {"model": "FM", "m": t.m, "m0": m0, "F": F.to_config(), "lambda": lam}
    if m0 == 0:
        if not 1 <= lam <= t.m:
            raise ValueError(f"lambda must be in [1, {t.m}], got {lam}")
        return FdrResult(0.0, 0.0, 0.0, cfg_echo)
    if m0 == t.m:
        F = IdentityCdf()  # no alternatives drawn; avoids an irrelevant table
    cfg = MixtureConfig(model="FM", m=t.m, m0=m0, F=F)
    res = _fdr_from_masses(sud_joint_masses(t, lam, cfg), lam)
    return FdrResult(res.fdr, res.su_component, res.sd_component, cfg_echo)


def fdr_sud_rm(t: ThresholdCollection, lam: int, pi0: float, F: AlternativeCdf) -> FdrResult:
    """Exact FDR of the order-lambda SUD procedure in RM(m, pi0, F)."""
    if not 0.0 <= pi0 <= 1.0:
        raise ValueError(f"need pi0 in [0,1], got {pi0}")
    cfg_echo = {"model": "RM", "m": t.m, "pi0": pi0, "F": F.to_config(), "lambda": lam}
    if pi0 == 0.0:
        if not 1 <= lam <= t.m:
            raise ValueError(f"lambda must be in [1, {t.m}], got {lam}")
        return FdrResult(0.0, 0.0, 0.0, cfg_echo)
    cfg = MixtureConfig(model="RM", m=t.m, pi0=pi0, F=F)
    res = _fdr_from_masses(sud_joint_masses(t, lam, cfg), lam)
    return FdrResult(res.fdr, res.su_component, res.sd_component, cfg_echo)


def fdr_sud(t: ThresholdCollection, lam: int, cfg: MixtureConfig) -> FdrResult:
    if t.m != cfg.m:
        raise ValueError("threshold collection and model disagree on m")
    if cfg.model == "FM":
        return fdr_sud_fm(t, lam, cfg.m0, cfg.F)
    return fdr_sud_rm(t, lam, cfg.pi0, cfg.F)


# ---------------------------------------------------------------------------
# FDP distribution
# ---------------------------------------------------------------------------


def fdp_cdf(t: ThresholdCollection, lam: int, cfg: MixtureConfig, x: float) -> float:
    """P(FDP(SUD_lambda(t)) <= x) for x in (0,1).

    The zero-rejection event carries FDP = 0 and is always included.
    """
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must be in (0,1), got {x}")
    pmf = sud_joint_masses(t, lam, cfg)
    terms = [
        v
        for (k, j), v in pmf.entries.items()
        if k == 0 or j <= math.floor(x * k + 1e-12)
    ]
    return min(math.fsum(terms), 1.0)


def fdp_pmf_histogram(t: ThresholdCollection, lam: int, cfg: MixtureConfig, bins: int) -> np.ndarray:
    """Bin masses P(FDP in [i/bins, (i+1)/bins)) for i = 0..bins.

    The final entry holds the atom at FDP = 1; entry 0 includes P(FDP = 0).
    Masses sum to 1 up to the documented tolerance.
    """
    if bins < 1:
        raise ValueError(f"need bins >= 1, got {bins}")
    pmf = sud_joint_masses(t, lam, cfg)
    buckets = [[] for _ in range(bins + 1)]
    for (k, j), v in pmf.entries.items():
        f = j / k if k >= 1 else 0.0
        idx = min(int(math.floor(f * bins + 1e-9)), bins)
        buckets[idx].append(v)
    return np.asarray([math.fsum(b) for b in buckets])


def fdp_mean(t: ThresholdCollection, lam: int, cfg: MixtureConfig) -> float:
    """Expectation of the FDP taken over the joint masses (equals the FDR)."""
    pmf = sud_joint_masses(t, lam, cfg)
    return math.fsum(j / k * v for (k, j), v in pmf.entries.items() if k >= 1)


# ---------------------------------------------------------------------------
# extreme-configuration closed forms
# ---------------------------------------------------------------------------


def step_at_one_closed_forms(m: int, m0: int, t0: float):
    """Closed-form FDRs for alternatives fixed at 1 and thresholds
    (t0, ..., t0, 1).

    Every SUD of order lambda in {1, ..., m-1} has FDR 1 - (1-t0)^m0 while
    the step-up has FDR m0/m; the step-down exceeds the step-up once t0
    passes the returned crossover value.
    """
    if not 0.0 < t0 < 1.0:
        raise ValueError(f"need t0 in (0,1), got {t0}")
    if not 1 <= m0 <= m:
        raise ValueError(f"need 1 <= m0 <= m, got m0={m0}, m={m}")
    fdr_sud_val = 1.0 - (1.0 - t0) ** m0
    fdr_su_val = m0 / m
    crossover = 1.0 - (1.0 - m0 / m) ** (1.0 / m0)
    return fdr_sud_val, fdr_su_val, crossover
