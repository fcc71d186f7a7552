"""Alternative p-value distributions and two-group mixture models.

Under the fixed mixture model FM(m, m0, F) the first m0 p-values are i.i.d.
uniform (true nulls) and the remaining m - m0 are i.i.d. with c.d.f. F.  Under
the random mixture model RM(m, pi0, F) the number of true nulls is first drawn
as Binomial(m, pi0); unconditionally the p-values are i.i.d. with c.d.f.
G(t) = pi0*t + (1 - pi0)*F(t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = [
    "AlternativeCdf",
    "IdentityCdf",
    "GaussianLocationCdf",
    "DiracZeroCdf",
    "StepAtOneCdf",
    "ReflectedCdf",
    "MixtureConfig",
    "PValueSample",
    "eval_F",
    "eval_G",
    "sample",
    "cdf_from_config",
    "mixture_from_config",
    "normal_sf",
    "normal_isf",
]


def normal_sf(z):
    """Upper tail of the standard normal, P(Z >= z)."""
    return ndtr(-np.asarray(z, dtype=float))


def normal_isf(t):
    """Inverse of normal_sf."""
    return -ndtri(np.asarray(t, dtype=float))


class AlternativeCdf:
    """Base class for alternative p-value c.d.f.s on [0,1]."""

    kind = "abstract"
    continuous = True

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise ValueError("argument outside [0,1]")
        out = self._eval(t)
        return float(out) if np.ndim(out) == 0 else out

    def _eval(self, t):
        raise NotImplementedError

    def reflected(self) -> "AlternativeCdf":
        """C.d.f. of 1 - p when p has this c.d.f."""
        return ReflectedCdf(self)

    def sample_p(self, rng: np.random.Generator, shape):
        """Draw p-values with this distribution (sampling view)."""
        raise NotImplementedError

    def to_config(self) -> dict:
        return {"kind": self.kind}


class IdentityCdf(AlternativeCdf):
    """Uniform alternatives: F(t) = t."""

    kind = "identity"

    def _eval(self, t):
        return t

    def reflected(self):
        return self

    def sample_p(self, rng, shape):
        return rng.random(shape)


class GaussianLocationCdf(AlternativeCdf):
    """One-sided Gaussian location alternatives with mean mu > 0.

    F(t) is the c.d.f. of the p-value sf(X) for X ~ N(mu, 1), i.e.
    F(t) = sf(isf(t) - mu) = Phi(Phi^{-1}(t) + mu).
    """

    kind = "gaussian"

    def __init__(self, mu: float):
        if mu <= 0:
            raise ValueError(f"mu must be > 0, got {mu}")
        self.mu = float(mu)

    def _eval(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(invalid="ignore"):
            out = ndtr(ndtri(t) + self.mu)
        out = np.where(t <= 0.0, 0.0, out)
        out = np.where(t >= 1.0, 1.0, out)
        return out if out.ndim else float(out)

    def sample_p(self, rng, shape):
        return normal_sf(rng.standard_normal(shape) + self.mu)

    def to_config(self):
        return {"kind": "gaussian", "mu": self.mu}


class DiracZeroCdf(AlternativeCdf):
    """Point mass at zero (infinitely strong signal).

    Dual representation: sampling draws p = 0 exactly, while the c.d.f. used
    in the exact formulas is the limiting continuous representative F == 1
    (including F(0) = 1).
    """

    kind = "dirac_zero"

    def _eval(self, t):
        t = np.asarray(t, dtype=float)
        out = np.ones_like(t)
        return out if out.ndim else 1.0

    def reflected(self):
        return StepAtOneCdf()

    def sample_p(self, rng, shape):
        return np.zeros(shape)


class StepAtOneCdf(AlternativeCdf):
    """Point mass at one: F(t) = 1{t >= 1}.  Not continuous.

    Only the extreme-configuration closed forms and the Monte-Carlo engine
    accept this distribution; the exact recursions reject it.
    """

    kind = "step_at_one"
    continuous = False

    def _eval(self, t):
        t = np.asarray(t, dtype=float)
        out = (t >= 1.0).astype(float)
        return out if out.ndim else float(out)

    def reflected(self):
        return DiracZeroCdf()

    def sample_p(self, rng, shape):
        return np.ones(shape)


class ReflectedCdf(AlternativeCdf):
    """C.d.f. of 1 - p, i.e. t -> 1 - F(1 - t), for continuous F."""

    def __init__(self, base: AlternativeCdf):
        if not base.continuous:
            raise ValueError("reflection of a non-continuous c.d.f. is not supported here")
        self.base = base
        self.kind = f"reflected_{base.kind}"

    def _eval(self, t):
        t = np.asarray(t, dtype=float)
        out = 1.0 - np.asarray(self.base(1.0 - t))
        return out if out.ndim else float(out)

    def sample_p(self, rng, shape):
        return 1.0 - self.base.sample_p(rng, shape)


@dataclass(frozen=True)
class MixtureConfig:
    """Two-group model description: FM(m, m0, F) or RM(m, pi0, F)."""

    model: str  # "FM" or "RM"
    m: int
    F: AlternativeCdf
    m0: int | None = None
    pi0: float | None = None

    def __post_init__(self):
        if self.model not in ("FM", "RM"):
            raise ValueError(f"model must be 'FM' or 'RM', got {self.model!r}")
        if self.m < 2:
            raise ValueError(f"need m >= 2, got {self.m}")
        if self.model == "FM":
            if self.m0 is None or not 0 <= self.m0 <= self.m:
                raise ValueError(f"FM needs 0 <= m0 <= m, got m0={self.m0}")
        else:
            if self.pi0 is None or not 0.0 <= self.pi0 <= 1.0:
                raise ValueError(f"RM needs pi0 in [0,1], got pi0={self.pi0}")

    def to_config(self) -> dict:
        cfg = {"model": self.model, "m": self.m, "F": self.F.to_config()}
        if self.model == "FM":
            cfg["m0"] = self.m0
        else:
            cfg["pi0"] = self.pi0
        return cfg


@dataclass(frozen=True)
class PValueSample:
    """One realized p-value family; nulls occupy the first m0_realized slots."""

    p: np.ndarray
    m0_realized: int


def eval_F(F: AlternativeCdf, t):
    """Evaluate the alternative c.d.f., validating the argument range."""
    return F(t)


def eval_G(cfg: MixtureConfig, t):
    """Mixed c.d.f. G(t) = pi0*t + (1 - pi0)*F(t) of the RM model."""
    if cfg.model != "RM":
        raise ValueError("eval_G is defined for RM configurations only")
    t = np.asarray(t, dtype=float)
    out = cfg.pi0 * t + (1.0 - cfg.pi0) * np.asarray(cfg.F(t))
    return out if out.ndim else float(out)


def _draw_family(rng: np.random.Generator, m: int, m0: int, F: AlternativeCdf) -> np.ndarray:
    p = np.empty(m)
    p[:m0] = rng.random(m0)
    p[m0:] = F.sample_p(rng, m - m0)
    return p


def sample(cfg: MixtureConfig, seed: int) -> PValueSample:
    """Draw one p-value family; deterministic given (cfg, seed)."""
    rng = np.random.default_rng(seed)
    if cfg.model == "FM":
        m0 = cfg.m0
    else:
        m0 = int(rng.binomial(cfg.m, cfg.pi0))
    return PValueSample(p=_draw_family(rng, cfg.m, m0, cfg.F), m0_realized=m0)


def cdf_from_config(cfg: dict) -> AlternativeCdf:
    """Build an alternative c.d.f. from {"kind": ..., ...}."""
    kind = cfg.get("kind")
    if kind == "identity":
        return IdentityCdf()
    if kind == "gaussian":
        return GaussianLocationCdf(float(cfg["mu"]))
    if kind == "dirac_zero":
        return DiracZeroCdf()
    if kind == "step_at_one":
        return StepAtOneCdf()
    raise ValueError(f"unknown alternative c.d.f. kind: {kind!r}")


def mixture_from_config(cfg: dict) -> MixtureConfig:
    """Build a MixtureConfig from the JSON wire format."""
    model = cfg.get("model")
    F = cdf_from_config(cfg["F"])
    if model == "FM":
        return MixtureConfig(model="FM", m=int(cfg["m"]), m0=int(cfg["m0"]), F=F)
    if model == "RM":
        return MixtureConfig(model="RM", m=int(cfg["m"]), pi0=float(cfg["pi0"]), F=F)
    raise ValueError(f"unknown model: {model!r}")
