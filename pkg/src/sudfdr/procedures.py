"""Step-up-down rejection rule, false discovery proportion, and the
continuous threshold-selection operator.

The SUD procedure of order lambda first checks the ordered p-value at rank
lambda.  If it clears its threshold, the procedure steps *up* from lambda as
long as consecutive order statistics keep clearing their thresholds; otherwise
it steps *down* to the largest rank at or below lambda whose order statistic
clears its threshold.  lambda = 1 is the classical step-down, lambda = m the
classical step-up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sudfdr.thresholds import CriticalValueFunction, ThresholdCollection, from_rho

__all__ = [
    "SudOutcome",
    "EmpiricalCdf",
    "sud_khat",
    "fdp",
    "u_operator",
    "check_sandwich",
]


@dataclass(frozen=True)
class SudOutcome:
    """Result of applying an SUD rule to one realized p-value family.

    false_rejections and fdp are filled when the number of true nulls is
    supplied to sud_khat (nulls occupy the leading indices).
    """

    k_hat: int
    rejected: frozenset
    threshold: float
    false_rejections: int | None = None
    fdp: float | None = None

    @property
    def n_rejected(self) -> int:
        return len(self.rejected)


class EmpiricalCdf:
    """Right-continuous empirical c.d.f. of a p-value family."""

    def __init__(self, p):
        self.sorted = np.sort(np.asarray(p, dtype=float))
        self.m = len(self.sorted)

    def __call__(self, x):
        return np.searchsorted(self.sorted, x, side="right") / self.m


def sud_khat(p, t: ThresholdCollection, lam: int, m0: int | None = None) -> SudOutcome:
    """Apply the order-lambda SUD procedure with threshold collection t.

    Returns the selected rank k_hat and the rejection set
    {i : p_i <= t_{k_hat}} (with t_0 = 0).  Passing m0 also fills the
    false-rejection count and the FDP.
    """
    p = np.asarray(p, dtype=float)
    m = t.m
    if len(p) != m:
        raise ValueError(f"expected {m} p-values, got {len(p)}")
    if not 1 <= lam <= m:
        raise ValueError(f"lambda must be in [1, {m}], got {lam}")
    ps = np.sort(p)
    thr = t.as_array()
    below = ps <= thr
    if below[lam - 1]:
        # step-down branch: longest run of clearances starting at lambda
        k_hat = lam
        while k_hat < m and below[k_hat]:
            k_hat += 1
    else:
        # step-up branch: largest clearing rank at or below lambda (0 if none)
        idx = np.nonzero(below[:lam])[0]
        k_hat = int(idx[-1]) + 1 if len(idx) else 0
    t_sel = t[k_hat]
    rejected = frozenset(np.nonzero(p <= t_sel)[0].tolist()) if k_hat >= 1 else frozenset()
    v = f = None
    if m0 is not None:
        v = sum(1 for i in rejected if i < m0)
        f = v / max(len(rejected), 1)
    return SudOutcome(
        k_hat=k_hat,
        rejected=rejected,
        threshold=t_sel if k_hat >= 1 else 0.0,
        false_rejections=v,
        fdp=f,
    )


def fdp(outcome: SudOutcome, m0: int) -> float:
    """False discovery proportion, with nulls at indices 0..m0-1 and the
    usual max(rejections, 1) denominator guard."""
    false_rejections = sum(1 for i in outcome.rejected if i < m0)
    return false_rejections / max(len(outcome.rejected), 1)


def _u_grid_scan(tau: float, G: EmpiricalCdf, rho) -> float:
    """Exact evaluation on step functions: any solution is a fixed point of
    G o rho, hence lies on the grid {0, 1/m, ..., 1}."""
    m = G.m
    grid = np.arange(m + 1) / m
    vals = np.asarray(G(rho(grid)))
    k_tau = round(tau * m) if abs(tau * m - round(tau * m)) < 1e-9 else None
    g_tau = float(G(rho(tau)))
    if g_tau >= tau:
        start = k_tau if k_tau is not None else int(np.ceil(tau * m - 1e-12))
        for k in range(start, m + 1):
            if vals[k] <= grid[k] + 1e-15:
                return grid[k]
        return 1.0
    stop = k_tau if k_tau is not None else int(np.floor(tau * m + 1e-12))
    for k in range(stop, -1, -1):
        if vals[k] >= grid[k] - 1e-15:
            return grid[k]
    return 0.0


def _u_smooth(tau: float, G, rho, tol: float = 1e-12) -> float:
    """Scan-and-bisect solver for nondecreasing continuous G."""

    def h(u):
        return float(G(float(rho(u)))) - u

    n_scan = 4096
    if h(tau) >= 0.0:
        # min{u in [tau, 1] : G(rho(u)) <= u}
        if h(tau) == 0.0:
            return tau
        us = np.linspace(tau, 1.0, n_scan)
        hs = np.array([h(u) for u in us])
        idx = np.nonzero(hs <= 0.0)[0]
        if len(idx) == 0:
            return 1.0
        i = idx[0]
        if i == 0:
            return float(us[0])
        lo, hi = us[i - 1], us[i]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if h(mid) <= 0.0:
                hi = mid
            else:
                lo = mid
        return float(hi)
    # max{u in [0, tau] : G(rho(u)) >= u}
    us = np.linspace(0.0, tau, n_scan)
    hs = np.array([h(u) for u in us])
    idx = np.nonzero(hs >= 0.0)[0]
    if len(idx) == 0:
        return 0.0
    i = idx[-1]
    if i == n_scan - 1:
        return float(us[-1])
    lo, hi = us[i], us[i + 1]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if h(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return float(lo)


def u_operator(tau: float, G, rho) -> float:
    """Threshold-selection fixed point of G o rho anchored at tau.

    If G(rho(tau)) >= tau, returns the smallest u >= tau with G(rho(u)) <= u;
    otherwise the largest u <= tau with G(rho(u)) >= u.  Step functions
    (EmpiricalCdf) are handled exactly on their value grid; smooth G uses
    bisection to 1e-12.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0,1], got {tau}")
    if isinstance(G, EmpiricalCdf):
        return _u_grid_scan(tau, G, rho)
    return _u_smooth(tau, G, rho)


def check_sandwich(p, rho: CriticalValueFunction, m: int, lam: int) -> bool:
    """Check U(lambda/m, Ghat) <= k_hat/m <= U(lambda/m, (Ghat + 1/m) ^ 1)
    for one realization, with thresholds t_k = rho(k/m)."""
    t = from_rho(rho, m)
    out = sud_khat(p, t, lam)
    ghat = EmpiricalCdf(p)
    lower = u_operator(lam / m, ghat, rho)

    def g_upper(x):
        return np.minimum(np.asarray(ghat(x)) + 1.0 / m, 1.0)

    class _UpperStep(EmpiricalCdf):
        def __init__(self, base):
            self.sorted = base.sorted
            self.m = base.m

        def __call__(self, x):
            return g_upper(x)

    upper = _u_grid_scan(lam / m, _UpperStep(ghat), rho)
    k_over_m = out.k_hat / m
    return lower <= k_over_m + 1e-12 and k_over_m <= upper + 1e-12
