"""Max-min fairness downlink power control.

Each terminal k has a CSI quality c_k and a nominal downlink SNR S_k (its SNR
under equal power sharing). Power-control coefficients eta_k in [0, K] with
sum eta_k <= K reshape the budget; the common rate R is feasible iff

    c_k * M * S_k * eta_k >= (2^R - 1) * (S_k * sum_i eta_i + 1)   for all k.

For fixed R these constraints are linear in eta, so the max-min problem is
quasi-linear: we bisect on R with an exact feasibility test. The minimal
feasible eta at rate R makes every constraint tight, giving the fixed point

    eta_k = a_k + b_k * P,  a_k = g/(c_k M S_k),  b_k = g/(c_k M),
    P = sum(a) / (1 - sum(b)),                    g = 2^R - 1,

which is feasible iff sum(b) < 1, P <= K and every eta_k <= K. Rates are
returned without the pilot prelog; callers reattach (1 - K/tau) when
reporting net spectral efficiency.
"""

from dataclasses import dataclass, field

import numpy as np

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible-target"

_BISECTION_ITERATIONS = 64


@dataclass(frozen=True)
class UserLink:
    """Per-terminal large-scale state: CSI quality and nominal downlink SNR."""

    csi_quality: float
    snr_d: float

    def __post_init__(self):
        if not 0 < self.csi_quality <= 1:
            raise ValueError("csi_quality must lie in (0, 1]")
        if self.snr_d < 0:
            raise ValueError("snr_d must be >= 0")


@dataclass
class PowerAllocation:
    """K power-control coefficients, each in [0, K], summing to at most K."""

    eta: np.ndarray

    def __post_init__(self):
        self.eta = np.asarray(self.eta, dtype=float)
        k = self.eta.size
        if np.any(self.eta < -1e-12) or np.any(self.eta > k + 1e-9):
            raise ValueError("eta coefficients must lie in [0, K]")
        if self.eta.sum() > k * (1 + 1e-9):
            raise ValueError("eta coefficients must sum to at most K")


@dataclass
class MaxMinSolution:
    rate: float
    allocation: PowerAllocation
    status: str = STATUS_OPTIMAL
    limiting_user: int | None = field(default=None)


def _links_arrays(links) -> tuple[np.ndarray, np.ndarray]:
    c = np.asarray([l.csi_quality for l in links], dtype=float)
    s = np.asarray([l.snr_d for l in links], dtype=float)
    return c, s


def feasibility_at_rate(links, num_antennas: int, rate: float):
    """Exact feasibility test for a common rate R.

    Returns (True, eta) with the componentwise-minimal feasible allocation, or
    (False, reason). Rate 0 is always feasible with eta = 0.
    """
    if rate < 0:
        raise ValueError("rate must be >= 0")
    c, s = _links_arrays(links)
    k = c.size
    if rate == 0:
        return True, np.zeros(k)
    g = 2.0**rate - 1.0
    dead = c * s == 0
    if np.any(dead):
        user = int(np.argmax(dead))
        return False, f"user {user} has zero effective channel (c*S = 0); only R = 0 is feasible"
    a = g / (c * num_antennas * s)
    b = g / (c * num_antennas)
    b_sum = b.sum()
    if b_sum >= 1.0:
        return False, f"sum of rate loads {b_sum:.6f} >= 1: no finite power meets R = {rate:.6f}"
    total = a.sum() / (1.0 - b_sum)
    if total > k:
        return False, f"required total power {total:.6f} exceeds the budget K = {k}"
    eta = a + b * total
    if np.any(eta > k):
        user = int(np.argmax(eta))
        return False, f"user {user} needs eta = {eta[user]:.6f} > K = {k}"
    return True, eta


def maxmin_power_control(links, num_antennas: int, tol: float = 1e-9) -> MaxMinSolution:
    """Largest common rate R (within relative ``tol``) and an allocation
    achieving it.

    Bisection brackets R between 0 and the single-user-takes-all bound
    log2(1 + max_k c_k * M * S_k); at most 64 iterations. The returned
    allocation is the tight fixed point at the final feasible R, so every
    terminal's achieved rate equals R up to float rounding.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    c, s = _links_arrays(links)
    k = c.size
    if k < 1:
        raise ValueError("need at least one user link")
    dead = c * s == 0
    if np.any(dead):
        return MaxMinSolution(
            rate=0.0,
            allocation=PowerAllocation(np.zeros(k)),
            status=STATUS_INFEASIBLE,
            limiting_user=int(np.argmax(dead)),
        )
    lo, lo_eta = 0.0, np.zeros(k)
    hi = float(np.log2(1.0 + np.max(c * num_antennas * s)))
    for _ in range(_BISECTION_ITERATIONS):
        mid = 0.5 * (lo + hi)
        ok, eta = feasibility_at_rate(links, num_antennas, mid)
        if ok:
            lo, lo_eta = mid, eta
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, lo):
            break
    return MaxMinSolution(rate=lo, allocation=PowerAllocation(lo_eta))


def achieved_rates(links, num_antennas: int, eta: np.ndarray) -> np.ndarray:
    """Per-terminal rates log2(1 + c M S eta / (S sum(eta) + 1)) at a given
    allocation."""
    c, s = _links_arrays(links)
    eta = np.asarray(eta, dtype=float)
    total = eta.sum()
    return np.log2(1.0 + c * num_antennas * s * eta / (s * total + 1.0))
