"""Sum capacity, the favorable-propagation bound, and the closed-form
spectral efficiency for MR processing with estimated CSI.

The closed form (per cell, bit/s/Hz) is

    K * (1 - K/tau) * log2(1 + c * M * snr / (K * snr + 1)),

with c the CSI quality from :func:`mamimo.estimation.csi_quality`. The same
expression covers uplink and downlink by inserting the corresponding SNR; it
can be inverted in closed form for the SNR needed to hit a target efficiency.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .channel import as_matrix
from .errors import InfeasibleError
from .estimation import csi_quality


@dataclass(frozen=True)
class CoherenceBlock:
    """tau = round(B_c * T_c) symbols over which the channel is static."""

    coherence_bandwidth_hz: float
    coherence_time_s: float

    def __post_init__(self):
        if self.num_symbols < 1:
            raise ValueError("coherence block must contain at least one symbol")

    @property
    def num_symbols(self) -> int:
        return int(round(self.coherence_bandwidth_hz * self.coherence_time_s))


@dataclass(frozen=True)
class SpectralEfficiencyPoint:
    """One evaluated operating point (se in bit/s/Hz/cell)."""

    num_antennas: int
    num_terminals: int
    tau: int
    snr: float
    link: str
    se: float

    def __post_init__(self):
        if self.se < 0:
            raise ValueError("se must be >= 0")
        bound = fp_bound(self.num_antennas, self.num_terminals, self.snr)
        if self.se > bound * (1 + 1e-12):
            raise ValueError(f"se {self.se} exceeds the favorable-propagation bound {bound}")


def sum_capacity(h, snr: float) -> float:
    """log2 det(I + snr * H H^H), the multi-user sum capacity with perfect CSI.

    Achieved by nonlinear processing (dirty-paper coding downlink, successive
    interference cancellation uplink); by duality the value stands for either
    link. Evaluated on the K x K Gram form for speed.
    """
    hm = as_matrix(h)
    if not np.all(np.isfinite(hm)):
        raise ValueError("channel entries must be finite")
    if snr <= 0:
        raise ValueError("snr must be positive")
    k = hm.shape[1]
    gram = hm.conj().T @ hm
    sign, logdet = np.linalg.slogdet(np.eye(k) + snr * gram)
    if sign <= 0:
        raise ValueError("capacity determinant is not positive")
    return float(logdet / np.log(2.0))


def fp_bound(num_antennas: int, num_terminals: int, snr: float) -> float:
    """Favorable-propagation sum capacity K * log2(1 + M * snr).

    Attained exactly when the K channel columns are mutually orthogonal with
    squared norm M; an upper bound on :func:`sum_capacity` otherwise.
    """
    if snr <= 0:
        raise ValueError("snr must be positive")
    return num_terminals * np.log2(1.0 + num_antennas * snr)


def se_closed_form(
    num_antennas: int,
    num_terminals: int,
    tau: int,
    snr: float,
    link: str = "uplink",
    with_prelog: bool = True,
    snr_u: float | None = None,
) -> float:
    """Closed-form sum spectral efficiency for MR with estimated CSI.

    The CSI quality is always computed from the uplink SNR (``snr_u``), which
    defaults to ``snr``; pass it explicitly when evaluating a downlink whose
    uplink SNR differs. ``with_prelog=False`` omits the (1 - K/tau) pilot
    overhead factor.
    """
    if link not in ("uplink", "downlink"):
        raise ValueError(f"unknown link {link!r}")
    if snr <= 0:
        raise ValueError("snr must be positive")
    k, m = num_terminals, num_antennas
    if with_prelog:
        # K == tau is allowed and gives 0 (every symbol spent on pilots)
        if not 1 <= k <= tau:
            raise ValueError(f"need 1 <= K <= tau, got K={k}, tau={tau}")
        prelog = 1.0 - k / tau
    else:
        prelog = 1.0
    c = csi_quality(k, snr if snr_u is None else snr_u)
    return float(k * prelog * np.log2(1.0 + c * m * snr / (k * snr + 1.0)))


def snr_threshold(num_antennas: int, num_terminals: int, target_se: float) -> float:
    """Linear SNR at which the closed form (without prelog) meets ``target_se``.

    With c = K*s/(K*s + 1), the per-terminal target t = target_se/K turns the
    closed form into the quadratic

        (M*K - K^2 * g) * s^2 - 2*K*g * s - g = 0,      g = 2^t - 1,

    whose unique positive root is returned. The target is reachable only if
    t < log2(1 + M/K), the infinite-SNR limit.
    """
    m, k = num_antennas, num_terminals
    if target_se < 0:
        raise ValueError("target_se must be >= 0")
    if target_se == 0:
        return 0.0
    t = target_se / k
    limit = np.log2(1.0 + m / k)
    if t >= limit:
        raise InfeasibleError(
            f"target {target_se} bit/s/Hz is unreachable: the infinite-SNR limit is "
            f"{k * limit:.4f} bit/s/Hz for M={m}, K={k}"
        )
    g = 2.0**t - 1.0
    a = m * k - k * k * g
    b = -2.0 * k * g
    c = -g
    disc = b * b - 4.0 * a * c
    return float((-b + np.sqrt(disc)) / (2.0 * a))


def drop_worst_terminals(h, snr: float, n_drop: int) -> np.ndarray:
    """Indices of the K - n_drop terminals kept after greedy dropping.

    One terminal is removed at a time, always the one whose removal leaves
    the largest sum capacity. Greedy keeps the cost at O(n_drop * K) capacity
    evaluations; exhaustive subset search is reserved for test oracles.
    """
    hm = as_matrix(h)
    k = hm.shape[1]
    if not 0 <= n_drop < k:
        raise ValueError(f"need 0 <= n_drop < K, got n_drop={n_drop}, K={k}")
    kept = list(range(k))
    for _ in range(n_drop):
        best_capacity = -np.inf
        best_idx = None
        for idx in range(len(kept)):
            cols = kept[:idx] + kept[idx + 1 :]
            cap = sum_capacity(hm[:, cols], snr)
            if cap > best_capacity:
                best_capacity = cap
                best_idx = idx
        kept.pop(best_idx)
    return np.asarray(kept, dtype=np.intp)


def best_subset_capacity(h, snr: float, n_keep: int) -> tuple[tuple[int, ...], float]:
    """Exhaustive best-subset search; exponential in K, intended for oracles."""
    hm = as_matrix(h)
    k = hm.shape[1]
    best = (None, -np.inf)
    for subset in itertools.combinations(range(k), n_keep):
        cap = sum_capacity(hm[:, subset], snr)
        if cap > best[1]:
            best = (subset, cap)
    return best


def broadcast_penalty(num_antennas: int, num_terminals: int, csi: float) -> float:
    """Power ratio c * M / K by which an unprecoded broadcast signal is weaker
    than the user-specific precoded signals."""
    if num_antennas < 1 or num_terminals < 1 or csi <= 0:
        raise ValueError("all arguments must be positive")
    return csi * num_antennas / num_terminals
