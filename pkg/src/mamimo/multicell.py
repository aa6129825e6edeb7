"""Multi-cell sum spectral efficiency with pilot reuse and contamination.

This module uses a deliberately small surrogate system model (the reference
deployment it stands in for is not fully specified anywhere reproducible), so
its outputs are qualitative: curve shapes, optimizer locations, and trends.
The model, in full:

* Square wrap-around grid of ``num_cells`` (a perfect square, default 4)
  square cells of side 2*R with the BS at the center; terminals are dropped
  uniformly per cell outside an exclusion disk of 0.1*R. Distances use the
  torus metric. Pathloss is d^-alpha with alpha = 3.7.
* Statistical channel inversion: terminal k of cell l transmits so that its
  received SNR at its own BS is rho0 (default -5 dB). The received SNR at
  BS j is then a[j,l,k] = rho0 * (d_{l,lk} / d_{j,lk})^alpha.
* Pilot reuse factor f in {1, 2, 4}: cells are colored into f groups
  (f=1 all share, f=2 checkerboard, f=4 fully orthogonal on a 2x2 grid), and
  pilots of length tau_p = f*K cost f*K symbols of the tau-symbol block.
* MMSE estimation contaminated by same-group cells. The mean-square coherent
  gain attributable to user k of cell l at BS j is

      coh[j,l,k] = tau_p * a[j,l,k]^2 / (1 + tau_p * sum_{l' in group(j)} a[j,l',k]).

* Hardening (use-and-forget) SINR bounds, per terminal k of cell j:

      MR:  M * coh[j,j,k] / (1 + A_j + M * C_jk)
      ZF:  (M-K) * coh[j,j,k] / (1 + A_j - E_j + (M-K) * C_jk)

  with A_j the total received power sum_{l,i} a[j,l,i], C_jk the
  contamination sum_{l in group(j), l != j} coh[j,l,k], and E_j the estimated
  coherent power sum_{l in group(j), i} coh[j,l,i] that ZF projects away.
* Per-cell sum SE = (1 - f*K/tau) * mean_j sum_k log2(1 + SINR_jk), averaged
  over terminal drops.

With inter-cell gains switched off (``isolated=True``) and f = 1, the MR
expression collapses exactly to the single-cell closed form in
:mod:`mamimo.capacity`, which is how the model is cross-checked.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError

SCHEME_MR = "mr"
SCHEME_ZF = "zf"
REUSE_FACTORS = (1, 2, 4)


@dataclass(frozen=True)
class CellGrid:
    """Wrap-around square deployment; ``isolated`` zeroes inter-cell gains."""

    num_cells: int = 4
    pathloss_exponent: float = 3.7
    cell_radius: float = 250.0
    min_distance_factor: float = 0.1
    isolated: bool = False

    def __post_init__(self):
        side = int(round(np.sqrt(self.num_cells)))
        if side * side != self.num_cells or self.num_cells < 4:
            raise ValueError("num_cells must be a perfect square >= 4")
        if self.pathloss_exponent <= 2:
            raise ValueError("pathloss_exponent must exceed 2")
        if self.cell_radius <= 0:
            raise ValueError("cell_radius must be positive")

    @property
    def side(self) -> int:
        return int(round(np.sqrt(self.num_cells)))

    def bs_positions(self) -> np.ndarray:
        d = 2.0 * self.cell_radius
        coords = [((i + 0.5) * d, (j + 0.5) * d) for i in range(self.side) for j in range(self.side)]
        return np.asarray(coords)

    def pilot_groups(self, reuse_factor: int) -> np.ndarray:
        """Cell coloring for a reuse factor; same color = shared pilots."""
        if reuse_factor not in REUSE_FACTORS:
            raise ValueError(f"reuse factor must be one of {REUSE_FACTORS}")
        idx = np.arange(self.num_cells)
        i, j = idx // self.side, idx % self.side
        if reuse_factor == 1:
            return np.zeros(self.num_cells, dtype=int)
        if reuse_factor == 2:
            return (i + j) % 2
        return 2 * (i % 2) + (j % 2)


@dataclass(frozen=True)
class ReuseConfig:
    """Pilot reuse across cells; pilots cost factor * K symbols per block."""

    factor: int

    def __post_init__(self):
        if self.factor not in REUSE_FACTORS:
            raise ValueError(f"reuse factor must be one of {REUSE_FACTORS}")


def draw_received_snr(grid: CellGrid, num_terminals: int, snr: float, rng: np.random.Generator) -> np.ndarray:
    """Received-SNR tensor a[j, l, k] for one uniform terminal drop.

    Channel-inversion power control makes a[l, l, k] = snr exactly; cross
    gains follow the torus pathloss ratios.
    """
    n = grid.num_cells
    if num_terminals == 0:
        return np.zeros((n, n, 0))
    d_cell = 2.0 * grid.cell_radius
    span = grid.side * d_cell
    bs = grid.bs_positions()
    # rejection-sample positions outside the exclusion disk of the own BS
    pos = np.empty((n, num_terminals, 2))
    for l in range(n):
        need = num_terminals
        out = []
        while need > 0:
            cand = bs[l] - grid.cell_radius + d_cell * rng.random((need, 2))
            r = np.linalg.norm(cand - bs[l], axis=1)
            keep = cand[r >= grid.min_distance_factor * grid.cell_radius]
            out.append(keep)
            need -= len(keep)
        pos[l] = np.concatenate(out)[:num_terminals]
    delta = np.abs(pos[None, :, :, :] - bs[:, None, None, :])  # (j, l, k, 2)
    delta = np.minimum(delta, span - delta)  # wrap-around
    dist = np.sqrt(np.sum(delta**2, axis=-1))  # (j, l, k)
    own = dist[np.arange(n), np.arange(n), :]  # (l, k)
    ratio = (own[None, :, :] / dist) ** grid.pathloss_exponent
    a = snr * ratio
    if grid.isolated:
        mask = np.eye(n, dtype=bool)[:, :, None]
        a = np.where(mask, a, 0.0)
    return a


def _sinr(a: np.ndarray, num_antennas: int, num_terminals: int, scheme: str, groups: np.ndarray, tau_p: int) -> np.ndarray:
    """Per-terminal SINR (cells x terminals) from a received-SNR tensor."""
    n = a.shape[0]
    k = num_terminals
    a = a[:, :, :k]
    same = groups[:, None] == groups[None, :]  # (j, l) share pilots
    denom_p = 1.0 + tau_p * np.einsum("jlk,jl->jk", a, same.astype(float))
    coh = tau_p * a**2 / denom_p[:, None, :]  # (j, l, k), valid where same
    coh = coh * same[:, :, None]
    own = coh[np.arange(n), np.arange(n), :]  # (j, k)
    contamination = coh.sum(axis=1) - own  # (j, k)
    total_power = a.sum(axis=(1, 2))  # (j,)
    if scheme == SCHEME_MR:
        num = num_antennas * own
        den = 1.0 + total_power[:, None] + num_antennas * contamination
    elif scheme == SCHEME_ZF:
        if num_antennas < k:
            raise InfeasibleError(f"ZF needs M >= K, got M={num_antennas}, K={k}")
        gain = num_antennas - k
        estimated = coh.sum(axis=(1, 2))  # (j,)
        num = gain * own
        den = 1.0 + (total_power - estimated)[:, None] + gain * contamination
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return num / den


def multicell_sum_se(
    num_antennas: int,
    num_terminals: int,
    tau: int,
    scheme: str,
    reuse: ReuseConfig,
    grid: CellGrid,
    snr: float,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo per-cell sum SE (bit/s/Hz/cell) under the surrogate model.

    Zero terminals, or pilots filling the whole block (f*K = tau), give 0;
    f*K > tau is infeasible.
    """
    f = reuse.factor
    if f * num_terminals > tau:
        raise InfeasibleError(f"pilot overhead f*K = {f * num_terminals} exceeds tau = {tau}")
    if num_terminals == 0 or f * num_terminals == tau:
        return 0.0
    groups = grid.pilot_groups(f)
    tau_p = f * num_terminals
    prelog = 1.0 - tau_p / tau
    acc = 0.0
    for _ in range(trials):
        a = draw_received_snr(grid, num_terminals, snr, rng)
        sinr = _sinr(a, num_antennas, num_terminals, scheme, groups, tau_p)
        acc += np.mean(np.sum(np.log2(1.0 + sinr), axis=1))
    return float(prelog * acc / trials)


def sweep_k(
    num_antennas: int,
    tau: int,
    scheme: str,
    grid: CellGrid,
    snr: float,
    k_values,
    trials: int,
    rng: np.random.Generator | None = None,
    drops: list[np.ndarray] | None = None,
) -> list[dict]:
    """SE for each K with the reuse factor optimized per point.

    All K values share the same terminal drops (positions for the largest K
    are drawn once per trial and truncated), so the curve is smooth except
    for the kinks where the optimal reuse factor switches. Precomputed drops
    may be passed to share them across schemes.
    """
    k_values = [int(k) for k in k_values]
    k_max = max(k_values)
    if drops is None:
        if rng is None:
            raise ValueError("provide either rng or precomputed drops")
        drops = [draw_received_snr(grid, k_max, snr, rng) for _ in range(trials)]
    if any(d.shape[2] < k_max for d in drops):
        raise ValueError("precomputed drops are smaller than the largest K")
    rows = []
    for k in k_values:
        if scheme == SCHEME_ZF and k > num_antennas:
            continue
        best = None
        for f in REUSE_FACTORS:
            if f * k >= tau:
                continue
            groups = grid.pilot_groups(f)
            tau_p = f * k
            prelog = 1.0 - tau_p / tau
            acc = 0.0
            for a in drops:
                sinr = _sinr(a, num_antennas, k, scheme, groups, tau_p)
                acc += np.mean(np.sum(np.log2(1.0 + sinr), axis=1))
            se = prelog * acc / len(drops)
            if best is None or se > best[1]:
                best = (f, se)
        if best is not None:
            rows.append({"K": k, "scheme": scheme, "reuse": best[0], "sum_se": float(best[1])})
    return rows


def optimal_k(
    num_antennas: int,
    tau: int,
    scheme: str,
    grid: CellGrid,
    snr: float,
    trials: int,
    rng: np.random.Generator,
    k_values=None,
) -> tuple[int, int, float]:
    """(K*, f*, se*) maximizing the per-cell sum SE over the K sweep."""
    if k_values is None:
        k_hi = min(tau - 1, 2 * num_antennas)
        k_values = range(1, k_hi + 1)
    rows = sweep_k(num_antennas, tau, scheme, grid, snr, k_values, trials, rng)
    if not rows:
        raise InfeasibleError("no feasible (K, reuse) point in the sweep")
    best = max(rows, key=lambda r: r["sum_se"])
    return best["K"], best["reuse"], best["sum_se"]


def reuse_crossover(rows: list[dict]) -> int | None:
    """Smallest K at which the optimal reuse factor differs from the one at
    the smallest K in the sweep, or None if it never switches."""
    if not rows:
        return None
    first = rows[0]["reuse"]
    for r in rows[1:]:
        if r["reuse"] != first:
            return r["K"]
    return None
