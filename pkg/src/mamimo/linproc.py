"""Linear receive combining / transmit precoding and related array-gain models.

Combining schemes (column k of V serves terminal k):

    MR:    V = Hhat
    ZF:    V = Hhat (Hhat^H Hhat)^-1
    MMSE:  V = (Hhat Hhat^H + (1/snr) I)^-1 Hhat

plus open-loop beamforming codebooks (fixed beam grids with index feedback)
and a stochastic per-antenna hardware-distortion model whose post-combining
residual shrinks with the array size.
"""

from dataclasses import dataclass

import numpy as np

from .channel import SCENARIO_IID_RAYLEIGH, SCENARIO_LOS_ULA, as_matrix, los_steering
from .errors import RankDeficiencyError

SCHEME_MR = "mr"
SCHEME_ZF = "zf"
SCHEME_MMSE = "mmse"

# Conditioning guard for the ZF Gram inverse.
_MAX_COND = 1e12


@dataclass
class CombinerMatrix:
    """M x K combining/precoding vectors produced by one scheme."""

    columns: np.ndarray
    scheme: str


@dataclass(frozen=True)
class Codebook:
    """L unit-norm beams; construction is 'los_grid' or 'isotropic_random'."""

    beams: np.ndarray
    construction: str

    @property
    def num_beams(self) -> int:
        return self.beams.shape[1]


@dataclass(frozen=True)
class DistortionModel:
    """Per-antenna additive distortion with power kappa x (received power)."""

    kappa: float

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")


def make_combiner(hhat, scheme: str, snr: float | None = None) -> CombinerMatrix:
    """Build the MR / ZF / MMSE combiner for an estimated channel.

    ZF requires M >= K and a well-conditioned Gram matrix; MMSE requires the
    operating snr for its regularization (1/snr diagonal loading, nothing
    else).
    """
    h = as_matrix(hhat)
    m, k = h.shape
    scheme = scheme.lower()
    if scheme == SCHEME_MR:
        v = h.copy()
    elif scheme == SCHEME_ZF:
        if m < k:
            raise RankDeficiencyError(f"ZF needs M >= K, got M={m}, K={k}")
        gram = h.conj().T @ h
        cond = np.linalg.cond(gram)
        if not np.isfinite(cond) or cond > _MAX_COND:
            raise RankDeficiencyError(
                f"ZF Gram matrix is rank deficient (cond={cond:.3e})", cond=float(cond)
            )
        v = h @ np.linalg.inv(gram)
    elif scheme == SCHEME_MMSE:
        if snr is None or snr <= 0:
            raise ValueError("MMSE combining requires a positive snr")
        a = h @ h.conj().T + (1.0 / snr) * np.eye(m)
        v = np.linalg.solve(a, h)
    else:
        raise ValueError(f"unknown combining scheme {scheme!r}")
    return CombinerMatrix(v, scheme)


def sinr_per_terminal(h, v, snr: float, link: str = "uplink") -> np.ndarray:
    """Per-terminal SINR for a true channel H and combiner/precoder V.

    Uplink (receive combining with v_k):

        SINR_k = snr |v_k^H h_k|^2 / (snr sum_{i != k} |v_k^H h_i|^2 + ||v_k||^2)

    Downlink (duality hook): V's columns are normalized and used as precoders
    with equal per-terminal power:

        SINR_k = snr |h_k^H w_k|^2 / (snr sum_{i != k} |h_k^H w_i|^2 + 1)
    """
    hm = as_matrix(h)
    vm = v.columns if isinstance(v, CombinerMatrix) else np.asarray(v)
    if hm.shape != vm.shape:
        raise ValueError(f"shape mismatch: H {hm.shape} vs V {vm.shape}")
    if link == "uplink":
        g = vm.conj().T @ hm  # K x K, row k = terminal k's combined channels
        sig = np.abs(np.diag(g)) ** 2
        interf = np.sum(np.abs(g) ** 2, axis=1) - sig
        noise = np.sum(np.abs(vm) ** 2, axis=0)
        return snr * sig / (snr * interf + noise)
    if link == "downlink":
        w = vm / np.linalg.norm(vm, axis=0, keepdims=True)
        g = hm.conj().T @ w  # row k = terminal k's received beams
        sig = np.abs(np.diag(g)) ** 2
        interf = np.sum(np.abs(g) ** 2, axis=1) - sig
        return snr * sig / (snr * interf + 1.0)
    raise ValueError(f"unknown link {link!r}")


def los_codebook(num_antennas: int, num_beams: int) -> Codebook:
    """Beams steering to sin(theta) gridded uniformly over [-1, 1).

    The grid quantizes the one scalar parameter that determines an LoS
    channel direction.
    """
    if num_beams < 1:
        raise ValueError("num_beams must be >= 1")
    sines = -1.0 + 2.0 * (np.arange(num_beams) + 0.5) / num_beams
    beams = los_steering(num_antennas, sines) / np.sqrt(num_antennas)
    return Codebook(beams, "los_grid")


def isotropic_codebook(num_antennas: int, num_beams: int, rng: np.random.Generator) -> Codebook:
    """L independent uniformly-random unit vectors (isotropic quantization)."""
    if num_beams < 1:
        raise ValueError("num_beams must be >= 1")
    g = rng.standard_normal((num_antennas, num_beams)) + 1j * rng.standard_normal(
        (num_antennas, num_beams)
    )
    return Codebook(g / np.linalg.norm(g, axis=0, keepdims=True), "isotropic_random")


def fig2b_codebook_size(num_antennas: int, cap: int = 50) -> int:
    """Codebook cap modelling a maximum permitted pilot overhead:
    L = M for M <= cap and L = cap beyond."""
    return min(num_antennas, cap)


def olb_array_gain(
    scenario: str,
    num_antennas: int,
    num_beams: int,
    trials: int,
    rng: np.random.Generator,
    snr_u: float | None = None,
) -> float:
    """Monte-Carlo average of max_l |f_l^H h|^2 with the scenario-matched codebook.

    Beam selection is noise-free (the terminal reports the truly best index);
    ``snr_u`` is accepted for interface symmetry with the pilot-based gain and
    is not used by the selection.
    """
    del snr_u
    gains = np.empty(trials)
    if scenario == SCENARIO_LOS_ULA:
        book = los_codebook(num_antennas, num_beams)
        for t in range(trials):
            theta = rng.uniform(-np.pi / 2, np.pi / 2)
            h = los_steering(num_antennas, np.array([np.sin(theta)]))[:, 0]
            gains[t] = np.max(np.abs(book.beams.conj().T @ h) ** 2)
    elif scenario == SCENARIO_IID_RAYLEIGH:
        for t in range(trials):
            book = isotropic_codebook(num_antennas, num_beams, rng)
            h = (rng.standard_normal(num_antennas) + 1j * rng.standard_normal(num_antennas)) / np.sqrt(2.0)
            gains[t] = np.max(np.abs(book.beams.conj().T @ h) ** 2)
    else:
        raise ValueError(f"unknown scenario {scenario!r}")
    return float(np.mean(gains))


def distortion_suppression(
    num_antennas: int,
    num_terminals: int,
    kappa: float,
    snr: float,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Post-MR-combining distortion-to-coherent-signal power ratio.

    Each antenna m adds distortion of power kappa * P_m, where P_m is the
    total received signal power at that antenna, uncorrelated across antennas.
    The channel is drawn per trial; the distortion power after combining is
    evaluated in closed form given the channel (E|v^H d|^2 = sum_m |v_m|^2
    kappa P_m), so the trivial M=1, K=1 case returns exactly kappa. Coherent
    combining scales the signal with M^2 but the distortion only with M, so
    the ratio decays like 1/M.
    """
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    if kappa == 0.0:
        return 0.0
    ratios = np.empty(trials)
    for t in range(trials):
        h = (
            rng.standard_normal((num_antennas, num_terminals))
            + 1j * rng.standard_normal((num_antennas, num_terminals))
        ) / np.sqrt(2.0)
        p_ant = snr * np.sum(np.abs(h) ** 2, axis=1)  # received power per antenna
        v = h[:, 0]  # MR for terminal 0
        dist_power = kappa * np.sum(np.abs(v) ** 2 * p_ant)
        sig_power = snr * np.sum(np.abs(v) ** 2) ** 2
        ratios[t] = dist_power / sig_power
    return float(np.mean(ratios))
