"""Coded uplink link-level simulation: QPSK, rate-1/2 LDPC, MR combining with
estimated channels.

Per coherence interval (default 200 symbols) a fresh i.i.d. Rayleigh channel
is drawn and MMSE-estimated from the K orthogonal pilots; all K terminals'
QPSK symbols are then MR-combined. The combined signal of terminal k is
treated as

    r = g * s + z,  g = sqrt(snr) * ||hhat_k||^2,

with z (residual interference + noise + estimation mismatch) modelled as
Gaussian, giving the per-rail LLRs  2*sqrt(2)/sigma^2 * Re/Im(conj(g) * r).
The residual variance is evaluated per interval from receiver-known
quantities (the estimates themselves and the per-coefficient error variance
1 - c):

    sigma_k^2 = snr * sum_{i != k} |hhat_k^H hhat_i|^2
              + snr * K * (1 - c) * ||hhat_k||^2  +  ||hhat_k||^2,

which is the exact conditional variance given the estimates. A 200-sample
empirical variance was measured to cost roughly a decade of BER near the
waterfall, so it is not used. Channel hardening is what makes the Gaussian
treatment accurate at large M.
"""

from dataclasses import dataclass

import numpy as np

from .channel import ArrayGeometry, draw_iid_rayleigh
from .estimation import PilotConfig, mmse_estimate
from .ldpc import LdpcCode, decode_batch, encode, extract_info
from .seeding import spawn_rng

DEFAULT_COHERENCE_SYMBOLS = 200
_SIGMA2_FLOOR = 1e-12


@dataclass(frozen=True)
class BerPoint:
    """One (SNR, codeword length) measurement; censored marks zero observed
    errors (not enough bits to resolve the true rate)."""

    snr_db: float
    codeword_length: int
    errors: int
    bits_simulated: int

    @property
    def ber(self) -> float:
        return self.errors / self.bits_simulated if self.bits_simulated else 0.0

    @property
    def censored(self) -> bool:
        return self.errors == 0


def qpsk_modulate(bits: np.ndarray) -> np.ndarray:
    """Gray-mapped QPSK, unit symbol energy; bit pairs (b0, b1) -> (I, Q)."""
    b = np.asarray(bits, dtype=np.float64)
    if b.size % 2:
        raise ValueError("QPSK needs an even number of bits")
    i = 1.0 - 2.0 * b[0::2]
    q = 1.0 - 2.0 * b[1::2]
    return (i + 1j * q) / np.sqrt(2.0)


def _combine_segment(h, hhat, symbols, snr, rng):
    """MR-combine one coherence interval; returns (r, gains) per terminal."""
    m, k = h.shape
    t = symbols.shape[1]
    noise = (rng.standard_normal((m, t)) + 1j * rng.standard_normal((m, t))) / np.sqrt(2.0)
    y = np.sqrt(snr) * (h @ symbols) + noise
    r = hhat.conj().T @ y  # (k, t)
    gains = np.sqrt(snr) * np.sum(np.abs(hhat) ** 2, axis=0)
    return r, gains


def _residual_variance(hhat, csi, snr):
    """Conditional variance of the post-combining residual per terminal."""
    k = hhat.shape[1]
    gram = hhat.conj().T @ hhat
    cross = np.sum(np.abs(gram) ** 2, axis=1) - np.abs(np.diag(gram)) ** 2
    norms = np.sum(np.abs(hhat) ** 2, axis=0)
    return np.maximum(snr * cross + snr * k * (1.0 - csi) * norms + norms, _SIGMA2_FLOOR)


def _segment_llrs(r, gains, sigma2):
    """Per-rail LLRs for r = g*s + z with z ~ CN(0, sigma^2)."""
    y = gains[:, None] * r  # gains are real
    scale = (2.0 * np.sqrt(2.0) / sigma2)[:, None]
    out = np.empty((r.shape[0], 2 * r.shape[1]))
    out[:, 0::2] = scale * y.real
    out[:, 1::2] = scale * y.imag
    return out


def simulate_block(
    code: LdpcCode,
    num_antennas: int,
    num_terminals: int,
    snr: float,
    rng: np.random.Generator,
    max_iterations: int = 50,
    coherence_symbols: int = DEFAULT_COHERENCE_SYMBOLS,
) -> tuple[int, int]:
    """One transmission round: K terminals, one codeword each.

    Returns (info-bit errors, info bits sent) accumulated over all terminals.
    """
    geom = ArrayGeometry(num_antennas, 2e9)
    pilots = PilotConfig(num_terminals, snr)
    k_info = code.k
    info = rng.integers(0, 2, size=(num_terminals, k_info)).astype(np.uint8)
    symbols = np.empty((num_terminals, code.n // 2), dtype=np.complex128)
    for u in range(num_terminals):
        symbols[u] = qpsk_modulate(encode(code, info[u]))

    n_sym = symbols.shape[1]
    llrs = np.empty((num_terminals, code.n))
    for start in range(0, n_sym, coherence_symbols):
        stop = min(start + coherence_symbols, n_sym)
        h = draw_iid_rayleigh(geom, num_terminals, rng)
        est = mmse_estimate(h, pilots, rng)
        r, gains = _combine_segment(h.entries, est.estimate, symbols[:, start:stop], snr, rng)
        sigma2 = _residual_variance(est.estimate, est.csi_quality, snr)
        llrs[:, 2 * start : 2 * stop] = _segment_llrs(r, gains, sigma2)

    bits, _ = decode_batch(code, llrs, max_iterations)
    errors = 0
    for u in range(num_terminals):
        errors += int(np.sum(extract_info(code, bits[u]) != info[u]))
    return errors, num_terminals * k_info


def run_uplink_ber(
    num_antennas: int,
    num_terminals: int,
    snr_db_list,
    code: LdpcCode,
    blocks_per_point: int,
    seed: int,
    max_iterations: int = 50,
    coherence_symbols: int = DEFAULT_COHERENCE_SYMBOLS,
) -> list[BerPoint]:
    """BER sweep over SNR points; blocks use independently derived streams."""
    points = []
    for si, snr_db in enumerate(snr_db_list):
        snr = 10.0 ** (snr_db / 10.0)
        errors = 0
        bits = 0
        for b in range(blocks_per_point):
            rng = spawn_rng(seed, code.n, si, b)
            e, nb = simulate_block(
                code, num_antennas, num_terminals, snr, rng, max_iterations, coherence_symbols
            )
            errors += e
            bits += nb
        points.append(BerPoint(float(snr_db), code.n, errors, bits))
    return points


def residual_samples(
    num_antennas: int,
    num_terminals: int,
    snr: float,
    num_segments: int,
    rng: np.random.Generator,
    coherence_symbols: int = DEFAULT_COHERENCE_SYMBOLS,
) -> np.ndarray:
    """Real-valued residual interference-plus-noise samples after combining.

    Used to check how Gaussian the effective channel is (excess kurtosis near
    zero at large M).
    """
    geom = ArrayGeometry(num_antennas, 2e9)
    pilots = PilotConfig(num_terminals, snr)
    out = []
    for _ in range(num_segments):
        bits = rng.integers(0, 2, size=(num_terminals, 2 * coherence_symbols)).astype(np.uint8)
        symbols = np.vstack([qpsk_modulate(bits[u]) for u in range(num_terminals)])
        h = draw_iid_rayleigh(geom, num_terminals, rng)
        est = mmse_estimate(h, pilots, rng)
        r, gains = _combine_segment(h.entries, est.estimate, symbols, snr, rng)
        z = r - gains[:, None] * symbols
        out.append(np.concatenate([z.real.ravel(), z.imag.ravel()]))
    return np.concatenate(out)


def excess_kurtosis(samples: np.ndarray) -> float:
    x = np.asarray(samples, dtype=np.float64)
    x = x - x.mean()
    var = np.mean(x**2)
    return float(np.mean(x**4) / var**2 - 3.0)


def hardening_statistic(m_list, trials: int, rng: np.random.Generator) -> dict[int, float]:
    """Variance of ||h||^2 / M per antenna count (1/M for i.i.d. Rayleigh)."""
    if trials < 10**3:
        raise ValueError("need at least 1e3 trials for a stable variance estimate")
    out = {}
    for m in m_list:
        h = (rng.standard_normal((trials, m)) + 1j * rng.standard_normal((trials, m))) / np.sqrt(2.0)
        gain = np.sum(np.abs(h) ** 2, axis=1) / m
        out[int(m)] = float(np.var(gain))
    return out
