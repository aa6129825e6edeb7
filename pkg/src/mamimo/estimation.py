"""Uplink pilot-based MMSE channel estimation.

K terminals send mutually orthogonal pilots, so estimation decouples into
independent per-coefficient problems: each unit-variance Rayleigh coefficient
h is observed with total pilot energy tau_p * snr_u and its MMSE estimate is

    hhat = c * (h + w),   w ~ CN(0, 1/(tau_p * snr_u)),
    c    = (1 + 1/(tau_p * snr_u))^-1.

The scalar c (the CSI quality) equals E|hhat|^2 and is the factor by which
coherent array gain is reduced relative to perfect CSI.
"""

from dataclasses import dataclass

import numpy as np

from .channel import SCENARIO_IID_RAYLEIGH, ChannelMatrix
from .errors import UnsupportedScenarioError


@dataclass(frozen=True)
class PilotConfig:
    """Orthogonal pilot block: K pilots of length >= K at uplink SNR snr_u."""

    num_terminals: int
    snr_u: float
    pilot_length: int | None = None

    def __post_init__(self):
        if self.num_terminals < 1:
            raise ValueError("num_terminals must be >= 1")
        if self.snr_u <= 0:
            raise ValueError("snr_u must be positive")
        if self.pilot_length is None:
            object.__setattr__(self, "pilot_length", self.num_terminals)
        if self.pilot_length < self.num_terminals:
            raise ValueError("pilot_length must be >= num_terminals")


@dataclass
class ChannelEstimate:
    """MMSE channel estimate plus its scalar quality factor in (0, 1]."""

    estimate: np.ndarray
    csi_quality: float

    def __post_init__(self):
        if not 0 < self.csi_quality <= 1:
            raise ValueError("csi_quality must lie in (0, 1]")
        if not np.all(np.isfinite(self.estimate)):
            raise ValueError("estimate entries must be finite")


def csi_quality(num_terminals: int, snr_u: float) -> float:
    """CSI quality c = (1 + 1/(K*snr_u))^-1.

    Strictly increasing in both arguments; tends to 1 as pilot energy grows.
    """
    if num_terminals < 1:
        raise ValueError("num_terminals must be >= 1")
    if snr_u <= 0:
        raise ValueError("snr_u must be positive")
    return 1.0 / (1.0 + 1.0 / (num_terminals * snr_u))


def mmse_estimate(h: ChannelMatrix, pilots: PilotConfig, rng: np.random.Generator) -> ChannelEstimate:
    """Per-coefficient MMSE estimate of an i.i.d. Rayleigh channel.

    Returns hhat = c*(h + w) with w ~ CN(0, 1/(tau_p*snr_u)) i.i.d., so that
    E|hhat|^2 = c and the estimation error h - hhat is uncorrelated with hhat
    (orthogonality principle). Scenarios without the Rayleigh prior are
    rejected: the MMSE form below is specific to that prior.
    """
    if h.scenario != SCENARIO_IID_RAYLEIGH:
        raise UnsupportedScenarioError(
            f"MMSE estimation assumes the iid Rayleigh prior, got scenario {h.scenario!r}"
        )
    c = csi_quality(pilots.pilot_length, pilots.snr_u)
    noise_var = 1.0 / (pilots.pilot_length * pilots.snr_u)
    shape = h.entries.shape
    w = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(noise_var / 2.0)
    return ChannelEstimate(c * (h.entries + w), c)
