"""Channel realizations and array form-factor arithmetic.

Two single-cell propagation extremes are modelled:

* isotropic scattering -- i.i.d. circularly-symmetric complex Gaussian entries
  with unit variance ("iid_rayleigh"),
* pure line of sight to a uniform linear array with half-wavelength spacing
  ("los_ula"), where each terminal's channel is a steering vector at an angle
  drawn uniformly on [-pi/2, pi/2).

Large-scale fading is deliberately absent: single-cell experiments carry all
terminal asymmetry in their SNR parameters.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.constants import speed_of_light

SCENARIO_IID_RAYLEIGH = "iid_rayleigh"
SCENARIO_LOS_ULA = "los_ula"


@dataclass(frozen=True)
class ArrayGeometry:
    """Base-station array: element count, carrier, and element spacing.

    Spacing is expressed in carrier wavelengths (0.5 = half-wavelength grid).
    """

    num_antennas: int
    carrier_frequency_hz: float
    element_spacing_wavelengths: float = 0.5

    def __post_init__(self):
        if self.num_antennas < 1:
            raise ValueError("num_antennas must be >= 1")
        if self.carrier_frequency_hz <= 0:
            raise ValueError("carrier_frequency_hz must be positive")
        if self.element_spacing_wavelengths <= 0:
            raise ValueError("element_spacing_wavelengths must be positive")

    @property
    def wavelength_m(self) -> float:
        return speed_of_light / self.carrier_frequency_hz


@dataclass(frozen=True)
class PropagationScenario:
    """A named propagation environment serving ``num_terminals`` terminals."""

    variant: str
    num_terminals: int

    def __post_init__(self):
        if self.variant not in (SCENARIO_IID_RAYLEIGH, SCENARIO_LOS_ULA):
            raise ValueError(f"unknown scenario variant {self.variant!r}")
        if self.num_terminals < 1:
            raise ValueError("num_terminals must be >= 1")

    def draw(self, geometry: ArrayGeometry, rng: np.random.Generator) -> "ChannelMatrix":
        if self.variant == SCENARIO_IID_RAYLEIGH:
            return draw_iid_rayleigh(geometry, self.num_terminals, rng)
        return draw_los_ula(geometry, self.num_terminals, rng)


@dataclass
class ChannelMatrix:
    """M x K complex channel between one base station and K terminals."""

    entries: np.ndarray
    scenario: str = SCENARIO_IID_RAYLEIGH
    angles: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.complex128)
        if self.entries.ndim != 2:
            raise ValueError("entries must be an M x K matrix")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("channel entries must be finite")

    @property
    def num_antennas(self) -> int:
        return self.entries.shape[0]

    @property
    def num_terminals(self) -> int:
        return self.entries.shape[1]


def as_matrix(h) -> np.ndarray:
    """Accept a ChannelMatrix or a bare ndarray and return the ndarray."""
    if isinstance(h, ChannelMatrix):
        return h.entries
    return np.asarray(h, dtype=np.complex128)


def draw_iid_rayleigh(geometry: ArrayGeometry, num_terminals: int, rng: np.random.Generator) -> ChannelMatrix:
    """Draw an M x K matrix of i.i.d. CN(0, 1) entries.

    E|h_mk|^2 = 1, so ||h_k||^2 concentrates around M and the normalized
    inner products between distinct columns shrink as M grows.
    """
    if num_terminals < 1:
        raise ValueError("num_terminals must be >= 1")
    m = geometry.num_antennas
    re = rng.standard_normal((m, num_terminals))
    im = rng.standard_normal((m, num_terminals))
    h = (re + 1j * im) / np.sqrt(2.0)
    return ChannelMatrix(h, SCENARIO_IID_RAYLEIGH)


def los_steering(num_antennas: int, sin_angles: np.ndarray) -> np.ndarray:
    """Steering vectors of a half-wavelength ULA, one column per sin(angle)."""
    m = np.arange(num_antennas)[:, None]
    return np.exp(1j * np.pi * m * np.asarray(sin_angles)[None, :])


def draw_los_ula(geometry: ArrayGeometry, num_terminals: int, rng: np.random.Generator) -> ChannelMatrix:
    """Line-of-sight channels to a half-wavelength ULA.

    Column k is exp(i*pi*m*sin(theta_k)), m = 0..M-1, with theta_k uniform on
    [-pi/2, pi/2) (uniform in physical angle, not in sin(theta)). Every entry
    has unit modulus, so the Gram diagonal is exactly M.
    """
    if num_terminals < 1:
        raise ValueError("num_terminals must be >= 1")
    if geometry.element_spacing_wavelengths != 0.5:
        raise ValueError("LoS ULA model requires half-wavelength element spacing")
    theta = rng.uniform(-np.pi / 2, np.pi / 2, size=num_terminals)
    h = los_steering(geometry.num_antennas, np.sin(theta))
    return ChannelMatrix(h, SCENARIO_LOS_ULA, angles=theta)


def max_elements(
    aperture_width_m: float,
    aperture_height_m: float,
    carrier_frequency_hz: float,
    dual_polarized: bool = False,
) -> int:
    """Number of antennas deployable in a rectangular aperture.

    Antennas sit on a half-wavelength-pitch grid, so the count is
    floor(2*width/lambda) * floor(2*height/lambda). The count refers to
    antenna units: with ``dual_polarized`` each grid position carries one
    dual-polarized antenna (two orthogonally polarized elements in the same
    footprint), which is also how such arrays are usually quoted. An aperture
    smaller than one pitch in either dimension fits nothing.
    """
    if aperture_width_m <= 0 or aperture_height_m <= 0:
        raise ValueError("aperture dimensions must be positive")
    if carrier_frequency_hz <= 0:
        raise ValueError("carrier_frequency_hz must be positive")
    lam = speed_of_light / carrier_frequency_hz
    n_w = int(np.floor(2.0 * aperture_width_m / lam))
    n_h = int(np.floor(2.0 * aperture_height_m / lam))
    return n_w * n_h
