"""Baseband computational-complexity / power model and duplexing overhead.

Four per-second task budgets are tracked for an OFDM base station serving K
terminals with M antennas and coherence blocks of tau symbols:

* fft               -- one transform per antenna per OFDM symbol,
* channel_estimation -- pilot despreading, M*K^2 MACs per coherence block,
* data_processing   -- combining/precoding, M*K MACs per payload resource
                        element,
* matrix_computation -- combiner construction once per coherence block:
                        M*K MACs for MR, 2*M*K^2 + K^3 for ZF/MMSE.

Counts are converted to "flops" via a FlopConvention. The default convention
counts complex operations directly (multiply = add = 1), which lands the
200-antenna / 40-terminal / tau=200 operating point near the published
~559/646 Gflop ballpark; a real-flop convention (multiply = 6, add = 2,
FFT = 5*N*log2(N)) is provided for comparison and roughly triples the
numbers. The convention in force is recorded in every output manifest.
"""

from dataclasses import dataclass

import numpy as np

TASK_FFT = "fft"
TASK_ESTIMATION = "channel_estimation"
TASK_DATA = "data_processing"
TASK_MATRIX = "matrix_computation"
TASKS = (TASK_FFT, TASK_ESTIMATION, TASK_DATA, TASK_MATRIX)

SCHEME_MR = "mr"
SCHEME_ZF = "zf_mmse"

DEFAULT_EFFICIENCY_FLOPS_PER_WATT = 12.8e9


@dataclass(frozen=True)
class OfdmConfig:
    """OFDM numerology: 20 MHz, 1200 subcarriers, 1.7x oversampled FFT.

    The FFT size is the next power of two above subcarriers * oversampling;
    the OFDM symbol rate is the subcarrier spacing shrunk by a 7% cyclic
    prefix.
    """

    bandwidth_hz: float = 20e6
    num_subcarriers: int = 1200
    oversampling: float = 1.7
    cyclic_prefix_overhead: float = 0.07

    def __post_init__(self):
        if min(self.bandwidth_hz, self.num_subcarriers, self.oversampling) <= 0:
            raise ValueError("OFDM parameters must be positive")
        if self.fft_size < self.num_subcarriers * self.oversampling:
            raise ValueError("fft_size must cover the oversampled subcarriers")

    @property
    def fft_size(self) -> int:
        return int(2 ** np.ceil(np.log2(self.num_subcarriers * self.oversampling)))

    @property
    def subcarrier_spacing_hz(self) -> float:
        return self.bandwidth_hz / self.num_subcarriers

    @property
    def ofdm_symbol_rate(self) -> float:
        """OFDM symbols per second, cyclic prefix included."""
        return self.subcarrier_spacing_hz / (1.0 + self.cyclic_prefix_overhead)

    @property
    def resource_element_rate(self) -> float:
        """Modulated resource elements per second across all subcarriers."""
        return self.num_subcarriers * self.ofdm_symbol_rate


@dataclass(frozen=True)
class FlopConvention:
    """Costs of elementary complex operations, in 'flops'.

    An N-point FFT costs (N/2)*log2(N) multiplies plus N*log2(N) adds, so the
    real-flop preset (6, 2) reproduces the classical 5*N*log2(N) real-flop
    count while the default complex-op preset (1, 1) gives 1.5*N*log2(N).
    """

    complex_multiply: float = 1.0
    complex_add: float = 1.0

    def __post_init__(self):
        if self.complex_multiply <= 0 or self.complex_add <= 0:
            raise ValueError("operation costs must be positive")

    @property
    def mac(self) -> float:
        return self.complex_multiply + self.complex_add

    def fft_cost(self, n: int) -> float:
        stages = np.log2(n)
        return (n / 2) * stages * self.complex_multiply + n * stages * self.complex_add

    def describe(self) -> dict:
        return {
            "complex_multiply_flops": self.complex_multiply,
            "complex_add_flops": self.complex_add,
            "fft_cost_formula": "(N/2)*log2(N)*mul + N*log2(N)*add",
        }


REAL_FLOPS_CONVENTION = FlopConvention(complex_multiply=6.0, complex_add=2.0)


@dataclass
class ComputeBudget:
    """Per-task flop rates and the equivalent power draw."""

    tasks: dict
    efficiency_flops_per_watt: float = DEFAULT_EFFICIENCY_FLOPS_PER_WATT

    @property
    def total_flops(self) -> float:
        return float(sum(self.tasks.values()))

    @property
    def watts(self) -> float:
        return power_from_flops(self.total_flops, self.efficiency_flops_per_watt)


@dataclass(frozen=True)
class DuplexOverhead:
    """Per-block pilot/feedback overhead fractions for one duplexing mode."""

    mode: str
    uplink_fraction: float
    downlink_fraction: float


def flops_budget(
    num_antennas: int,
    num_terminals: int,
    tau: int,
    scheme: str = SCHEME_ZF,
    ofdm: OfdmConfig | None = None,
    convention: FlopConvention | None = None,
) -> ComputeBudget:
    """Baseband flop budget for one cell.

    The FFT task is exactly linear in M; estimation and data processing are
    linear in M and (at fixed tau) in K; the combiner computation is amortized
    over the coherence block, which is what separates ZF/MMSE from MR.
    """
    m, k = num_antennas, num_terminals
    if k > m:
        raise ValueError(f"need K <= M, got K={k}, M={m}")
    if tau <= k:
        raise ValueError(f"need tau > K, got tau={tau}, K={k}")
    ofdm = ofdm or OfdmConfig()
    conv = convention or FlopConvention()
    re_rate = ofdm.resource_element_rate
    blocks_per_s = re_rate / tau
    pilot_fraction = k / tau

    fft = m * ofdm.ofdm_symbol_rate * conv.fft_cost(ofdm.fft_size)
    estimation = blocks_per_s * m * k * k * conv.mac
    data = re_rate * (1.0 - pilot_fraction) * m * k * conv.mac
    if scheme == SCHEME_MR:
        matrix = blocks_per_s * m * k * conv.mac
    elif scheme == SCHEME_ZF:
        matrix = blocks_per_s * (2.0 * m * k * k + k**3) * conv.mac
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return ComputeBudget(
        tasks={TASK_FFT: fft, TASK_ESTIMATION: estimation, TASK_DATA: data, TASK_MATRIX: matrix}
    )


def power_from_flops(flops: float, efficiency_flops_per_watt: float = DEFAULT_EFFICIENCY_FLOPS_PER_WATT) -> float:
    """Watts drawn by a DSP with the given computational efficiency."""
    if flops < 0 or efficiency_flops_per_watt <= 0:
        raise ValueError("flops must be >= 0 and efficiency positive")
    return flops / efficiency_flops_per_watt


def duplex_overhead(mode: str, num_antennas: int, num_terminals: int, tau: int) -> DuplexOverhead:
    """CSI-acquisition overhead per coherence block.

    TDD needs K uplink pilots and, thanks to channel hardening, no downlink
    pilots. FDD needs M downlink pilots plus K uplink pilots and analog
    feedback of the M coefficients (M uplink symbols, K coefficients
    multiplexed per symbol), i.e. M + K uplink symbols. Fractions are clamped
    at 1 (the whole block).
    """
    if num_antennas < 1 or num_terminals < 1 or tau < 1:
        raise ValueError("arguments must be positive")
    mode = mode.lower()
    if mode == "tdd":
        ul, dl = num_terminals / tau, 0.0
    elif mode == "fdd":
        ul = (num_antennas + num_terminals) / tau
        dl = num_antennas / tau
    else:
        raise ValueError(f"unknown duplexing mode {mode!r}")
    return DuplexOverhead(mode, min(ul, 1.0), min(dl, 1.0))


DEFAULT_BUCKETS = (0.1, 0.2, 0.3, 0.4, 0.5)
INFEASIBLE = "infeasible"


def overhead_bucket(fraction: float, max_overhead: float, buckets=DEFAULT_BUCKETS) -> str:
    if fraction > max_overhead or fraction >= 1.0:
        return INFEASIBLE
    for edge in buckets:
        if fraction <= edge:
            return f"<={int(round(edge * 100))}%"
    return INFEASIBLE


def feasibility_map(
    mode: str,
    tau: int,
    max_overhead: float,
    m_grid,
    k_grid,
    buckets=DEFAULT_BUCKETS,
) -> list[dict]:
    """Overhead bucket per (M, K) grid point for one duplexing mode.

    A point is infeasible when its worst-link overhead exceeds the cap or the
    pilots alone fill the block (K >= tau, or M + K >= tau in FDD). TDD rows
    depend on K only, never on M.
    """
    if len(m_grid) == 0 or len(k_grid) == 0:
        raise ValueError("grids must be nonempty")
    rows = []
    for m in m_grid:
        for k in k_grid:
            oh = duplex_overhead(mode, m, k, tau)
            worst = max(oh.uplink_fraction, oh.downlink_fraction)
            rows.append(
                {
                    "mode": oh.mode,
                    "tau": tau,
                    "M": int(m),
                    "K": int(k),
                    "ul_fraction": oh.uplink_fraction,
                    "dl_fraction": oh.downlink_fraction,
                    "bucket": overhead_bucket(worst, max_overhead, buckets),
                }
            )
    return rows
