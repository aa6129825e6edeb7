import numpy as np
import pytest
from scipy.optimize import brentq

from mamimo.capacity import (
    CoherenceBlock,
    best_subset_capacity,
    broadcast_penalty,
    drop_worst_terminals,
    fp_bound,
    se_closed_form,
    snr_threshold,
    sum_capacity,
)
from mamimo.channel import ArrayGeometry, draw_iid_rayleigh, draw_los_ula, los_steering
from mamimo.errors import InfeasibleError
from mamimo.linproc import make_combiner, sinr_per_terminal

SNR = 10 ** (-0.5)


def test_single_user_capacity():
    h = draw_iid_rayleigh(ArrayGeometry(32, 2e9), 1, np.random.default_rng(0))
    expected = np.log2(1 + SNR * np.linalg.norm(h.entries) ** 2)
    assert sum_capacity(h, SNR) == pytest.approx(expected, rel=1e-12)


def test_orthogonal_columns_attain_fp_bound():
    m, k = 16, 4
    h = np.zeros((m, k), dtype=complex)
    for j in range(k):
        h[4 * j : 4 * j + 4, j] = 2.0  # ||h_j||^2 = 16 = m
    assert sum_capacity(h, SNR) == pytest.approx(fp_bound(m, k, SNR), rel=1e-12)


def test_fp_bound_values():
    assert fp_bound(1, 1, 1.0) == pytest.approx(1.0)
    assert fp_bound(100, 12, SNR) == pytest.approx(60.3337, abs=1e-3)


def test_fp_bound_monotone():
    assert fp_bound(101, 12, SNR) > fp_bound(100, 12, SNR)
    assert fp_bound(100, 13, SNR) > fp_bound(100, 12, SNR)
    assert fp_bound(100, 12, SNR * 1.1) > fp_bound(100, 12, SNR)


def test_capacity_invariances():
    rng = np.random.default_rng(1)
    h = draw_iid_rayleigh(ArrayGeometry(24, 2e9), 6, rng).entries
    base = sum_capacity(h, SNR)
    perm = h[:, rng.permutation(6)]
    assert sum_capacity(perm, SNR) == pytest.approx(base, rel=1e-12)
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, 6))
    assert sum_capacity(h * phases, SNR) == pytest.approx(base, rel=1e-12)


def test_capacity_below_fp_bound_for_unit_modulus_channels():
    # the bound presumes ||h_k||^2 = M, which LoS steering satisfies exactly;
    # Rayleigh norms fluctuate, so there Hadamard's inequality is the
    # per-realization bound
    rng = np.random.default_rng(2)
    geom = ArrayGeometry(48, 2e9)
    for _ in range(50):
        h = draw_los_ula(geom, 6, rng)
        assert sum_capacity(h, SNR) <= fp_bound(48, 6, SNR) + 1e-9
    for _ in range(50):
        h = draw_iid_rayleigh(geom, 6, rng)
        hadamard = np.sum(np.log2(1 + SNR * np.sum(np.abs(h.entries) ** 2, axis=0)))
        assert sum_capacity(h, SNR) <= hadamard + 1e-9


def test_capacity_input_validation():
    h = np.ones((4, 2), dtype=complex)
    h[0, 0] = np.nan
    with pytest.raises(ValueError):
        sum_capacity(h, SNR)
    with pytest.raises(ValueError):
        sum_capacity(np.ones((4, 2)), 0.0)


def test_se_closed_form_all_pilots():
    assert se_closed_form(100, 200, 200, SNR) == 0.0


def test_se_closed_form_too_many_terminals():
    with pytest.raises(ValueError):
        se_closed_form(100, 201, 200, SNR)


def test_se_closed_form_threshold_point():
    # 30 terminals, 100 antennas at the threshold SNR give 30 bit/s/Hz
    se = se_closed_form(100, 30, 200, 0.040368, with_prelog=False)
    assert se == pytest.approx(30.0, abs=5e-3)


def test_se_closed_form_increasing_in_m():
    vals = [se_closed_form(m, 10, 200, SNR) for m in (20, 50, 100, 400)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_se_closed_form_unimodal_in_k():
    # rises to an interior maximum then falls over the feasible K range
    vals = [se_closed_form(100, k, 200, SNR) for k in range(1, 200)]
    diffs = np.sign(np.diff(vals))
    switch = np.flatnonzero(np.diff(diffs) != 0)
    assert len(switch) == 1  # single maximum
    kstar = int(np.argmax(vals)) + 1
    assert 1 < kstar < 199


def test_snr_threshold_reference_point():
    s = snr_threshold(100, 30, 30.0)
    assert 10 * np.log10(s) == pytest.approx(-13.94, abs=0.01)


def test_snr_threshold_matches_bisection_oracle():
    for m, k, target in ((100, 30, 30.0), (64, 8, 20.0), (200, 40, 60.0)):
        root = snr_threshold(m, k, target)
        oracle = brentq(
            lambda s: se_closed_form(m, k, 10**9, s, with_prelog=False) - target,
            1e-9,
            1e6,
            xtol=1e-15,
            rtol=1e-12,
        )
        assert abs(root - oracle) / oracle < 1e-9


def test_snr_threshold_zero_target():
    assert snr_threshold(100, 30, 0.0) == 0.0


def test_snr_threshold_unreachable_target():
    limit = 30 * np.log2(1 + 100 / 30)
    with pytest.raises(InfeasibleError) as err:
        snr_threshold(100, 30, limit * 1.01)
    assert "unreachable" in str(err.value)


def test_drop_none_keeps_all():
    h = draw_iid_rayleigh(ArrayGeometry(16, 2e9), 5, np.random.default_rng(3))
    assert list(drop_worst_terminals(h, SNR, 0)) == [0, 1, 2, 3, 4]


def test_drop_removes_one_of_duplicated_angles():
    sines = np.array([0.1, 0.1, -0.5, 0.7])
    h = los_steering(64, sines)
    kept = set(drop_worst_terminals(h, SNR, 1).tolist())
    assert len(kept & {0, 1}) == 1
    assert {2, 3} <= kept


def test_greedy_dropping_near_exhaustive():
    # brute-force 66-subset oracle; greedy within 1% on >= 95% of trials
    geom = ArrayGeometry(50, 2e9)
    good = 0
    trials = 500
    for t in range(trials):
        h = draw_los_ula(geom, 12, np.random.default_rng(1000 + t))
        kept = drop_worst_terminals(h, SNR, 2)
        greedy_cap = sum_capacity(h.entries[:, kept], SNR)
        _, best_cap = best_subset_capacity(h, SNR, 10)
        if greedy_cap >= 0.99 * best_cap:
            good += 1
    assert good / trials >= 0.95


def test_broadcast_penalty_values():
    assert broadcast_penalty(100, 100, 1.0) == pytest.approx(1.0)
    assert broadcast_penalty(100, 25, 1.0) == pytest.approx(4.0)
    assert broadcast_penalty(100, 12, 0.7914378) == pytest.approx(6.5953, abs=1e-3)


def test_zf_se_below_capacity_and_gap_shrinks_with_m():
    rng = np.random.default_rng(4)
    gaps = {}
    for m in (20, 100):
        geom = ArrayGeometry(m, 2e9)
        gap = 0.0
        for t in range(200):
            h = draw_iid_rayleigh(geom, 20, rng)
            cap = sum_capacity(h, SNR)
            v = make_combiner(h.entries, "zf")
            zf_se = float(np.sum(np.log2(1 + sinr_per_terminal(h, v, SNR))))
            assert zf_se <= cap + 1e-9
            gap += cap - zf_se
        gaps[m] = gap / 200
    assert gaps[20] > gaps[100]


def test_coherence_block_symbol_count():
    assert CoherenceBlock(2e5, 1e-3).num_symbols == 200
    with pytest.raises(ValueError):
        CoherenceBlock(100.0, 1e-6)
