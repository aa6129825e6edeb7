import numpy as np
import pytest

from mamimo.ldpc import (
    backend_name,
    decode,
    decode_batch,
    encode,
    extract_info,
    make_regular_code,
    syndrome,
)
from mamimo.ldpc import _bp_numpy


@pytest.fixture(scope="module")
def code():
    return make_regular_code(1024)


def test_construction_is_regular_rate_half(code):
    assert code.n == 1024
    assert code.num_checks == 512
    assert code.k == 512  # full-rank parity check
    assert code.rate == 0.5
    var_deg = np.diff(code.var_ptr)
    assert np.all(var_deg == 3)
    check_deg = np.diff(code.check_ptr)
    assert check_deg.mean() == 6.0
    assert check_deg.min() >= 5 and check_deg.max() <= 7


def test_construction_has_no_4_cycles(code):
    h = code.parity_check
    overlap = (h @ h.T).toarray()
    np.fill_diagonal(overlap, 0)
    assert overlap.max() <= 1


def test_construction_deterministic():
    a = make_regular_code(512)
    b = make_regular_code(512)
    assert a is b  # cached
    assert np.array_equal(a.edge_var, b.edge_var)


def test_encode_zero_maps_to_zero(code):
    x = encode(code, np.zeros(code.k, dtype=np.uint8))
    assert not x.any()


def test_encode_satisfies_all_checks(code):
    rng = np.random.default_rng(0)
    for _ in range(10):
        u = rng.integers(0, 2, code.k).astype(np.uint8)
        x = encode(code, u)
        assert not syndrome(code, x).any()
        assert np.array_equal(extract_info(code, x), u)


def test_encode_length_mismatch(code):
    with pytest.raises(ValueError):
        encode(code, np.zeros(code.k - 1, dtype=np.uint8))


def test_decode_noiseless_roundtrip(code):
    rng = np.random.default_rng(1)
    u = rng.integers(0, 2, code.k).astype(np.uint8)
    x = encode(code, u)
    llr = 30.0 * (1.0 - 2.0 * x.astype(float))
    bits, converged = decode(code, llr)
    assert converged
    assert np.array_equal(bits, x)


def test_decode_zero_llrs_does_not_converge(code):
    bits, converged = decode(code, np.zeros(code.n), max_iterations=5)
    assert not converged


def test_decode_rejects_non_finite(code):
    llr = np.zeros(code.n)
    llr[0] = np.inf
    with pytest.raises(ValueError):
        decode(code, llr)


def test_decode_corrects_noisy_codeword(code):
    rng = np.random.default_rng(2)
    u = rng.integers(0, 2, code.k).astype(np.uint8)
    x = encode(code, u)
    s = 1.0 - 2.0 * x.astype(float)
    sigma2 = 0.55  # ~2.6 dB Eb/N0, inside the waterfall
    y = s + rng.standard_normal(code.n) * np.sqrt(sigma2)
    bits, converged = decode(code, 2 * y / sigma2)
    assert converged
    assert np.array_equal(bits, x)


def test_awgn_oracle_ber_below_1e3_at_3db(code):
    # standalone AWGN check before any MIMO integration: ~1e6 bits
    rng = np.random.default_rng(3)
    ebn0 = 10 ** (3 / 10)
    sigma2 = 1.0 / (2 * code.rate * ebn0)
    n_blocks = 1954  # ~1e6 info bits
    errors = 0
    chunk = 128
    for lo in range(0, n_blocks, chunk):
        cnt = min(chunk, n_blocks - lo)
        u = rng.integers(0, 2, (cnt, code.k)).astype(np.uint8)
        x = np.stack([encode(code, u[i]) for i in range(cnt)])
        y = (1.0 - 2.0 * x.astype(float)) + rng.standard_normal((cnt, code.n)) * np.sqrt(sigma2)
        bits, _ = decode_batch(code, 2 * y / sigma2)
        errors += int(np.sum(bits[:, code.info_cols] != u))
    ber = errors / (n_blocks * code.k)
    assert ber < 1e-3


def test_backends_agree_on_hard_decisions(code):
    if backend_name() != "cython":
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(4)
    u = rng.integers(0, 2, (32, code.k)).astype(np.uint8)
    x = np.stack([encode(code, u[i]) for i in range(32)])
    sigma2 = 0.6
    y = (1.0 - 2.0 * x.astype(float)) + rng.standard_normal((32, code.n)) * np.sqrt(sigma2)
    llrs = 2 * y / sigma2
    bits_c, conv_c = decode_batch(code, llrs, max_iterations=40)
    bits_n, conv_n = _bp_numpy.decode_batch(code, llrs, max_iterations=40)
    assert np.array_equal(conv_c, conv_n)
    assert np.array_equal(bits_c[conv_c], bits_n[conv_c])
