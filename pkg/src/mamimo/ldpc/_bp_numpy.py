"""Pure-numpy sum-product decoder (fallback backend).

Vectorized over edges and over a batch of codewords; exclusive per-check
products are formed in the (sign, log-magnitude) domain via segment
reductions, which avoids dividing by vanishing tanh values.
"""

import numpy as np

_TANH_CLIP = 1.0 - 1e-15


def decode_batch(code, llrs: np.ndarray, max_iterations: int) -> tuple[np.ndarray, np.ndarray]:
    """Decode a (batch, n) block of LLRs; returns (bits, converged).

    LLR sign convention: positive favors bit 0. Convergence requires every
    parity check satisfied and no exactly-tied posterior (zero total LLR), so
    an all-zero input is reported as non-converged.
    """
    llrs = np.atleast_2d(np.asarray(llrs, dtype=np.float64))
    batch, n = llrs.shape
    if n != code.n:
        raise ValueError(f"expected {code.n} LLRs per codeword, got {n}")
    ev = code.edge_var
    ve = code.var_edges
    vp = code.var_ptr
    cp = code.check_ptr
    ce = np.repeat(np.arange(code.num_checks), np.diff(cp))  # check id per edge
    llr_t = llrs.T  # (n, batch)

    c_msg = np.zeros((ev.size, batch))
    bits_out = np.zeros((batch, n), dtype=np.uint8)
    converged = np.zeros(batch, dtype=bool)

    def posterior():
        return llr_t + np.add.reduceat(c_msg[ve], vp[:-1], axis=0)

    for _ in range(max_iterations + 1):
        totals = posterior()
        bits = (totals < 0).astype(np.uint8)  # (n, batch)
        parity = np.add.reduceat(bits[ev], cp[:-1], axis=0) % 2
        ok = (~parity.any(axis=0)) & (np.abs(totals).min(axis=0) > 0)
        newly = ok & ~converged
        if newly.any():
            bits_out[newly] = bits[:, newly].T
            converged |= newly
        if converged.all():
            return bits_out, converged

        v_msg = totals[ev] - c_msg
        t = np.tanh(0.5 * v_msg)
        # zeros carry no information: any zero factor nulls the products it
        # appears in, so track them separately instead of clamping
        is_zero = t == 0.0
        log_mag = np.log(np.where(is_zero, 1.0, np.abs(t)))
        neg = (t < 0).astype(np.int64)
        zero_cnt = np.add.reduceat(is_zero.astype(np.int64), cp[:-1], axis=0)
        seg_log = np.add.reduceat(log_mag, cp[:-1], axis=0)
        seg_neg = np.add.reduceat(neg, cp[:-1], axis=0)
        excl_log = seg_log[ce] - log_mag
        excl_sign = 1.0 - 2.0 * ((seg_neg[ce] - neg) & 1)
        prod = np.clip(excl_sign * np.exp(excl_log), -_TANH_CLIP, _TANH_CLIP)
        prod = np.where(zero_cnt[ce] - is_zero > 0, 0.0, prod)
        c_msg = np.log1p(prod) - np.log1p(-prod)  # 2 * atanh(prod)

    bits = (posterior() < 0).astype(np.uint8)
    bits_out[~converged] = bits[:, ~converged].T
    return bits_out, converged
