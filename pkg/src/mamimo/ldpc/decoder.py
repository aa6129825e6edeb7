"""Belief-propagation decoding with backend selection.

The compiled kernel is used when the extension built; otherwise the numpy
implementation takes over. Set MAMIMO_PURE_PYTHON=1 to force the fallback
(used by the backend-comparison benchmark).
"""

import os

import numpy as np

from . import _bp_numpy

DEFAULT_MAX_ITERATIONS = 50

if os.environ.get("MAMIMO_PURE_PYTHON"):
    _bp_cython = None
else:
    try:
        from . import _bp_cython
    except ImportError:
        _bp_cython = None


def backend_name() -> str:
    return "cython" if _bp_cython is not None else "numpy"


def decode(code, llrs: np.ndarray, max_iterations: int = DEFAULT_MAX_ITERATIONS):
    """Sum-product decode one codeword; returns (bits, converged).

    Non-convergence is a flag, not an error: the hard decision after the last
    iteration is returned either way.
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    if not np.all(np.isfinite(llrs)):
        raise ValueError("LLRs must be finite")
    if llrs.shape != (code.n,):
        raise ValueError(f"expected {code.n} LLRs, got shape {llrs.shape}")
    if _bp_cython is not None:
        return _bp_cython.decode_one(code, np.ascontiguousarray(llrs), max_iterations)
    bits, conv = _bp_numpy.decode_batch(code, llrs[None, :], max_iterations)
    return bits[0], bool(conv[0])


def decode_batch(code, llrs: np.ndarray, max_iterations: int = DEFAULT_MAX_ITERATIONS):
    """Decode a (batch, n) block; returns (bits (batch, n), converged (batch,))."""
    llrs = np.atleast_2d(np.asarray(llrs, dtype=np.float64))
    if not np.all(np.isfinite(llrs)):
        raise ValueError("LLRs must be finite")
    if _bp_cython is not None:
        bits = np.empty(llrs.shape, dtype=np.uint8)
        conv = np.empty(llrs.shape[0], dtype=bool)
        for i in range(llrs.shape[0]):
            bits[i], conv[i] = _bp_cython.decode_one(
                code, np.ascontiguousarray(llrs[i]), max_iterations
            )
        return bits, conv
    return _bp_numpy.decode_batch(code, llrs, max_iterations)
