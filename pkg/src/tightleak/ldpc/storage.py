"""Parity-check matrix storage models (bits).

Dense: one ``d``-bit symbol for every entry of the ``r x hn`` matrix.
Sparse (CRS): nonzero values, their column indices and the row pointers,
each index stored in the minimal whole number of bits.
"""

from __future__ import annotations

import math

__all__ = [
    "dense_storage_bits",
    "sparse_storage_bits",
    "predicted_storage",
    "bits_to_mb",
    "bits_to_gb",
]


def _clog2(x: float) -> int:
    return math.ceil(math.log2(x))


def dense_storage_bits(hn: float, d: int, R_synd: float) -> float:
    """``(hn)^2 d R_synd``: the full matrix with ``r = hn R_synd`` rows."""
    return float(hn) ** 2 * d * R_synd


def sparse_storage_bits(hn: float, d: int, d_v_bar: float, R_synd: float) -> float:
    nnz = d_v_bar * hn
    return (
        nnz * d
        + nnz * _clog2(hn)
        + (hn * R_synd + 1.0) * _clog2(nnz)
    )


def predicted_storage(
    n: float, h: int, d: int, d_v_bar: float, R_synd_star: float
) -> tuple[float, float]:
    """Dense and sparse storage implied by the optimal syndrome rate."""
    if not 0.0 < R_synd_star < 1.0:
        raise ValueError(f"R_synd_star must lie in (0, 1), got {R_synd_star!r}")
    hn = h * n
    return dense_storage_bits(hn, d, R_synd_star), sparse_storage_bits(hn, d, d_v_bar, R_synd_star)


def bits_to_mb(bits: float) -> float:
    return bits / 8e6


def bits_to_gb(bits: float) -> float:
    return bits / 8e9
