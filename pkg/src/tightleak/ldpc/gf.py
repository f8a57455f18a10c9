"""Arithmetic in GF(2^d) for 1 <= d <= 8 via full lookup tables.

Elements are the integers 0 .. 2^d - 1 read as polynomials over GF(2) in
the bit basis. Addition is XOR; multiplication is carry-less
multiplication reduced modulo a fixed primitive polynomial:

    d   polynomial                 hex
    1   x + 1                      0x3
    2   x^2 + x + 1                0x7
    3   x^3 + x + 1                0xB
    4   x^4 + x + 1                0x13
    5   x^5 + x^2 + 1              0x25
    6   x^6 + x + 1                0x43
    7   x^7 + x^3 + 1              0x89
    8   x^8 + x^4 + x^3 + x^2 + 1  0x11D
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = ["PRIMITIVE_POLYNOMIALS", "GaloisField", "gf_ops", "clmul_mod"]

PRIMITIVE_POLYNOMIALS = {1: 0x3, 2: 0x7, 3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x89, 8: 0x11D}


def clmul_mod(a: int, b: int, d: int) -> int:
    """Reference shift-and-add product, reduced as it goes."""
    poly = PRIMITIVE_POLYNOMIALS[d]
    top = 1 << d
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return out


@dataclass(frozen=True, eq=False)
class GaloisField:
    d: int
    mul_table: np.ndarray
    inv_table: np.ndarray

    @property
    def order(self) -> int:
        return 1 << self.d

    @property
    def polynomial(self) -> int:
        return PRIMITIVE_POLYNOMIALS[self.d]

    def add(self, a, b):
        return np.bitwise_xor(a, b)

    def mul(self, a, b):
        return self.mul_table[a, b]

    def inv(self, a):
        a = np.asarray(a)
        if (a == 0).any():
            raise ZeroDivisionError("zero has no multiplicative inverse")
        out = self.inv_table[a]
        return int(out) if out.ndim == 0 else out


@lru_cache(maxsize=None)
def gf_ops(d: int) -> GaloisField:
    if d not in PRIMITIVE_POLYNOMIALS:
        raise ValueError(f"field degree must be in 1..8, got {d!r}")
    q = 1 << d
    # exp/log tables from the primitive element x (or 1 for GF(2))
    exp = np.zeros(2 * q, dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    gen = 2 if d > 1 else 1
    x = 1
    for i in range(q - 1):
        exp[i] = x
        log[x] = i
        x = clmul_mod(x, gen, d)
    exp[q - 1 : 2 * (q - 1)] = exp[: q - 1]

    mul = np.zeros((q, q), dtype=np.uint8)
    nz = np.arange(1, q)
    mul[1:, 1:] = exp[log[nz][:, None] + log[nz][None, :]]
    inv = np.zeros(q, dtype=np.uint8)
    inv[1:] = exp[(q - 1 - log[nz]) % (q - 1)]
    mul.setflags(write=False)
    inv.setflags(write=False)
    return GaloisField(d=d, mul_table=mul, inv_table=inv)
