"""Binary CRS file format for parity-check matrices.

Layout (all multi-byte header fields little-endian)::

    magic        4s   b"NBQC"
    version      u16  1
    d            u8   field degree
    d_v          u8   column weight
    d_c          u16  row weight
    hn           u64  columns
    r            u64  rows
    seed         u64  construction seed
    rng_id       u8   1 = numpy PCG64
    values       ceil(d/8) bytes per nonzero, hn*d_v entries
    col_indices  bit-packed, ceil(log2 hn) bits each, hn*d_v entries
    row_pointers bit-packed, ceil(log2(d_v hn)) bits each, r+1 entries

Bit-packed sections are LSB-first and padded with zero bits to a whole
byte. A field width that cannot hold the largest value it must store
(only possible when the argument of the log is a power of two) is widened
by one bit.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from tightleak.ldpc.code import LdpcCode

__all__ = [
    "MAGIC",
    "VERSION",
    "HEADER",
    "index_width",
    "crs_size_bytes",
    "to_bytes",
    "from_bytes",
    "serialize_crs",
    "deserialize_crs",
    "CrsFormatError",
]

MAGIC = b"NBQC"
VERSION = 1
HEADER = struct.Struct("<4sHBBHQQQB")


class CrsFormatError(ValueError):
    pass


def index_width(upper: int, largest: int) -> int:
    """``ceil(log2(upper))`` bits, widened if ``largest`` would not fit."""
    width = max(1, math.ceil(math.log2(upper))) if upper > 1 else 1
    while largest >= 1 << width:
        width += 1
    return width


def _widths(hn: int, d: int, d_v: int) -> tuple[int, int, int]:
    nnz = d_v * hn
    return (d + 7) // 8, index_width(hn, hn - 1), index_width(nnz, nnz)


def crs_size_bytes(hn: int, r: int, d: int, d_v: int) -> int:
    nnz = d_v * hn
    value_bytes, col_bits, ptr_bits = _widths(hn, d, d_v)
    return (
        HEADER.size
        + nnz * value_bytes
        + (nnz * col_bits + 7) // 8
        + ((r + 1) * ptr_bits + 7) // 8
    )


def _pack(values: np.ndarray, width: int) -> bytes:
    v = np.asarray(values, dtype=np.uint64)
    shifts = np.arange(width, dtype=np.uint64)
    bits = ((v[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)
    return np.packbits(bits.ravel(), bitorder="little").tobytes()


def _unpack(buf: bytes, count: int, width: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(buf, dtype=np.uint8), bitorder="little")
    bits = bits[: count * width].reshape(count, width).astype(np.uint64)
    weights = np.uint64(1) << np.arange(width, dtype=np.uint64)
    return (bits * weights).sum(axis=1).astype(np.int64)


def to_bytes(code: LdpcCode) -> bytes:
    if code.n_rows < 1:
        raise ValueError("cannot serialize a matrix without rows")
    if code.nnz != code.n_cols * code.d_v:
        raise ValueError("CRS format stores column-regular codes only")
    value_bytes, col_bits, ptr_bits = _widths(code.n_cols, code.d, code.d_v)
    header = HEADER.pack(
        MAGIC, VERSION, code.d, code.d_v, code.d_c,
        code.n_cols, code.n_rows, code.seed, code.rng_id,
    )
    values = np.asarray(code.values, dtype=f"<u{value_bytes}").tobytes()
    return b"".join(
        (header, values, _pack(code.col_indices, col_bits), _pack(code.row_pointers, ptr_bits))
    )


def from_bytes(buf: bytes) -> LdpcCode:
    if len(buf) < HEADER.size:
        raise CrsFormatError("file shorter than the CRS header")
    magic, version, d, d_v, d_c, hn, r, seed, rng_id = HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise CrsFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise CrsFormatError(f"unsupported CRS version {version}")
    expected = crs_size_bytes(hn, r, d, d_v)
    if len(buf) != expected:
        raise CrsFormatError(f"expected {expected} bytes, found {len(buf)}")
    nnz = d_v * hn
    value_bytes, col_bits, ptr_bits = _widths(hn, d, d_v)
    pos = HEADER.size
    values = np.frombuffer(buf, dtype=f"<u{value_bytes}", count=nnz, offset=pos)
    pos += nnz * value_bytes
    col_len = (nnz * col_bits + 7) // 8
    cols = _unpack(buf[pos : pos + col_len], nnz, col_bits)
    pos += col_len
    ptrs = _unpack(buf[pos:], r + 1, ptr_bits)
    return LdpcCode(
        n_cols=hn, n_rows=r, d=d, d_v=d_v, d_c=d_c,
        values=values.astype(np.uint8), col_indices=cols, row_pointers=ptrs,
        seed=seed, rng_id=rng_id,
    )


def serialize_crs(code: LdpcCode, path) -> int:
    """Write ``code`` to ``path``; returns the number of bytes written."""
    data = to_bytes(code)
    path = Path(path)
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise OSError(f"cannot write CRS file {path}: {exc.strerror or exc}") from exc
    return len(data)


def deserialize_crs(path) -> LdpcCode:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read CRS file {path}: {exc.strerror or exc}") from exc
    return from_bytes(data)
