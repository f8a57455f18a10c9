"""Regular non-binary LDPC parity-check matrices in CRS form.

Construction: each of the ``hn`` columns owns ``d_v`` edge sockets and each
of the ``r`` rows owns ``d_c``. Row sockets are shuffled with a seeded PCG64
generator and paired with the column sockets in order. Repeated
(row, column) pairs are broken by swapping the row end of the offending
edge with a random edge; afterwards up to 100 passes of the same swap move
are spent removing length-4 cycles (two columns sharing two rows). Every
swap preserves all row and column weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tightleak.ldpc.gf import gf_ops

__all__ = [
    "RNG_PCG64",
    "LdpcCode",
    "design_rate",
    "feasible_block_length",
    "generate_regular_ldpc",
    "syndrome",
    "count_four_cycles",
]

RNG_PCG64 = 1
CYCLE_PASSES = 100
MAX_REPAIR_PASSES = 10_000


@dataclass(frozen=True, eq=False)
class LdpcCode:
    n_cols: int
    n_rows: int
    d: int
    d_v: int
    d_c: int
    values: np.ndarray
    col_indices: np.ndarray
    row_pointers: np.ndarray
    seed: int = 0
    rng_id: int = RNG_PCG64

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    @property
    def rate(self) -> float:
        return 1.0 - self.n_rows / self.n_cols

    @property
    def syndrome_rate(self) -> float:
        return self.n_rows / self.n_cols

    def row_of_edge(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_rows), np.diff(self.row_pointers))

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        out[self.row_of_edge(), self.col_indices] = self.values
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, LdpcCode):
            return NotImplemented
        scalars = ("n_cols", "n_rows", "d", "d_v", "d_c", "seed", "rng_id")
        return all(getattr(self, s) == getattr(other, s) for s in scalars) and all(
            np.array_equal(getattr(self, a), getattr(other, a))
            for a in ("values", "col_indices", "row_pointers")
        )


def design_rate(d_v: float, d_c: float) -> float:
    if not 0 < d_v < d_c:
        raise ValueError(f"need 0 < d_v < d_c, got d_v={d_v}, d_c={d_c}")
    return 1.0 - d_v / d_c


def feasible_block_length(hn: int, d_v: int, d_c: int) -> int:
    """Largest ``m <= hn`` with ``m * d_v`` divisible by ``d_c``."""
    step = d_c // np.gcd(d_v, d_c)
    return int(hn - hn % step)


def _edge_keys(rows: np.ndarray, cols: np.ndarray, n_cols: int) -> np.ndarray:
    return rows.astype(np.int64) * n_cols + cols


def _duplicate_edges(rows, cols, n_cols) -> np.ndarray:
    keys = _edge_keys(rows, cols, n_cols)
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    dup = np.zeros(keys.size, dtype=bool)
    dup[order[1:]] = sk[1:] == sk[:-1]
    return np.flatnonzero(dup)


def _cycle_edges(rows, d_v, n_cols, n_rows) -> np.ndarray:
    """One edge from every column that repeats a row pair of an earlier column."""
    per_col = np.sort(rows.reshape(n_cols, d_v), axis=1)
    ia, ib = np.triu_indices(d_v, k=1)
    pair_keys = per_col[:, ia].astype(np.int64) * n_rows + per_col[:, ib]
    flat = pair_keys.ravel()
    owner = np.repeat(np.arange(n_cols), ia.size)
    order = np.argsort(flat, kind="stable")
    sf = flat[order]
    repeat = np.zeros(flat.size, dtype=bool)
    repeat[order[1:]] = sf[1:] == sf[:-1]
    bad_cols = np.unique(owner[repeat])
    return bad_cols * d_v


def count_four_cycles(code: LdpcCode) -> int:
    """Number of column pairs sharing two rows (pairs of equal row pairs)."""
    rows = code.row_of_edge()
    cols = code.col_indices
    order = np.lexsort((rows, cols))
    per_col_rows = rows[order]
    if code.nnz != code.n_cols * code.d_v:
        raise ValueError("four-cycle count requires a column-regular code")
    per_col = np.sort(per_col_rows.reshape(code.n_cols, code.d_v), axis=1)
    ia, ib = np.triu_indices(code.d_v, k=1)
    keys = (per_col[:, ia].astype(np.int64) * code.n_rows + per_col[:, ib]).ravel()
    _, counts = np.unique(keys, return_counts=True)
    return int((counts * (counts - 1) // 2).sum())


def _swap_rows(rows: np.ndarray, bad: np.ndarray, rng: np.random.Generator) -> None:
    partners = rng.integers(0, rows.size, size=bad.size)
    for e, f in zip(bad.tolist(), partners.tolist()):
        rows[e], rows[f] = rows[f], rows[e]


def generate_regular_ldpc(hn: int, d: int, d_v: int, d_c: int, seed: int = 0) -> LdpcCode:
    """Random regular ``(d_v, d_c)`` parity-check matrix over GF(2^d).

    Raises
    ------
    ValueError
        If ``d_v >= d_c``, ``d_v < 2``, or ``hn * d_v`` is not a multiple of
        ``d_c`` (the message names the nearest feasible ``hn``).
    """
    gf_ops(d)
    if d_v < 2:
        raise ValueError(f"column weight must be at least 2, got {d_v}")
    if d_v >= d_c:
        raise ValueError(f"need d_v < d_c, got d_v={d_v}, d_c={d_c}")
    if hn < d_c or (hn * d_v) % d_c:
        raise ValueError(
            f"hn * d_v = {hn * d_v} is not a multiple of d_c = {d_c}; "
            f"largest feasible hn is {feasible_block_length(hn, d_v, d_c)}"
        )
    n_rows = hn * d_v // d_c
    if n_rows < d_v:
        raise ValueError("too few rows to place d_v distinct edges per column")
    rng = np.random.Generator(np.random.PCG64(seed))

    n_edges = hn * d_v
    # edge e belongs to column e // d_v
    cols = np.repeat(np.arange(hn, dtype=np.int64), d_v)
    rows = rng.permutation(np.repeat(np.arange(n_rows, dtype=np.int64), d_c))

    def repair_duplicates() -> None:
        for _ in range(MAX_REPAIR_PASSES):
            bad = _duplicate_edges(rows, cols, hn)
            if bad.size == 0:
                return
            _swap_rows(rows, bad, rng)
        raise RuntimeError("could not remove repeated edges")

    repair_duplicates()
    if d_v >= 2 and n_rows > d_v:
        for _ in range(CYCLE_PASSES):
            bad = _cycle_edges(rows, d_v, hn, n_rows)
            if bad.size == 0:
                break
            _swap_rows(rows, bad, rng)
            repair_duplicates()

    values = rng.integers(1, 1 << d, size=n_edges, dtype=np.int64).astype(np.uint8)
    order = np.lexsort((cols, rows))
    row_sorted = rows[order]
    row_pointers = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(row_sorted, minlength=n_rows), out=row_pointers[1:])
    return LdpcCode(
        n_cols=int(hn),
        n_rows=int(n_rows),
        d=int(d),
        d_v=int(d_v),
        d_c=int(d_c),
        values=values[order],
        col_indices=cols[order],
        row_pointers=row_pointers,
        seed=int(seed),
    )


def syndrome(code: LdpcCode, key) -> np.ndarray:
    """``s = H k`` over GF(2^d): per row, XOR of the products ``H_ji k_i``."""
    key = np.asarray(key)
    if key.shape != (code.n_cols,):
        raise ValueError(f"key must have length {code.n_cols}, got shape {key.shape}")
    if key.size and (key.min() < 0 or key.max() >= 1 << code.d):
        raise ValueError(f"key symbols must lie in [0, {(1 << code.d) - 1}]")
    gf = gf_ops(code.d)
    prods = gf.mul_table[code.values, key[code.col_indices].astype(np.intp)]
    out = np.zeros(code.n_rows, dtype=np.uint8)
    counts = np.diff(code.row_pointers)
    nonempty = counts > 0
    if prods.size:
        starts = code.row_pointers[:-1][nonempty]
        out[nonempty] = np.bitwise_xor.reduceat(prods, starts)
    return out
