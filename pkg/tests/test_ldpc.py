import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tightleak.ldpc.code import (
    count_four_cycles,
    design_rate,
    feasible_block_length,
    generate_regular_ldpc,
    syndrome,
)
from tightleak.ldpc.crs import (
    HEADER,
    CrsFormatError,
    crs_size_bytes,
    deserialize_crs,
    from_bytes,
    index_width,
    serialize_crs,
    to_bytes,
)
from tightleak.ldpc.gf import clmul_mod
from tightleak.ldpc.storage import (
    bits_to_gb,
    bits_to_mb,
    dense_storage_bits,
    predicted_storage,
    sparse_storage_bits,
)


def _dense_syndrome(code, key):
    """Row-by-row matrix-vector product with the shift-and-add field product."""
    H = code.to_dense()
    out = []
    for row in H:
        acc = 0
        for h, k in zip(row.tolist(), key.tolist()):
            acc ^= clmul_mod(h, k, code.d)
        out.append(acc)
    return np.array(out)


# -- design rate and block length ----------------------------------------------

def test_design_rate_sequence():
    got = [round(design_rate(2, dc), 3) for dc in range(3, 11)]
    assert got == [0.333, 0.5, 0.6, 0.667, 0.714, 0.75, 0.778, 0.8]
    # the truncated three-digit spellings
    assert [math.floor(design_rate(2, dc) * 1000) / 1000 for dc in (6, 9)] == [0.666, 0.777]
    assert design_rate(2, 9.09) == pytest.approx(0.78, abs=1e-3)
    with pytest.raises(ValueError):
        design_rate(2, 2)


def test_feasible_block_length():
    assert feasible_block_length(100_000, 2, 9) == 99_999
    assert feasible_block_length(67_600, 2, 9) == 67_599
    assert feasible_block_length(320_000, 2, 10) == 320_000
    for hn, dv, dc in [(12345, 3, 7), (1000, 2, 6), (77, 4, 6)]:
        m = feasible_block_length(hn, dv, dc)
        assert m <= hn and (m * dv) % dc == 0
        assert all((k * dv) % dc for k in range(m + 1, hn + 1))


# -- construction ----------------------------------------------------------------

def test_small_binary_code_structure():
    code = generate_regular_ldpc(6, 1, 2, 3, seed=0)
    H = code.to_dense()
    assert H.shape == (4, 6)
    assert set(np.unique(H)) <= {0, 1}
    assert np.all((H != 0).sum(axis=0) == 2) and np.all((H != 0).sum(axis=1) == 3)


def test_construction_errors_name_feasible_length():
    with pytest.raises(ValueError, match="99999"):
        generate_regular_ldpc(100_000, 4, 2, 9)
    with pytest.raises(ValueError):
        generate_regular_ldpc(90, 4, 9, 9)
    with pytest.raises(ValueError):
        generate_regular_ldpc(90, 9, 2, 9)


def test_table_row_three_has_64000_checks():
    code = generate_regular_ldpc(320_000, 4, 2, 10, seed=7)
    assert code.n_rows == 64_000
    assert code.rate == pytest.approx(0.8)


@pytest.mark.parametrize("dv,dc", [(2, 9), (3, 6)])
def test_regular_weights_over_100_seeds(dv, dc):
    hn = 900
    for seed in range(100):
        code = generate_regular_ldpc(hn, 4, dv, dc, seed=seed)
        H = code.to_dense()
        assert np.all((H != 0).sum(axis=0) == dv)
        assert np.all((H != 0).sum(axis=1) == dc)
        assert np.all(code.values > 0) and np.all(code.values < 16)


def test_construction_is_deterministic():
    a = generate_regular_ldpc(2997, 6, 2, 9, seed=12345)
    b = generate_regular_ldpc(2997, 6, 2, 9, seed=12345)
    c = generate_regular_ldpc(2997, 6, 2, 9, seed=12346)
    assert a == b and to_bytes(a) == to_bytes(b)
    assert a != c


def test_four_cycles_are_removed_for_weight_two():
    for hn, dc in [(67_599, 9), (20_000, 10)]:
        assert count_four_cycles(generate_regular_ldpc(hn, 4, 2, dc, seed=7)) == 0


def test_four_cycles_are_reduced_for_weight_three():
    # a plain socket permutation leaves ~ (hn * 3)^2 / (2 C(r, 2)) ~ 36 cycles here
    counts = [count_four_cycles(generate_regular_ldpc(3000, 4, 3, 6, seed=s)) for s in range(5)]
    assert max(counts) < 12


def test_four_cycle_counter_against_dense_oracle():
    code = generate_regular_ldpc(60, 2, 3, 6, seed=3)
    H = (code.to_dense() != 0).astype(int)
    overlap = H.T @ H
    iu = np.triu_indices(60, k=1)
    expected = int((overlap[iu] * (overlap[iu] - 1) // 2).sum())
    assert count_four_cycles(code) == expected


# -- syndrome ------------------------------------------------------------------

def test_syndrome_examples():
    code = generate_regular_ldpc(12, 2, 2, 4, seed=5)
    assert np.all(syndrome(code, np.zeros(12, dtype=int)) == 0)
    rng = np.random.default_rng(0)
    for _ in range(20):
        key = rng.integers(0, 4, size=12)
        assert np.array_equal(syndrome(code, key), _dense_syndrome(code, key))
    with pytest.raises(ValueError):
        syndrome(code, np.zeros(11, dtype=int))
    with pytest.raises(ValueError):
        syndrome(code, np.full(12, 4))


def test_binary_syndrome_is_parity():
    code = generate_regular_ldpc(60, 1, 2, 6, seed=9)
    key = np.random.default_rng(1).integers(0, 2, size=60)
    parity = (code.to_dense().astype(int) @ key) % 2
    assert np.array_equal(syndrome(code, key), parity)


@pytest.mark.parametrize("d", [3, 5, 8])
def test_syndrome_matches_dense_oracle(d):
    code = generate_regular_ldpc(90, d, 3, 9, seed=d)
    key = np.random.default_rng(d).integers(0, 1 << d, size=90)
    assert np.array_equal(syndrome(code, key), _dense_syndrome(code, key))


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([1, 2, 4, 6]), st.integers(0, 2**32))
def test_syndrome_linearity(d, seed):
    code = generate_regular_ldpc(120, d, 2, 6, seed=seed % 1000)
    rng = np.random.default_rng(seed)
    k1, k2 = rng.integers(0, 1 << d, size=(2, 120))
    assert np.array_equal(syndrome(code, k1 ^ k2), syndrome(code, k1) ^ syndrome(code, k2))


def test_syndrome_length_is_leakage():
    code = generate_regular_ldpc(99_999, 4, 2, 9, seed=0)
    r_synd = code.n_rows / code.n_cols
    assert code.d * code.n_rows == code.n_cols * code.d * r_synd
    key = np.zeros(code.n_cols, dtype=int)
    assert syndrome(code, key).size * code.d == code.d * code.n_rows


# -- CRS format ----------------------------------------------------------------

def test_index_width():
    assert index_width(67_599, 67_598) == 17
    assert index_width(2, 1) == 1
    assert index_width(4, 4) == 3  # a power of two needs one more bit to hold itself
    assert index_width(5, 4) == 3


def test_crs_header_layout():
    code = generate_regular_ldpc(999, 4, 2, 9, seed=7)
    blob = to_bytes(code)
    assert HEADER.size == 35
    assert blob[:4] == b"NBQC"
    fields = HEADER.unpack_from(blob)
    assert fields[1:] == (1, 4, 2, 9, 999, 222, 7, 1)
    assert len(blob) == crs_size_bytes(999, 222, 4, 2)
    # values occupy one byte each and follow the header directly
    assert np.array_equal(np.frombuffer(blob, np.uint8, 1998, HEADER.size), code.values)


@pytest.mark.parametrize("d", [1, 4, 8])
def test_crs_round_trip_bit_identical(tmp_path, d):
    code = generate_regular_ldpc(1800, d, 2, 9, seed=d)
    path = tmp_path / "h.crs"
    size = serialize_crs(code, path)
    assert size == path.stat().st_size
    back = deserialize_crs(path)
    assert back == code
    assert to_bytes(back) == path.read_bytes()
    assert np.array_equal(back.to_dense(), code.to_dense())


def test_crs_rejects_corruption():
    blob = to_bytes(generate_regular_ldpc(90, 4, 2, 9, seed=1))
    with pytest.raises(CrsFormatError):
        from_bytes(b"XXXX" + blob[4:])
    with pytest.raises(CrsFormatError):
        from_bytes(blob[:-1])
    with pytest.raises(CrsFormatError):
        from_bytes(blob[:10])
    bad_version = blob[:4] + (2).to_bytes(2, "little") + blob[6:]
    with pytest.raises(CrsFormatError):
        from_bytes(bad_version)


def test_crs_write_error(tmp_path):
    code = generate_regular_ldpc(90, 4, 2, 9, seed=1)
    with pytest.raises(OSError):
        serialize_crs(code, tmp_path / "missing" / "h.crs")


# -- storage model -------------------------------------------------------------

def test_dense_storage_golden():
    bits = dense_storage_bits(1e5, 4, 0.667)
    assert bits == pytest.approx(2.668e10)
    assert bits_to_gb(bits) == pytest.approx(3.34, rel=0.01)
    assert dense_storage_bits(2e5, 4, 0.667) == 4 * bits
    assert dense_storage_bits(1, 1, 1) == 1


def test_sparse_storage_golden():
    bits = sparse_storage_bits(1e5, 4, 2, 0.667)
    # nnz d + nnz ceil(log2 hn) + (r + 1) ceil(log2 nnz), by hand
    hand = 2e5 * 4 + 2e5 * 17 + (66_700 + 1) * 18
    assert bits == pytest.approx(hand)
    assert bits_to_mb(bits) == pytest.approx(0.67, rel=0.02)
    het = sparse_storage_bits(2e5, 4, 2, 0.667)
    assert het / bits == pytest.approx(2.0, rel=0.06)


@pytest.mark.parametrize("n,r_code,mb", [(67_600, 0.78, 0.389), (160_000, 0.78, 0.95),
                                        (320_000, 0.7949, 2.0)])
def test_table_predictions(n, r_code, mb):
    _, sparse = predicted_storage(n, 1, 4, 2, 1 - r_code)
    assert bits_to_mb(sparse) == pytest.approx(mb, rel=0.02)


def test_predicted_storage_substitution():
    dense, sparse = predicted_storage(5e4, 2, 4, 2, 0.3)
    assert dense == dense_storage_bits(1e5, 4, 0.3)
    assert sparse == sparse_storage_bits(1e5, 4, 2, 0.3)
    with pytest.raises(ValueError):
        predicted_storage(1e5, 1, 4, 2, 1.0)


@settings(max_examples=300)
@given(st.integers(10**4, 10**7), st.integers(1, 8), st.integers(2, 10), st.floats(0.05, 0.95))
def test_sparse_beats_dense_for_practical_codes(hn, d, dv, r_synd):
    assert sparse_storage_bits(hn, d, dv, r_synd) < dense_storage_bits(hn, d, r_synd)


def test_dense_can_win_for_tiny_matrices():
    # 8 columns, 4 rows, 3 ones per column: 32 dense bits vs 121 CRS bits
    assert dense_storage_bits(8, 1, 0.5) == 32
    assert sparse_storage_bits(8, 1, 3, 0.5) == 121


def test_file_sizes_track_sparse_model():
    for hn, dc in [(19_998, 9), (40_000, 10)]:
        code = generate_regular_ldpc(hn, 4, 2, dc, seed=0)
        model = sparse_storage_bits(hn, 4, 2, code.n_rows / hn) / 8
        assert 1.0 <= len(to_bytes(code)) / model <= 1.3
