"""Fast invariant checks runnable without pytest (``tightleak selftest``)."""

from __future__ import annotations

import io
import math

import numpy as np

from tightleak.digitizer import bin_probabilities, build_grid, concatenate, conditional_stats
from tightleak.holevo import (
    eve_total_cm,
    gaussian_entropy,
    holevo_bound,
    symplectic_eigenvalues,
    symplectic_eigenvalues_general,
    two_mode_squeezed_vacuum,
)
from tightleak.leakage import optimal_syndrome_rate, tight_leakage_bits
from tightleak.ldpc.code import generate_regular_ldpc, syndrome
from tightleak.ldpc.crs import from_bytes, to_bytes
from tightleak.ldpc.gf import gf_ops
from tightleak.ldpc.storage import dense_storage_bits, sparse_storage_bits
from tightleak.protocol import ChannelParams, Detection, Direction, ProtocolConfig, loss_db_to_tau

__all__ = ["CHECKS", "run_selftest"]


def _loss_roundtrip():
    dbs = np.linspace(0.0, 30.0, 61)
    return all(abs(-10 * math.log10(loss_db_to_tau(x)) - x) < 1e-12 for x in dbs)


def _gf_distributive():
    for d in (1, 2, 3, 4):
        gf = gf_ops(d)
        a, b, c = np.meshgrid(*(np.arange(1 << d),) * 3, indexing="ij")
        if not np.array_equal(gf.mul(a, b ^ c), gf.mul(a, b) ^ gf.mul(a, c)):
            return False
    return True


def _syndrome_linear():
    rng = np.random.default_rng(1)
    for d in (1, 2, 4, 6):
        code = generate_regular_ldpc(120, d, 2, 6, seed=d)
        k1 = rng.integers(0, 1 << d, size=(50, 120))
        k2 = rng.integers(0, 1 << d, size=(50, 120))
        for a, b in zip(k1, k2):
            if not np.array_equal(syndrome(code, a ^ b), syndrome(code, a) ^ syndrome(code, b)):
                return False
    return True


def _regular_weights():
    for seed in range(10):
        code = generate_regular_ldpc(300, 4, 3, 6, seed=seed)
        if not (np.all(np.bincount(code.col_indices, minlength=300) == 3)
                and np.all(np.diff(code.row_pointers) == 6)):
            return False
    return True


def _crs_roundtrip():
    code = generate_regular_ldpc(999, 4, 2, 9, seed=7)
    blob = to_bytes(code)
    return from_bytes(blob) == code and to_bytes(from_bytes(blob)) == blob


def _concatenation_entropy():
    for d in range(1, 7):
        p = bin_probabilities(build_grid(d))
        joint = np.outer(p, p).ravel()
        h_joint = -np.sum(joint[joint > 0] * np.log2(joint[joint > 0]))
        h = -np.sum(p[p > 0] * np.log2(p[p > 0]))
        if abs(h_joint - 2 * h) > 1e-9:
            return False
    return concatenate(3, 5, 4) == 53


def _conditioning_reduces_entropy():
    grid = build_grid(4)
    last = math.inf
    for rho in np.linspace(0.0, 0.99, 12):
        st = conditional_stats(grid, float(rho))
        if st.H_k_given_y > st.H_k + 1e-9 or st.H_k_given_y > last + 1e-9:
            return False
        last = st.H_k_given_y
    return True


def _symplectic_closed_forms():
    ok = np.allclose(symplectic_eigenvalues(np.eye(4)), 1.0, atol=1e-10)
    ok &= np.allclose(symplectic_eigenvalues(two_mode_squeezed_vacuum(5.0)), 1.0, atol=1e-10)
    ok &= np.allclose(symplectic_eigenvalues(3.0 * np.eye(2)), 3.0, atol=1e-10)
    cm = eve_total_cm(0.5, 1.2, 10.0)
    ok &= np.allclose(symplectic_eigenvalues(cm), symplectic_eigenvalues_general(cm), atol=1e-10)
    return bool(ok) and abs(gaussian_entropy(3.0 * np.eye(2)) - 2.0) < 1e-12


def _holevo_nulls():
    for det in Detection:
        for dirn in Direction:
            cfg = ProtocolConfig(detection=det, direction=dirn, eta_d=1.0, u_el=0.0)
            if holevo_bound(cfg, ChannelParams(1.0, 0.0, 10.0)).chi > 1e-9:
                return False
            # RR without modulation still sees Eve's injected noise unless xi = 0
            xi = 0.01 if dirn is Direction.DR else 0.0
            if holevo_bound(cfg, ChannelParams(0.5, xi, 0.0)).chi > 1e-9:
                return False
    return True


def _leakage_identity():
    for n in (1e3, 1e5, 1e7):
        leak = tight_leakage_bits(int(n), 1, 2.668, 3.0, 0.1).leak_bits
        r_synd, _ = optimal_syndrome_rate(2.668, 3.0, 4, 1, int(n), 0.1)
        if abs(leak / (n * 4) - r_synd) > 1e-12:
            return False
    return True


def _storage_golden():
    dense_gb = dense_storage_bits(1e5, 4, 0.667) / 8e9
    sparse_mb = sparse_storage_bits(1e5, 4, 2, 0.667) / 8e6
    return abs(dense_gb / 3.34 - 1) < 0.01 and abs(sparse_mb / 0.67 - 1) < 0.02


CHECKS = {
    "loss/tau round trip": _loss_roundtrip,
    "GF(2^d) distributivity, d <= 4": _gf_distributive,
    "syndrome linearity": _syndrome_linear,
    "regular column/row weights": _regular_weights,
    "CRS round trip": _crs_roundtrip,
    "concatenated entropy = 2 H(k)": _concatenation_entropy,
    "H(k|y) <= H(k), non-increasing in rho": _conditioning_reduces_entropy,
    "symplectic closed forms": _symplectic_closed_forms,
    "chi = 0 at tau = 1 and V = 0": _holevo_nulls,
    "leakage / (n h d) = R*_synd": _leakage_identity,
    "storage golden numbers": _storage_golden,
}


def run_selftest(out: io.TextIOBase) -> bool:
    all_ok = True
    for name, check in CHECKS.items():
        try:
            ok = bool(check())
            detail = ""
        except Exception as exc:  # a crash is a failed check, reported not raised
            ok, detail = False, f" ({type(exc).__name__}: {exc})"
        all_ok &= ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}{detail}", file=out)
    return all_ok
