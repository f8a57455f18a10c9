"""Non-binary LDPC parity-check matrices and their storage."""

from tightleak.ldpc.code import LdpcCode, design_rate, generate_regular_ldpc, syndrome
from tightleak.ldpc.gf import GaloisField, gf_ops
from tightleak.ldpc.storage import dense_storage_bits, predicted_storage, sparse_storage_bits

__all__ = [
    "GaloisField",
    "LdpcCode",
    "dense_storage_bits",
    "design_rate",
    "generate_regular_ldpc",
    "gf_ops",
    "predicted_storage",
    "sparse_storage_bits",
    "syndrome",
]
