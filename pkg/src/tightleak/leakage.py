"""Finite-size one-way error-correction leakage for non-binary alphabets.

Leakage is charged as

    leak = n h H(k|y) + sqrt(n) * Delta_leak + delta(n)

with ``Delta_leak = sqrt(h V(k|y)) Phi^-1(1 - eps_ec)`` and
``delta(n) = 1/2 log2(h n)``. The constant part of ``delta(n)`` is dropped
and the second-order bound is taken at its pessimistic end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from tightleak.normal import norm_isf

__all__ = [
    "InfeasibleCodeError",
    "LeakageBudget",
    "epsilon_ec",
    "delta_leak",
    "delta_n",
    "tight_leakage_bits",
    "zeta_leak",
    "optimal_syndrome_rate",
    "reconciliation_efficiency",
]


class InfeasibleCodeError(ValueError):
    """The leakage bound needs a syndrome rate of one or more."""


@dataclass(frozen=True)
class LeakageBudget:
    n: int
    h: int
    leak_bits: float
    delta_leak: float
    delta_n: float
    eps_ec: float


def epsilon_ec(p_ec: float, eps_cor: float) -> float:
    """Probability that the keys differ after verification, with abort folded in."""
    if not 0.0 < p_ec <= 1.0:
        raise ValueError(f"p_ec must lie in (0, 1], got {p_ec!r}")
    if not 0.0 <= eps_cor < 1.0:
        raise ValueError(f"eps_cor must lie in [0, 1), got {eps_cor!r}")
    return 1.0 - p_ec * (1.0 - eps_cor)


def delta_leak(V_ky: float, h: int, eps_ec: float) -> float:
    """Second-order leakage coefficient; negative once ``eps_ec`` exceeds 1/2."""
    if V_ky < 0.0:
        raise ValueError("entropy variance must be non-negative")
    if not 0.0 < eps_ec < 1.0:
        raise ValueError(f"eps_ec must lie in (0, 1), got {eps_ec!r}")
    return math.sqrt(h * V_ky) * norm_isf(eps_ec)


def delta_n(n: float, h: int) -> float:
    return 0.5 * math.log2(h * n)


def tight_leakage_bits(n: int, h: int, H_ky: float, V_ky: float, eps_ec: float) -> LeakageBudget:
    if n < 2:
        raise ValueError(f"block size must be at least 2, got {n!r}")
    dl = delta_leak(V_ky, h, eps_ec)
    dn = delta_n(n, h)
    leak = n * h * H_ky + math.sqrt(n) * dl + dn
    return LeakageBudget(n=n, h=h, leak_bits=leak, delta_leak=dl, delta_n=dn, eps_ec=eps_ec)


def zeta_leak(I_ky: float, h: int, n: float, delta_leak_val: float) -> float:
    if not I_ky > 0.0:
        raise ValueError("mutual information I(k:y) must be positive")
    return 1.0 - delta_leak_val / (math.sqrt(n) * h * I_ky)


def optimal_syndrome_rate(
    H_ky: float, V_ky: float, d: int, h: int, n: float, eps_ec: float
) -> tuple[float, float]:
    """Smallest syndrome rate meeting the leakage bound, and the matching code rate.

    ``n = math.inf`` gives the asymptotic pair ``(H(k|y)/d, 1 - H(k|y)/d)``.

    Raises
    ------
    InfeasibleCodeError
        If the syndrome rate reaches 1 (no positive-rate code exists).
    """
    if not 0.0 <= H_ky <= d + 1e-12:
        raise ValueError(f"H(k|y) must lie in [0, d], got {H_ky!r}")
    if n < 2:
        raise ValueError(f"block size must be at least 2, got {n!r}")
    r_synd = H_ky / d
    if math.isfinite(n):
        dl = delta_leak(V_ky, h, eps_ec)
        r_synd += dl / (d * h * math.sqrt(n)) + delta_n(n, h) / (d * h * n)
    if r_synd >= 1.0:
        raise InfeasibleCodeError(f"syndrome rate {r_synd:.6f} >= 1: no positive-rate code")
    return r_synd, 1.0 - r_synd


def reconciliation_efficiency(zeta_digit: float, zeta_leak: float) -> float:
    return zeta_digit * zeta_leak
