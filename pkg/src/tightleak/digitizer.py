"""d-bit digitization of normalized quadratures and its entropies.

Both parties' quadratures are standardized to unit variance, so every
statistic here depends on the channel only through the correlation
coefficient ``rho`` between them. The key variable ``x`` is digitized; the
other party holds the continuous ``y``, with ``x | y ~ N(rho y, 1 - rho^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ndtr, roots_hermitenorm

__all__ = [
    "DigitizationGrid",
    "DiscreteStats",
    "build_grid",
    "digitize",
    "concatenate",
    "split_symbol",
    "bin_probabilities",
    "marginal_entropy",
    "conditional_stats",
    "zeta_digit",
]

DEFAULT_ALPHA = 5.0
GH_NODES = 201
GH_MAX_NODES = 3216
GH_TOL = 1e-8
P_FLOOR = 1e-300


@dataclass(frozen=True)
class DigitizationGrid:
    d: int
    alpha: float
    edges: tuple

    @property
    def n_bins(self) -> int:
        return 1 << self.d

    def as_array(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=float)


@dataclass(frozen=True)
class DiscreteStats:
    H_k: float
    H_k_given_y: float
    V_k_given_y: float

    @property
    def I_ky(self) -> float:
        return self.H_k - self.H_k_given_y


def build_grid(d: int, alpha: float = DEFAULT_ALPHA) -> DigitizationGrid:
    """Uniform bins on [-alpha, alpha] plus two unbounded tail bins.

    For ``d = 1`` the only boundary is the origin (sign digitization).
    """
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d!r}")
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    d = int(d)
    if d == 1:
        interior = [0.0]
    else:
        # mirror the positive half so the grid is exactly symmetric
        half = (1 << (d - 1)) - 1
        pos = (alpha * np.arange(1, half + 1) / half).tolist()
        interior = [-x for x in reversed(pos)] + [0.0] + pos
    edges = (-math.inf, *interior, math.inf)
    return DigitizationGrid(d=d, alpha=float(alpha), edges=edges)


def digitize(x_norm, grid: DigitizationGrid):
    """Bin index for normalized values; bins are left-closed, so ties go right."""
    x = np.asarray(x_norm, dtype=float)
    if np.isnan(x).any():
        raise ValueError("cannot digitize NaN")
    k = np.searchsorted(grid.as_array()[1:-1], x, side="right")
    return int(k) if k.ndim == 0 else k


def concatenate(k_q, k_p, d: int):
    """Merge the two heterodyne symbols into one key symbol ``k_q 2^d + k_p``."""
    size = 1 << d
    kq = np.asarray(k_q)
    kp = np.asarray(k_p)
    if (kq < 0).any() or (kq >= size).any() or (kp < 0).any() or (kp >= size).any():
        raise ValueError(f"symbols must lie in [0, {size - 1}]")
    out = kq * size + kp
    return int(out) if out.ndim == 0 else out


def split_symbol(k, d: int):
    return np.divmod(k, 1 << d)


def bin_probabilities(grid: DigitizationGrid) -> np.ndarray:
    """p(k) for a standard normal digitized by ``grid``."""
    return _interval_mass(grid.as_array(), 0.0, 1.0)


def _interval_mass(edges: np.ndarray, mean, scale: float) -> np.ndarray:
    """Gaussian mass in consecutive intervals, broadcasting over ``mean``.

    The lower-half difference ``Phi(b) - Phi(a)`` and its mirrored upper-half
    form are combined so that no tail probability is lost to cancellation.
    """
    mean = np.asarray(mean, dtype=float)[..., None]
    z = (edges - mean) / scale
    lo = ndtr(z[..., 1:]) - ndtr(z[..., :-1])
    hi = ndtr(-z[..., :-1]) - ndtr(-z[..., 1:])
    centre = 0.5 * (z[..., 1:] + z[..., :-1])
    with np.errstate(invalid="ignore"):
        use_hi = centre > 0.0
    # infinite edge pairs give nan centres only when both edges are infinite
    use_hi = np.where(np.isnan(centre), False, use_hi)
    return np.where(use_hi, hi, lo)


def _plogp(p: np.ndarray) -> np.ndarray:
    safe = np.maximum(p, P_FLOOR)
    return np.where(p > 0.0, -p * np.log2(safe), 0.0)


def marginal_entropy(grid: DigitizationGrid) -> float:
    return float(_plogp(bin_probabilities(grid)).sum())


@lru_cache(maxsize=16)
def _hermite_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_hermitenorm(n)
    return nodes, weights / math.sqrt(2.0 * math.pi)


def _moments_at(grid_edges: np.ndarray, rho: float, n_nodes: int) -> tuple[float, float]:
    y, w = _hermite_rule(n_nodes)
    s = math.sqrt(1.0 - rho * rho)
    p = _interval_mass(grid_edges, rho * y, s)
    surprisal = -np.log2(np.maximum(p, P_FLOOR))
    mask = p > 0.0
    first = np.where(mask, p * surprisal, 0.0).sum(axis=1)
    second = np.where(mask, p * surprisal**2, 0.0).sum(axis=1)
    return float(w @ first), float(w @ second)


@lru_cache(maxsize=4096)
def _conditional_moments(edges: tuple, rho: float) -> tuple[float, float]:
    arr = np.asarray(edges, dtype=float)
    n = GH_NODES
    h_prev, m2_prev = _moments_at(arr, rho, n)
    while n < GH_MAX_NODES:
        n *= 2
        h_next, m2_next = _moments_at(arr, rho, n)
        converged = abs(h_next - h_prev) < GH_TOL
        h_prev, m2_prev = h_next, m2_next
        if converged:
            break
    return h_prev, m2_prev


def conditional_stats(grid: DigitizationGrid, rho: float) -> DiscreteStats:
    """H(k), H(k|y) and V(k|y) in bits for correlation ``rho``.

    The outer expectation over ``y ~ N(0, 1)`` uses Gauss-Hermite quadrature
    (201 nodes, doubled until H(k|y) moves by less than 1e-8). V(k|y) is the
    variance of the surprisal ``-log2 p(k|y)`` over the joint law of (k, y).
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho!r}")
    h_k = marginal_entropy(grid)
    h_cond, m2 = _conditional_moments(grid.edges, float(rho))
    h_cond = min(max(h_cond, 0.0), h_k)
    var = max(m2 - h_cond * h_cond, 0.0)
    return DiscreteStats(H_k=h_k, H_k_given_y=h_cond, V_k_given_y=var)


def zeta_digit(stats: DiscreteStats, h: int, I_gauss: float) -> float:
    """Fraction of the Gaussian mutual information kept after digitization."""
    if not I_gauss > 0.0:
        raise ValueError("Gaussian mutual information must be positive")
    z = h * stats.I_ky / I_gauss
    if z > 1.0 + 1e-9:
        raise ArithmeticError(f"digitization efficiency {z} exceeds 1")
    return min(z, 1.0)
