"""Standard normal CDF and quantile with accurate deep tails.

The quantile starts from Acklam's rational approximation (relative error
around 1e-9) and is polished with one Halley step against ``erfc``, which
brings it to full double precision over the range of interest
(tail probabilities down to ~1e-300).
"""

import math

__all__ = ["norm_cdf", "norm_sf", "norm_ppf", "norm_isf"]

_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425
_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def norm_cdf(x: float) -> float:
    """Phi(x), evaluated through erfc so the lower tail keeps relative precision."""
    return 0.5 * math.erfc(-x / _SQRT2)


def norm_sf(x: float) -> float:
    """Upper tail 1 - Phi(x)."""
    return 0.5 * math.erfc(x / _SQRT2)


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
            ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    if p > 1.0 - _P_LOW:
        q = math.sqrt(-2.0 * math.log1p(-p))
        return -(((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
            ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / \
        (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)


def norm_ppf(p: float) -> float:
    """Inverse of the standard normal CDF.

    Parameters
    ----------
    p : float
        Probability in [0, 1]. The endpoints map to -inf and +inf.

    Returns
    -------
    float
        ``z`` such that ``norm_cdf(z) == p``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p!r}")
    if p == 0.0:
        return -math.inf
    if p == 1.0:
        return math.inf
    # Solve in the smaller tail so the residual is computed without cancellation.
    if p > 0.5:
        return -_lower_quantile(1.0 - p) if 1.0 - p > 0.0 else math.inf
    return _lower_quantile(p)


def norm_isf(q: float) -> float:
    """Inverse survival function: ``z`` with ``1 - Phi(z) == q``.

    Use this instead of ``norm_ppf(1 - q)`` when ``q`` is tiny; forming
    ``1 - q`` in floating point throws away most of its digits.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {q!r}")
    if q == 0.0:
        return math.inf
    if q == 1.0:
        return -math.inf
    if q > 0.5:
        return _lower_quantile(1.0 - q)
    return -_lower_quantile(q)


def _lower_quantile(p: float) -> float:
    # p in (0, 0.5]
    x = _acklam(p)
    e = norm_cdf(x) - p
    u = e * _SQRT2PI * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)
