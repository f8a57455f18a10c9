"""Composable finite-size secret key rate and its optimization.

Per-signal rate after PE, EC and privacy amplification::

    r_n = h I(k:y) - chi(tau_pe, xi_pe) - Delta_leak/sqrt(n) - Delta_aep/sqrt(n) + theta/n

and the overall rate is ``R = p_ec (n/N) r_n`` (zero when ``r_n <= 0``).
The ``N - n`` sacrificed signals feed parameter estimation.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from tightleak.digitizer import DiscreteStats, build_grid, conditional_stats, zeta_digit
from tightleak.holevo import holevo_bound
from tightleak.leakage import (
    InfeasibleCodeError,
    delta_leak,
    epsilon_ec,
    optimal_syndrome_rate,
    reconciliation_efficiency,
    tight_leakage_bits,
    zeta_leak,
)
from tightleak.ldpc.storage import predicted_storage
from tightleak.protocol import (
    ChannelParams,
    ProtocolConfig,
    loss_db_to_tau,
    signal_model,
    worst_case_params,
)

__all__ = [
    "RatePoint",
    "aep_delta",
    "theta",
    "asymptotic_rate_pe_ec",
    "asymptotic_rate_zeta_form",
    "finite_rate",
    "golden_section_max",
    "optimize",
    "sweep",
    "max_tolerable_loss",
    "V_BOUNDS",
    "RATIO_BOUNDS",
]

V_BOUNDS = (0.5, 100.0)
RATIO_BOUNDS = (0.5, 0.95)
V_GRID = 25
RATIO_GRID = 15
SPARSE_MEAN_DV = 2.0


@dataclass(frozen=True)
class RatePoint:
    loss_db: float
    N: int
    n: int
    V: float
    R: float
    r_n: float
    R_infty_pe_ec: float
    zeta: float
    zeta_digit: float
    zeta_leak: float
    snr: float
    leak_bits: float
    R_code_star: float
    m_sparse_star_bits: float
    chi: float = 0.0
    tau_wc: float = 1.0
    xi_wc: float = 0.0
    feasible: bool = True

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def aep_delta(d: int, h: int, eps_s: float) -> float:
    """AEP penalty coefficient (bits per sqrt(signal))."""
    return 4.0 * math.log2(math.sqrt(2.0 ** (h * d)) + 2.0) * math.sqrt(math.log2(2.0 / eps_s**2))


def theta(eps_h: float, eps_cor: float) -> float:
    return math.log2(2.0 * eps_h**2 * eps_cor)


def asymptotic_rate_pe_ec(
    cfg: ProtocolConfig, ch_wc: ChannelParams, stats: DiscreteStats, n: float
) -> float:
    """``h I(k:y) - chi - Delta_leak/sqrt(n)`` with ``ch_wc`` already pessimized."""
    chi = holevo_bound(cfg, ch_wc).chi
    dl = delta_leak(stats.V_k_given_y, cfg.h, epsilon_ec(cfg.p_ec, cfg.eps_cor))
    return cfg.h * stats.I_ky - chi - dl / math.sqrt(n)


def asymptotic_rate_zeta_form(
    cfg: ProtocolConfig, ch: ChannelParams, ch_wc: ChannelParams, stats: DiscreteStats, n: float
) -> float:
    """Same rate written as ``zeta I(x:y) - chi``."""
    info = signal_model(cfg, ch).mutual_info_gauss
    dl = delta_leak(stats.V_k_given_y, cfg.h, epsilon_ec(cfg.p_ec, cfg.eps_cor))
    zd = cfg.h * stats.I_ky / info
    zl = zeta_leak(stats.I_ky, cfg.h, n, dl)
    return reconciliation_efficiency(zd, zl) * info - holevo_bound(cfg, ch_wc).chi


def _stats_for(cfg: ProtocolConfig, rho: float) -> DiscreteStats:
    return conditional_stats(build_grid(cfg.d, cfg.alpha), rho)


def finite_rate(
    cfg: ProtocolConfig,
    ch: ChannelParams,
    N: int,
    n: int,
    V: float | None = None,
    *,
    loss_db: float | None = None,
    worst_case: bool = True,
) -> RatePoint:
    """Evaluate every diagnostic of the rate at one operating point.

    ``worst_case=False`` skips the PE substitution and uses the nominal
    channel in the Holevo term (for comparisons only; it is not secure).
    """
    if V is not None:
        ch = ch.with_(V=V)
    if not 2 <= n <= N:
        raise ValueError(f"need 2 <= n <= N, got n={n}, N={N}")
    if loss_db is None:
        loss_db = -10.0 * math.log10(ch.tau)
    h = cfg.h
    sig = signal_model(cfg, ch)
    stats = _stats_for(cfg, sig.rho)

    if worst_case:
        if N - n < 1:
            raise ValueError("no signals left for parameter estimation")
        tau_wc, xi_wc = worst_case_params(ch, cfg, N - n)
    else:
        tau_wc, xi_wc = ch.tau, ch.xi
    ch_wc = ch.with_(tau=tau_wc, xi=xi_wc)

    eps_ec = epsilon_ec(cfg.p_ec, cfg.eps_cor)
    chi = holevo_bound(cfg, ch_wc).chi
    budget = tight_leakage_bits(n, h, stats.H_k_given_y, stats.V_k_given_y, eps_ec)
    r_inf = h * stats.I_ky - chi - budget.delta_leak / math.sqrt(n)
    r_n = r_inf - aep_delta(cfg.d, h, cfg.eps_s) / math.sqrt(n) + theta(cfg.eps_h, cfg.eps_cor) / n
    R = max(0.0, cfg.p_ec * (n / N) * r_n)

    if stats.I_ky > 0.0 and sig.mutual_info_gauss > 0.0:
        zd = zeta_digit(stats, h, sig.mutual_info_gauss)
        zl = zeta_leak(stats.I_ky, h, n, budget.delta_leak)
    else:
        zd = zl = 0.0
    try:
        r_synd, r_code = optimal_syndrome_rate(
            stats.H_k_given_y, stats.V_k_given_y, cfg.d, h, n, eps_ec
        )
        m_sparse = predicted_storage(n, h, cfg.d, SPARSE_MEAN_DV, r_synd)[1]
    except InfeasibleCodeError:
        r_code = math.nan
        m_sparse = math.nan

    return RatePoint(
        loss_db=float(loss_db),
        N=int(N),
        n=int(n),
        V=float(ch.V),
        R=R,
        r_n=r_n,
        R_infty_pe_ec=r_inf,
        zeta=reconciliation_efficiency(zd, zl),
        zeta_digit=zd,
        zeta_leak=zl,
        snr=sig.snr,
        leak_bits=budget.leak_bits,
        R_code_star=r_code,
        m_sparse_star_bits=m_sparse,
        chi=chi,
        tau_wc=tau_wc,
        xi_wc=xi_wc,
        feasible=R > 0.0,
    )


def golden_section_max(f, a: float, b: float, tol: float = 1e-4, max_iter: int = 60):
    """Maximize a unimodal ``f`` on [a, b]; returns ``(x, f(x))`` of the best probe."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc >= fd else (d, fd)
    for _ in range(max_iter):
        if abs(b - a) <= tol * (abs(a) + abs(b) + 1e-12):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
            if fc > best[1]:
                best = (c, fc)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
            if fd > best[1]:
                best = (d, fd)
    return best


def _objective(point: RatePoint) -> float:
    # Below the abort threshold, keep a gradient towards feasibility so the
    # line searches still move: rank by r_n (negative) rather than flat zero.
    return point.R if point.R > 0.0 else min(point.r_n, 0.0) - 1.0


def optimize(
    cfg: ProtocolConfig,
    ch_base: ChannelParams,
    N: int,
    V_bounds: tuple[float, float] = V_BOUNDS,
    ratio_bounds: tuple[float, float] = RATIO_BOUNDS,
    *,
    loss_db: float | None = None,
    V_fixed: float | None = None,
    ratio_fixed: float | None = None,
) -> RatePoint:
    """Maximize R over modulation variance and the kept fraction n/N.

    A coarse grid (log-spaced in V) is followed by golden-section line
    searches on each axis within the neighbouring grid cells. Either axis
    can be pinned with ``V_fixed`` / ``ratio_fixed``.
    """
    if not V_bounds[0] < V_bounds[1] or not ratio_bounds[0] < ratio_bounds[1]:
        raise ValueError("search bounds must be non-degenerate")
    log_vs = (
        np.array([math.log(V_fixed)])
        if V_fixed is not None
        else np.linspace(math.log(V_bounds[0]), math.log(V_bounds[1]), V_GRID)
    )
    ratios = (
        np.array([ratio_fixed]) if ratio_fixed is not None else np.linspace(*ratio_bounds, RATIO_GRID)
    )

    def n_of(ratio: float) -> int:
        return int(min(max(round(ratio * N), 2), N - 1))

    def evaluate(log_v: float, ratio: float) -> RatePoint:
        return finite_rate(cfg, ch_base, N, n_of(ratio), math.exp(log_v), loss_db=loss_db)

    best = None
    best_idx = (0, 0)
    for i, lv in enumerate(log_vs):
        for j, rt in enumerate(ratios):
            p = evaluate(lv, rt)
            if best is None or _objective(p) > _objective(best):
                best, best_idx = p, (i, j)
    best_lv, best_rt = log_vs[best_idx[0]], ratios[best_idx[1]]

    def cell(grid, idx):
        if len(grid) == 1:
            return None
        return (grid[max(idx - 1, 0)], grid[min(idx + 1, len(grid) - 1)])

    v_cell = cell(log_vs, best_idx[0])
    r_cell = cell(ratios, best_idx[1])
    for _ in range(2):
        if v_cell is not None:
            lv, _val = golden_section_max(lambda x: _objective(evaluate(x, best_rt)), *v_cell)
            cand = evaluate(lv, best_rt)
            if _objective(cand) > _objective(best):
                best, best_lv = cand, lv
        if r_cell is not None:
            rt, _val = golden_section_max(lambda x: _objective(evaluate(best_lv, x)), *r_cell)
            cand = evaluate(best_lv, rt)
            if _objective(cand) > _objective(best):
                best, best_rt = cand, rt
    if best.R <= 0.0:
        best = replace(best, R=0.0, feasible=False)
    return best


def _channel_at(loss_db: float, xi: float, V: float = 1.0) -> ChannelParams:
    return ChannelParams(tau=loss_db_to_tau(loss_db), xi=xi, V=V)


def sweep(
    cfg: ProtocolConfig,
    axis: str,
    values,
    *,
    xi: float,
    loss_db: float = 0.02,
    N: int = 200_000,
    V_bounds: tuple[float, float] = V_BOUNDS,
    ratio_bounds: tuple[float, float] = RATIO_BOUNDS,
    V_fixed: float | None = None,
    ratio_fixed: float | None = None,
) -> list[RatePoint]:
    """One optimized point per value of ``axis`` ("loss_db" or "N"), in input order."""
    values = list(values)
    if not values:
        raise ValueError("sweep range is empty")
    out = []
    for v in values:
        if axis == "loss_db":
            ch, big_n, db = _channel_at(v, xi), N, v
        elif axis == "N":
            ch, big_n, db = _channel_at(loss_db, xi), int(v), loss_db
        else:
            raise ValueError(f"unknown sweep axis {axis!r}")
        out.append(
            optimize(
                cfg, ch, big_n, V_bounds, ratio_bounds,
                loss_db=db, V_fixed=V_fixed, ratio_fixed=ratio_fixed,
            )
        )
    return out


def max_tolerable_loss(
    cfg: ProtocolConfig,
    *,
    xi: float,
    N: int,
    lo: float = 0.0,
    hi: float = 20.0,
    tol: float = 0.01,
) -> float:
    """Largest loss (dB) with a positive optimized rate, by bisection.

    Returns ``lo`` if the rate is already zero there.
    """

    def positive(db: float) -> bool:
        return optimize(cfg, _channel_at(db, xi), N, loss_db=db).R > 0.0

    if not positive(lo):
        return lo
    if positive(hi):
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if positive(mid):
            lo = mid
        else:
            hi = mid
    return lo
