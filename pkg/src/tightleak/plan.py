"""Turn an operating point into a concrete LDPC code plan."""

from __future__ import annotations

from tightleak.digitizer import build_grid, conditional_stats
from tightleak.io import RunConfig
from tightleak.keyrate import RATIO_BOUNDS, V_BOUNDS, optimize
from tightleak.leakage import InfeasibleCodeError, epsilon_ec, optimal_syndrome_rate
from tightleak.ldpc.code import design_rate
from tightleak.ldpc.storage import predicted_storage
from tightleak.protocol import ChannelParams, loss_db_to_tau, signal_model

__all__ = ["nearest_regular_code", "code_plan"]


def nearest_regular_code(R_code: float, d_v: int = 2, d_c_max: int = 64) -> tuple[int, int, float]:
    """Regular ``(d_v, d_c)`` whose design rate is closest to ``R_code``.

    Ties go to the smaller row weight.
    """
    best = None
    for d_c in range(d_v + 1, d_c_max + 1):
        r = design_rate(d_v, d_c)
        gap = abs(r - R_code)
        if best is None or gap < best[0] - 1e-15:
            best = (gap, d_c, r)
    return d_v, best[1], best[2]


def code_plan(run: RunConfig, d_v: int = 2) -> dict:
    """Leakage-optimal code rate and storage for the configured point.

    ``V`` and ``n`` come from the config when given, otherwise from the rate
    optimizer. The report carries ``feasible: False`` and no code when the
    syndrome rate bound reaches 1.
    """
    cfg = run.protocol
    tau = loss_db_to_tau(run.loss_db)
    ch = ChannelParams(tau=tau, xi=run.xi, V=run.V if run.V is not None else 1.0)
    if run.V is None or run.n_ratio is None:
        best = optimize(
            cfg, ch, run.N, V_BOUNDS, RATIO_BOUNDS,
            loss_db=run.loss_db, V_fixed=run.V, ratio_fixed=run.n_ratio,
        )
        V, n = best.V, best.n
    else:
        V, n = run.V, int(round(run.n_ratio * run.N))
    ch = ch.with_(V=V)
    sig = signal_model(cfg, ch)
    stats = conditional_stats(build_grid(cfg.d, cfg.alpha), sig.rho)
    report = {
        "loss_db": run.loss_db,
        "N": run.N,
        "n": n,
        "h": cfg.h,
        "d": cfg.d,
        "V": V,
        "snr": sig.snr,
        "H_k": stats.H_k,
        "H_k_given_y": stats.H_k_given_y,
        "V_k_given_y": stats.V_k_given_y,
    }
    try:
        r_synd, r_code = optimal_syndrome_rate(
            stats.H_k_given_y, stats.V_k_given_y, cfg.d, cfg.h, n,
            epsilon_ec(cfg.p_ec, cfg.eps_cor),
        )
    except InfeasibleCodeError as exc:
        report.update(feasible=False, reason=str(exc))
        return report
    dv, dc, r_design = nearest_regular_code(r_code, d_v)
    dense, sparse = predicted_storage(n, cfg.h, cfg.d, d_v, r_synd)
    report.update(
        feasible=True,
        R_synd_star=r_synd,
        R_code_star=r_code,
        d_v=dv,
        d_c=dc,
        R_design=r_design,
        m_dense_star_bits=dense,
        m_sparse_star_bits=sparse,
        m_dense_star_GB=dense / 8e9,
        m_sparse_star_MB=sparse / 8e6,
    )
    return report
