"""Protocol and channel parameterization for GMCS CV-QKD.

All variances are in shot-noise units (vacuum quadrature variance = 1).
The modulation variance ``V`` is the classical Gaussian displacement
variance, so Alice's average state has quadrature variance ``V + 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from tightleak.normal import norm_isf

__all__ = [
    "Detection",
    "Direction",
    "ProtocolConfig",
    "ChannelParams",
    "SignalModel",
    "loss_db_to_tau",
    "tau_to_loss_db",
    "omega_from_xi",
    "signal_model",
    "worst_case_params",
    "TABLE_II",
]

EPS_DEFAULT = 2.0**-32


class Detection(enum.Enum):
    HOMODYNE = "hom"
    HETERODYNE = "het"

    @property
    def h(self) -> int:
        return 1 if self is Detection.HOMODYNE else 2


class Direction(enum.Enum):
    DR = "dr"
    RR = "rr"


def _check_open_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {value!r}")


@dataclass(frozen=True)
class ProtocolConfig:
    """Protocol settings shared by every rate evaluation."""

    detection: Detection = Detection.HOMODYNE
    direction: Direction = Direction.DR
    d: int = 4
    eps_s: float = EPS_DEFAULT
    eps_h: float = EPS_DEFAULT
    eps_cor: float = EPS_DEFAULT
    eps_pe: float = EPS_DEFAULT
    p_ec: float = 0.9
    eta_d: float = 0.8
    u_el: float = 0.01
    alpha: float = 5.0
    trusted_detector: bool = True

    def __post_init__(self):
        if isinstance(self.detection, str):
            object.__setattr__(self, "detection", Detection(self.detection))
        if isinstance(self.direction, str):
            object.__setattr__(self, "direction", Direction(self.direction))
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")
        for name in ("eps_s", "eps_h", "eps_cor", "eps_pe"):
            _check_open_unit(name, getattr(self, name))
        if not 0.0 < self.p_ec <= 1.0:
            raise ValueError(f"p_ec must lie in (0, 1], got {self.p_ec!r}")
        if not 0.0 < self.eta_d <= 1.0:
            raise ValueError(f"eta_d must lie in (0, 1], got {self.eta_d!r}")
        if self.u_el < 0.0:
            raise ValueError(f"u_el must be non-negative, got {self.u_el!r}")
        if self.alpha <= 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")

    @property
    def h(self) -> int:
        return self.detection.h


@dataclass(frozen=True)
class ChannelParams:
    """Thermal-loss channel seen by the modulated states.

    ``omega`` is derived lazily: a lossless channel (``tau == 1``) carrying
    excess noise has no entangling-cloner description, but such a point is
    still a valid nominal channel as long as only worst-case estimates
    (which always have ``tau < 1``) reach the Holevo computation.
    """

    tau: float
    xi: float
    V: float

    def __post_init__(self):
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must lie in (0, 1], got {self.tau!r}")
        if self.xi < 0.0:
            raise ValueError(f"xi must be non-negative, got {self.xi!r}")
        if self.V < 0.0:
            raise ValueError(f"V must be non-negative, got {self.V!r}")

    @property
    def omega(self) -> float:
        return omega_from_xi(self.tau, self.xi)

    def with_(self, **changes) -> "ChannelParams":
        values = {"tau": self.tau, "xi": self.xi, "V": self.V}
        values.update(changes)
        return ChannelParams(**values)


@dataclass(frozen=True)
class SignalModel:
    snr: float
    rho: float
    mutual_info_gauss: float


def loss_db_to_tau(loss_db: float) -> float:
    if loss_db < 0.0 or math.isnan(loss_db):
        raise ValueError(f"loss must be non-negative dB, got {loss_db!r}")
    return 10.0 ** (-loss_db / 10.0)


def tau_to_loss_db(tau: float) -> float:
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must lie in (0, 1], got {tau!r}")
    return -10.0 * math.log10(tau)


def omega_from_xi(tau: float, xi: float) -> float:
    """Eve's thermal variance for an entangling cloner producing excess noise ``xi``."""
    if xi < 0.0:
        raise ValueError(f"xi must be non-negative, got {xi!r}")
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must lie in (0, 1], got {tau!r}")
    if tau == 1.0:
        if xi == 0.0:
            return 1.0
        raise ValueError("a lossless channel (tau = 1) cannot carry excess noise")
    return 1.0 + tau * xi / (1.0 - tau)


def _noise_variance(cfg: ProtocolConfig, tau: float, xi: float) -> float:
    """Per-quadrature noise variance at Bob's detector output (unscaled units)."""
    if cfg.detection is Detection.HOMODYNE:
        return 1.0 + cfg.u_el + cfg.eta_d * tau * xi
    return 1.0 + cfg.u_el + 0.5 * cfg.eta_d * tau * xi


def _gain(cfg: ProtocolConfig) -> float:
    """Squared amplitude gain per unit tau: y = sqrt(gain * tau) * x + z."""
    return cfg.eta_d if cfg.detection is Detection.HOMODYNE else 0.5 * cfg.eta_d


def signal_model(cfg: ProtocolConfig, ch: ChannelParams) -> SignalModel:
    """SNR, correlation and Gaussian mutual information per channel use.

    Heterodyne splits the signal on a balanced beamsplitter, which is why
    both gain and excess noise are halved relative to the unit vacuum term.
    """
    snr = _gain(cfg) * ch.tau * ch.V / _noise_variance(cfg, ch.tau, ch.xi)
    rho = math.sqrt(snr / (1.0 + snr))
    info = 0.5 * cfg.h * math.log2(1.0 + snr)
    return SignalModel(snr=snr, rho=rho, mutual_info_gauss=info)


def worst_case_params(ch: ChannelParams, cfg: ProtocolConfig, m: float) -> tuple[float, float]:
    """Confidence-limit channel parameters from ``m`` parameter-estimation signals.

    Bob's outcome is modelled as ``y = s x + z``. The maximum-likelihood
    estimators of ``s`` and of the noise variance are shifted by ``w``
    standard deviations, ``w = Phi^-1(1 - eps_pe)``, towards the
    pessimistic side, and then mapped back to ``(tau, xi)``. Heterodyne
    yields two samples per signal.
    """
    if m <= 0:
        raise ValueError("parameter estimation needs at least one sample")
    if ch.V <= 0.0:
        return ch.tau, ch.xi
    samples = m * cfg.h
    w = norm_isf(cfg.eps_pe)
    gain = _gain(cfg)
    s = math.sqrt(gain * ch.tau)
    var_z = _noise_variance(cfg, ch.tau, ch.xi)

    s_wc = s - w * math.sqrt(var_z / (samples * ch.V))
    var_wc = var_z + w * var_z * math.sqrt(2.0 / samples)

    tau_floor = 1e-300
    tau_wc = max(s_wc, 0.0) ** 2 / gain
    tau_wc = min(max(tau_wc, tau_floor), ch.tau)
    excess = var_wc - 1.0 - cfg.u_el
    xi_wc = max(excess / (gain * tau_wc), ch.xi)
    return tau_wc, xi_wc


TABLE_II = {
    "xi": 0.01,
    "eta_d": 0.8,
    "u_el": 0.01,
    "eps_h": EPS_DEFAULT,
    "eps_cor": EPS_DEFAULT,
    "eps_pe": EPS_DEFAULT,
    "eps_s": EPS_DEFAULT,
}
