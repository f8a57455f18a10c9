"""Gaussian-state entropies and Eve's Holevo information.

Eve runs an entangling cloner: one arm (variance ``omega``) of a two-mode
squeezed vacuum is mixed with the signal on a beamsplitter of
transmissivity ``tau``. She keeps the reflected mode E and the other
squeezer arm e. Covariance matrices are in shot-noise units and ordered
``(q1, p1, q2, p2, ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tightleak.protocol import ChannelParams, Detection, Direction, ProtocolConfig

__all__ = [
    "UnphysicalStateError",
    "HolevoResult",
    "g_entropy",
    "symplectic_form",
    "symplectic_eigenvalues",
    "gaussian_entropy",
    "two_mode_squeezed_vacuum",
    "eve_total_cm",
    "eve_bob_cross_cm",
    "bob_cm",
    "conditional_cm_dr",
    "conditional_cm_rr",
    "trusted_side_cm",
    "holevo_bound",
]

Z = np.diag([1.0, -1.0])
I2 = np.eye(2)
CLIP_TOL = 1e-9
UNPHYSICAL_TOL = 1e-6


class UnphysicalStateError(ValueError):
    pass


@dataclass(frozen=True)
class HolevoResult:
    S_E: float
    S_E_cond: float

    @property
    def chi(self) -> float:
        return max(self.S_E - self.S_E_cond, 0.0)


def g_entropy(nu):
    """Von Neumann entropy (bits) of a thermal mode with symplectic eigenvalue ``nu``."""
    nu = np.asarray(nu, dtype=float)
    if (nu < 1.0 - UNPHYSICAL_TOL).any():
        raise UnphysicalStateError(f"symplectic eigenvalue below 1: {nu.min()!r}")
    nu = np.maximum(nu, 1.0)
    plus = (nu + 1.0) / 2.0
    minus = (nu - 1.0) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = plus * np.log2(plus) - np.where(minus > 0.0, minus * np.log2(minus), 0.0)
    return float(out) if out.ndim == 0 else out


def symplectic_form(modes: int) -> np.ndarray:
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _check_cm(cm: np.ndarray) -> np.ndarray:
    cm = np.asarray(cm, dtype=float)
    if cm.ndim != 2 or cm.shape[0] != cm.shape[1] or cm.shape[0] % 2:
        raise ValueError(f"covariance matrix must be square with even size, got {cm.shape}")
    if not np.allclose(cm, cm.T, atol=1e-12, rtol=0.0):
        raise ValueError("covariance matrix is not symmetric")
    return cm


def symplectic_eigenvalues(cm) -> np.ndarray:
    """Sorted symplectic spectrum.

    Two-mode matrices use the closed form in terms of the block invariant
    ``Delta = det A + det B + 2 det C``; larger ones take the moduli of the
    eigenvalues of ``i Omega V``, which come in +/- pairs.
    """
    cm = _check_cm(cm)
    modes = cm.shape[0] // 2
    if modes == 1:
        return np.array([np.sqrt(max(np.linalg.det(cm), 0.0))])
    if modes == 2:
        a, b, c = cm[:2, :2], cm[2:, 2:], cm[:2, 2:]
        delta = np.linalg.det(a) + np.linalg.det(b) + 2.0 * np.linalg.det(c)
        det = np.linalg.det(cm)
        disc_sq = delta * delta - 4.0 * det
        # near-degenerate spectra (e.g. pure states) lose half their digits
        # to cancellation in disc_sq; the eigen-route stays accurate there
        if disc_sq < 1e-6 * delta * delta:
            return symplectic_eigenvalues_general(cm)
        disc = np.sqrt(disc_sq)
        nu_sq = np.array([(delta - disc) / 2.0, (delta + disc) / 2.0])
        return np.sqrt(np.maximum(nu_sq, 0.0))
    return symplectic_eigenvalues_general(cm)


def symplectic_eigenvalues_general(cm) -> np.ndarray:
    """Spectrum from the Hermitian matrix ``V^1/2 (i Omega) V^1/2`` (eigenvalues +/- nu)."""
    cm = _check_cm(cm)
    modes = cm.shape[0] // 2
    w, u = np.linalg.eigh(cm)
    if w.min() <= 0.0:
        raise UnphysicalStateError("covariance matrix is not positive definite")
    root = (u * np.sqrt(w)) @ u.T
    ev = np.linalg.eigvalsh(root @ (1j * symplectic_form(modes)) @ root)
    return np.sort(ev)[modes:]


def gaussian_entropy(cm) -> float:
    nu = symplectic_eigenvalues(cm)
    if (nu < 1.0 - UNPHYSICAL_TOL).any():
        raise UnphysicalStateError(f"unphysical covariance matrix, nu = {nu}")
    return float(np.sum(g_entropy(np.maximum(nu, 1.0))))


def two_mode_squeezed_vacuum(omega: float) -> np.ndarray:
    c = np.sqrt(max(omega * omega - 1.0, 0.0))
    return np.block([[omega * I2, c * Z], [c * Z, omega * I2]])


def _phi_psi(tau: float, omega: float, V: float) -> tuple[float, float, float]:
    phi0 = tau * omega + (1.0 - tau)
    phi = tau * omega + (1.0 - tau) * (V + 1.0)
    psi = np.sqrt(tau * (omega * omega - 1.0))
    return phi0, phi, psi


def eve_total_cm(tau: float, omega: float, V: float) -> np.ndarray:
    """Covariance of Eve's (E, e) before anyone's data is revealed."""
    _, phi, psi = _phi_psi(tau, omega, V)
    return np.block([[phi * I2, psi * Z], [psi * Z, omega * I2]])


def conditional_cm_dr(tau: float, omega: float, V: float, detection: Detection) -> np.ndarray:
    """Eve's state conditioned on Alice's modulation.

    Homodyne conditions only the q displacement; heterodyne conditions both.
    """
    phi0, phi, psi = _phi_psi(tau, omega, V)
    if detection is Detection.HOMODYNE:
        top = np.diag([phi0, phi])
    else:
        top = phi0 * I2
    return np.block([[top, psi * Z], [psi * Z, omega * I2]])


def bob_cm(tau: float, omega: float, V: float) -> np.ndarray:
    """Bob's received mode B, before detection."""
    return (tau * (V + 1.0) + (1.0 - tau) * omega) * I2


def eve_bob_cross_cm(tau: float, omega: float, V: float) -> np.ndarray:
    """Cross-covariance between Eve's (E, e) rows and Bob's mode B columns."""
    c_eb = np.sqrt(tau * (1.0 - tau)) * (omega - V - 1.0)
    c_fb = np.sqrt((1.0 - tau) * (omega * omega - 1.0))
    return np.vstack([c_eb * I2, c_fb * Z])


def conditional_cm_rr(
    tau: float,
    omega: float,
    V: float,
    eta_d: float,
    u_el: float,
    detection: Detection,
    trusted_detector: bool = True,
) -> np.ndarray:
    """Eve's state conditioned on Bob's measurement outcome.

    The detector is a beamsplitter of efficiency ``eta_d`` followed by
    additive electronic noise ``u_el``. Rescaling the outcome by
    ``1/sqrt(eta_d)`` turns that into extra classical noise
    ``(1 - eta_d + u_el) / eta_d`` on an ideal measurement of B; heterodyne
    adds the vacuum unit of its splitter and pays the detector noise twice.
    With ``trusted_detector=False`` Eve is conditioned on an ideal
    measurement of B instead, which can only lower her conditional entropy.
    """
    v_e = eve_total_cm(tau, omega, V)
    c = eve_bob_cross_cm(tau, omega, V)
    v_b = bob_cm(tau, omega, V)[0, 0]
    if trusted_detector:
        extra = (1.0 - eta_d + u_el) / eta_d
    else:
        extra = 0.0
    if detection is Detection.HOMODYNE:
        cq = c[:, :1]
        denom = v_b + extra
        if denom <= 0.0:
            raise ZeroDivisionError("singular homodyne conditioning block")
        return v_e - cq @ cq.T / denom
    denom = v_b + 1.0 + 2.0 * extra
    return v_e - c @ c.T / denom


def trusted_side_cm(tau: float, xi: float, s_q: float, s_p: float) -> np.ndarray:
    """Covariance of (P, B): Bob's mode and a partner P purifying Alice's input.

    Alice's input has covariance ``diag(s_q, s_p)``. Together with Eve's
    (E, e) the four modes are pure, so any entropy of Eve's modes equals
    that of (P, B) or of what is left of them after Bob measures. Unlike
    Eve's own covariance, whose entries grow like ``omega`` as ``tau -> 1``,
    every entry here stays of order ``V`` because the cloner only enters
    through ``(1 - tau) omega = 1 - tau + tau xi``.
    """
    nu = np.sqrt(s_q * s_p)
    r = (s_q / s_p) ** 0.25
    c = np.sqrt(tau * max(nu * nu - 1.0, 0.0))
    cross = c * np.diag([r, -1.0 / r])
    bob = tau * np.diag([s_q, s_p]) + (1.0 - tau + tau * xi) * I2
    return np.block([[nu * I2, cross], [cross.T, bob]])


def _after_noisy_measurement(cm_pb: np.ndarray, extra: float, detection: Detection) -> np.ndarray:
    """State of (P, M) once Bob measures B through added noise ``extra``.

    The noise is a beamsplitter of transmissivity ``1 / (1 + extra)`` mixing
    B with vacuum N ahead of an ideal detector; M is the unused output, which
    stays with the trusted side so the global state remains pure.
    """
    full = np.zeros((6, 6))
    full[:4, :4] = cm_pb
    full[4:, 4:] = I2
    t = 1.0 / (1.0 + extra)
    bs = np.eye(6)
    bs[2:, 2:] = np.block([[np.sqrt(t) * I2, np.sqrt(1.0 - t) * I2],
                           [-np.sqrt(1.0 - t) * I2, np.sqrt(t) * I2]])
    out = bs @ full @ bs.T
    keep = [0, 1, 4, 5]
    rest = out[np.ix_(keep, keep)]
    if detection is Detection.HOMODYNE:
        cq = out[keep, 2:3]
        return rest - cq @ cq.T / out[2, 2]
    c = out[keep, 2:4]
    return rest - c @ np.linalg.solve(out[2:4, 2:4] + I2, c.T)


def holevo_bound(cfg: ProtocolConfig, ch: ChannelParams) -> HolevoResult:
    """Eve's entropy before and after conditioning on the reference party's data.

    Evaluated on the trusted side of the purification (see
    :func:`trusted_side_cm`); :func:`eve_total_cm` and the conditional
    helpers give the same numbers directly but lose precision as
    ``tau -> 1``.
    """
    ch.omega  # validates (tau, xi)
    V = ch.V
    total = trusted_side_cm(ch.tau, ch.xi, V + 1.0, V + 1.0)
    if cfg.direction is Direction.DR:
        s_p = V + 1.0 if cfg.detection is Detection.HOMODYNE else 1.0
        cond = trusted_side_cm(ch.tau, ch.xi, 1.0, s_p)
    else:
        extra = (1.0 - cfg.eta_d + cfg.u_el) / cfg.eta_d if cfg.trusted_detector else 0.0
        cond = _after_noisy_measurement(total, extra, cfg.detection)
    return HolevoResult(S_E=gaussian_entropy(total), S_E_cond=gaussian_entropy(cond))
