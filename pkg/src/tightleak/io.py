"""JSON run configuration and CSV/JSON emission of rate records.

Config keys (all optional, defaults are the common operating point):

    detection  "hom" | "het"          direction  "dr" | "rr"
    d          bits per quadrature    p_ec       EC success probability
    eps_s, eps_h, eps_cor, eps_pe     failure probabilities
    eta_d, u_el                       trusted detector efficiency / noise
    xi         excess noise (SNU)     loss_db    channel loss
    V          modulation variance (absent: optimized)
    N          total signals          n_ratio    kept fraction n/N (absent: optimized)
    alpha      digitization cutoff    trusted_detector  RR conditioning model
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from tightleak.keyrate import RatePoint
from tightleak.protocol import EPS_DEFAULT, ProtocolConfig

__all__ = [
    "ConfigError",
    "RunConfig",
    "DEFAULTS",
    "load_config",
    "config_from_dict",
    "CSV_COLUMNS",
    "write_csv",
    "read_csv",
    "write_json",
    "read_json",
]

DEFAULTS = {
    "detection": "hom",
    "direction": "dr",
    "d": 4,
    "eps_s": EPS_DEFAULT,
    "eps_h": EPS_DEFAULT,
    "eps_cor": EPS_DEFAULT,
    "eps_pe": EPS_DEFAULT,
    "p_ec": 0.9,
    "eta_d": 0.8,
    "u_el": 0.01,
    "xi": 0.01,
    "loss_db": 0.02,
    "V": None,
    "N": 200_000,
    "n_ratio": None,
    "alpha": 5.0,
    "trusted_detector": True,
}

_PROTOCOL_KEYS = (
    "detection", "direction", "d", "eps_s", "eps_h", "eps_cor", "eps_pe",
    "p_ec", "eta_d", "u_el", "alpha", "trusted_detector",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    xi: float = 0.01
    loss_db: float = 0.02
    V: float | None = None
    N: int = 200_000
    n_ratio: float | None = None


def config_from_dict(raw: dict) -> RunConfig:
    unknown = sorted(set(raw) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    merged = {**DEFAULTS, **raw}
    try:
        proto = ProtocolConfig(**{k: merged[k] for k in _PROTOCOL_KEYS})
        N = int(merged["N"])
        if N != merged["N"] or N < 3:
            raise ValueError(f"N must be an integer >= 3, got {merged['N']!r}")
        xi = float(merged["xi"])
        loss_db = float(merged["loss_db"])
        if xi < 0 or loss_db < 0:
            raise ValueError("xi and loss_db must be non-negative")
        V = merged["V"]
        if V is not None and not float(V) > 0:
            raise ValueError(f"V must be positive, got {V!r}")
        ratio = merged["n_ratio"]
        if ratio is not None and not 0.0 < float(ratio) < 1.0:
            raise ValueError(f"n_ratio must lie in (0, 1), got {ratio!r}")
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(
        protocol=proto,
        xi=xi,
        loss_db=loss_db,
        V=None if V is None else float(V),
        N=N,
        n_ratio=None if ratio is None else float(ratio),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return config_from_dict(raw)


# Documented order first; remaining record fields follow so that a CSV
# round-trip restores complete records.
CSV_COLUMNS = (
    "R", "r_n", "V", "n", "zeta", "zeta_digit", "zeta_leak", "snr",
    "leak_bits", "R_code_star", "m_sparse_star_bits",
)
_EXTRA = ("loss_db", "N", "R_infty_pe_ec", "chi", "tau_wc", "xi_wc", "feasible")
_INT_FIELDS = {"n", "N"}


def _columns(axis: str) -> list[str]:
    if axis not in ("loss_db", "N"):
        raise ValueError(f"unknown axis {axis!r}")
    extra = [c for c in _EXTRA if c != axis]
    return [axis, *CSV_COLUMNS, *extra]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def write_csv(points, path, axis: str) -> None:
    cols = _columns(axis)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(cols)
        for p in points:
            rec = p.as_dict()
            writer.writerow([_fmt(rec[c]) for c in cols])


def _parse(name: str, text: str):
    if name == "feasible":
        return text == "1"
    if name in _INT_FIELDS:
        return int(text)
    return float(text)


def read_csv(path) -> list[RatePoint]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [RatePoint(**{k: _parse(k, v) for k, v in row.items()}) for row in rows]


def _json_safe(rec: dict) -> dict:
    return {
        k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in rec.items()
    }


def write_json(points, path) -> None:
    payload = [_json_safe(p.as_dict()) for p in points]
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def read_json(path) -> list[RatePoint]:
    recs = json.loads(Path(path).read_text())
    return [RatePoint(**{k: (math.nan if v is None else v) for k, v in r.items()}) for r in recs]
