"""Finite-size CV-QKD key rates with a tight non-binary EC leakage bound,
and the LDPC code rates and encoder storage that go with them."""

from tightleak.digitizer import DigitizationGrid, DiscreteStats, build_grid, conditional_stats
from tightleak.holevo import HolevoResult, holevo_bound
from tightleak.keyrate import RatePoint, finite_rate, optimize, sweep
from tightleak.leakage import LeakageBudget, optimal_syndrome_rate, tight_leakage_bits
from tightleak.ldpc.code import LdpcCode, generate_regular_ldpc, syndrome
from tightleak.protocol import ChannelParams, Detection, Direction, ProtocolConfig

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "Detection",
    "DigitizationGrid",
    "Direction",
    "DiscreteStats",
    "HolevoResult",
    "LdpcCode",
    "LeakageBudget",
    "ProtocolConfig",
    "RatePoint",
    "build_grid",
    "conditional_stats",
    "finite_rate",
    "generate_regular_ldpc",
    "holevo_bound",
    "optimal_syndrome_rate",
    "optimize",
    "sweep",
    "syndrome",
    "tight_leakage_bits",
]
