"""privshare: optimal disclosure strategies for selling personal-profile data.

Given an actual interest profile, a decoy profile, and per-category
rates, the package computes how much of each category to disclose so a
target payment is reached at the least possible privacy risk, for three
separable risk measures (squared distance, KL divergence, Itakura-Saito).
"""

from .curve import TradeoffCurve, check_convex, check_monotone, sweep
from .dispatch import risk_ratio, solve_auto, solve_request
from .errors import (
    InputError,
    NoConvergence,
    OfferExceedsMax,
    OfferOutOfRange,
    PrivshareError,
)
from .model import (
    Instance,
    absorb_zero_difference,
    apparent_profile,
    mu_max,
    validate_instance,
)
from .oracle import OracleResult, brute_force, certify
from .privacy import KINDS, get_kind, risk
from .solver import DualPoint, Solution, kkt_check, solve

__version__ = "0.1.0"

__all__ = [
    "DualPoint",
    "InputError",
    "Instance",
    "KINDS",
    "NoConvergence",
    "OfferExceedsMax",
    "OfferOutOfRange",
    "OracleResult",
    "PrivshareError",
    "Solution",
    "TradeoffCurve",
    "absorb_zero_difference",
    "apparent_profile",
    "brute_force",
    "certify",
    "check_convex",
    "check_monotone",
    "get_kind",
    "kkt_check",
    "mu_max",
    "risk",
    "risk_ratio",
    "solve",
    "solve_auto",
    "solve_request",
    "sweep",
    "validate_instance",
    "__version__",
]
