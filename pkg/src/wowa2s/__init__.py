"""Two-stage decision making under the weighted-OWA criterion."""

from .aggregation import (
    WeightVector,
    Interpolant,
    RankedWeights,
    WeightError,
    exponential_owa_weights,
    owa,
    ranked_weights,
    wowa,
    wowa_bruteforce,
)

__all__ = [
    "WeightVector",
    "Interpolant",
    "RankedWeights",
    "WeightError",
    "exponential_owa_weights",
    "owa",
    "ranked_weights",
    "wowa",
    "wowa_bruteforce",
]

__version__ = "0.1.0"
