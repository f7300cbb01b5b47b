"""Finite-temperature purity of two coupled harmonic oscillators."""

__version__ = "0.1.0"

from .model import DecoupledParams, OscillatorParams, derive_decoupled, from_decoupled
from .purity import (
    linear_entropy,
    purity_closed,
    purity_from_coeffs,
    purity_high_t,
    purity_identical,
    purity_low_t,
)

__all__ = [
    "__version__",
    "OscillatorParams",
    "DecoupledParams",
    "derive_decoupled",
    "from_decoupled",
    "purity_closed",
    "purity_from_coeffs",
    "purity_low_t",
    "purity_high_t",
    "purity_identical",
    "linear_entropy",
]
