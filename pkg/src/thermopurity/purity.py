"""Purity of the one-particle reduced state and its limiting forms.

Everything here is dimensionless: ``beta`` stands for ``hbar*omega*beta``.
"""

from __future__ import annotations

import math
import warnings
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateAngleWarning,
    DegenerateKernel,
    NonPositiveBeta,
    OutOfRange,
    UnstablePotential,
)
from .thermal import WavefunctionCoeffs

__all__ = [
    "PurityPoint",
    "purity_closed",
    "purity_from_coeffs",
    "purity_low_t",
    "purity_high_t",
    "purity_identical",
    "linear_entropy",
]

# tanh(50) == 1.0 in double precision.
TANH_CLAMP = 50.0
_DEGENERATE_SIN = 1e-12


class PurityPoint(NamedTuple):
    eta: float
    theta: float
    beta: float
    value: float


def _tanh(arg):
    return np.tanh(np.clip(arg, 0.0, TANH_CLAMP))


def purity_closed(eta, theta, beta):
    """Purity at coupling ``eta``, mixing angle ``theta`` and inverse temperature
    ``beta``. Broadcasts over array arguments."""
    eta = np.asarray(eta, dtype=float)
    theta = np.asarray(theta, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(~(beta > 0)):
        raise NonPositiveBeta(f"beta must be > 0, got {beta!r}")
    ep, em = np.exp(eta), np.exp(-eta)
    t_plus = _tanh(beta * ep)
    t_minus = _tanh(beta * em)
    sin2 = np.sin(theta / 2.0) ** 2
    cos2 = np.cos(theta / 2.0) ** 2
    denominator = (ep * t_plus * sin2 + em * t_minus * cos2) * (
        ep * t_plus * cos2 + em * t_minus * sin2
    )
    value = np.sqrt(t_plus * t_minus / denominator)
    # exact value never exceeds 1; trims the last-ulp overshoot at eta = 0
    return np.minimum(value, 1.0)[()]


def purity_from_coeffs(wc: WavefunctionCoeffs) -> float:
    alpha, beta_t, gamma = (float(v) for v in wc[:3])
    det = alpha * beta_t - gamma**2
    if not (alpha > 0 and beta_t > 0 and det > 0):
        raise DegenerateKernel(
            f"need alpha > 0, beta > 0, alpha*beta - gamma**2 > 0; got {alpha}, {beta_t}, {det}"
        )
    return math.sqrt(det / (alpha * beta_t))


def purity_low_t(eta: float, theta: float) -> float:
    """Ground-state (beta -> infinity) purity.

    At theta in {0, pi, 2*pi} tan/cot diverge; the limit 1 is returned and a
    :class:`DegenerateAngleWarning` is emitted.
    """
    half = theta / 2.0
    sc = abs(math.sin(half) * math.cos(half))
    if sc < _DEGENERATE_SIN:
        warnings.warn(
            f"theta={theta!r} is a degenerate mixing angle; returning the limit 1",
            DegenerateAngleWarning,
            stacklevel=2,
        )
        return 1.0
    tan2 = math.tan(half) ** 2
    return 1.0 / (sc * math.sqrt(2.0 * math.cosh(2.0 * eta) + tan2 + 1.0 / tan2))


def purity_high_t(eta, theta):
    """High-temperature (beta -> eps/2) purity."""
    eta = np.asarray(eta, dtype=float)
    theta = np.asarray(theta, dtype=float)
    sin2 = np.sin(theta / 2.0) ** 2
    cos2 = np.cos(theta / 2.0) ** 2
    e2p, e2m = np.exp(2.0 * eta), np.exp(-2.0 * eta)
    value = np.sqrt(1.0 / ((e2p * sin2 + e2m * cos2) * (e2p * cos2 + e2m * sin2)))
    return np.minimum(value, 1.0)[()]


def purity_identical(c1: float, c3: float, m1: float, hbar: float, beta):
    """Purity for equal masses and equal spring constants C1 = C2 = c1."""
    if not c1 > 0 or abs(c3) >= 2.0 * c1:
        raise UnstablePotential(f"need c1 > 0 and |c3| < 2*c1, got c1={c1}, c3={c3}")
    beta = np.asarray(beta, dtype=float)
    if np.any(~(beta > 0)):
        raise NonPositiveBeta(f"beta must be > 0, got {beta!r}")
    stiff = c1 + c3 / 2.0
    soft = c1 - c3 / 2.0
    t_stiff = _tanh(hbar * math.sqrt(stiff / m1) * beta)
    t_soft = _tanh(hbar * math.sqrt(soft / m1) * beta)
    value = (
        2.0
        * np.sqrt(t_stiff * t_soft)
        / ((stiff / soft) ** 0.25 * t_stiff + (soft / stiff) ** 0.25 * t_soft)
    )
    return np.minimum(value, 1.0)[()]


def linear_entropy(p: float, d: int) -> float:
    """Linear entropy ``d/(d-1) * (1 - p)`` of a state with purity ``p``."""
    if d < 2:
        raise OutOfRange(f"dimension must be >= 2, got {d}")
    if not 1.0 / d <= p <= 1.0:
        raise OutOfRange(f"purity {p} outside [1/{d}, 1]")
    return d / (d - 1) * (1.0 - p)
