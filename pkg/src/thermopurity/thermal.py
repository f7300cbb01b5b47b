"""Closed-form thermal objects of the coupled oscillators.

All functions take a :class:`~thermopurity.model.DecoupledParams` and a
physical inverse temperature ``beta``; with :func:`~thermopurity.model.from_decoupled`
(hbar = m = omega = 1) ``beta`` is the dimensionless ``hbar*omega*beta``.
Prefactors are assembled in log space, so ``exp(+beta*E0)`` never overflows
before it meets the matching ``1/sinh`` or ``1/cosh`` factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import quadform
from .errors import NonPositiveBeta
from .model import DecoupledParams, OscillatorParams, derive_decoupled, potential
from .quadform import QuadKernel

__all__ = [
    "PropagatorCoeffs",
    "DiagonalCoeffs",
    "WavefunctionCoeffs",
    "DEFAULT_EPSILON",
    "propagator_coeffs",
    "diagonal_coeffs",
    "wavefunction_coeffs",
    "density_matrix_kernel",
    "density_matrix",
    "diagonal_kernel",
    "probability_density",
    "classical_density",
    "ground_state",
    "wavefunction_kernel",
    "log_wavefunction",
    "wavefunction",
    "initial_wavefunction",
    "reduced_density_kernel",
    "reduced_density",
]

# High-temperature regulariser: the initial wavefunction lives at beta = eps/2.
DEFAULT_EPSILON = 1e-3

_ASYMPTOTIC = 30.0
_LOG2 = math.log(2.0)


def _check_beta(beta):
    beta = np.asarray(beta, dtype=float)
    if np.any(~(beta > 0)):
        raise NonPositiveBeta(f"beta must be > 0, got {beta!r}")
    return beta


def _coth(u):
    return 1.0 / np.tanh(u)


def _csch(u):
    u = np.asarray(u, dtype=float)
    big = u > _ASYMPTOTIC
    safe = np.where(big, 1.0, u)
    return np.where(big, 2.0 * np.exp(-u), 1.0 / np.sinh(safe))


def _log_sinh(u):
    u = np.asarray(u, dtype=float)
    big = u > _ASYMPTOTIC
    safe = np.where(big, 1.0, u)
    return np.where(big, u - _LOG2 + np.log1p(-np.exp(-2.0 * u)), np.log(np.sinh(safe)))


def _log_cosh(u):
    u = np.abs(np.asarray(u, dtype=float))
    return u - _LOG2 + np.log1p(np.exp(-2.0 * u))


def _mode_arguments(dp: DecoupledParams, beta):
    u = dp.hbar * dp.omega * beta
    return u * math.exp(dp.eta), u * math.exp(-dp.eta)


def _mixing(dp: DecoupledParams):
    half = dp.theta / 2.0
    return math.cos(half) ** 2, math.sin(half) ** 2, math.cos(half) * math.sin(half)


class PropagatorCoeffs(NamedTuple):
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    f: np.ndarray
    g: np.ndarray


class DiagonalCoeffs(NamedTuple):
    a_tilde: np.ndarray
    b_tilde: np.ndarray
    c_tilde: np.ndarray
    log_norm: np.ndarray


class WavefunctionCoeffs(NamedTuple):
    alpha_tilde: np.ndarray
    beta_tilde: np.ndarray
    gamma_tilde: np.ndarray
    log_norm: np.ndarray


def _combine(dp: DecoupledParams, plus, minus, scale):
    """Map per-mode coefficients (X1, X2) to the (x1**2, x2**2, x1*x2) entries."""
    cos2, sin2, cs = _mixing(dp)
    ep, em = math.exp(dp.eta), math.exp(-dp.eta)
    first = dp.mu**2 * scale * (ep * plus * cos2 + em * minus * sin2)
    second = scale / dp.mu**2 * (ep * plus * sin2 + em * minus * cos2)
    cross = scale * (ep * plus - em * minus) * cs
    return first, second, cross


def propagator_coeffs(dp: DecoupledParams, beta) -> PropagatorCoeffs:
    beta = _check_beta(beta)
    up, um = _mode_arguments(dp, beta)
    scale = dp.m * dp.omega / (2.0 * dp.hbar)
    a, b, c = _combine(dp, _coth(up), _coth(um), scale)
    d, f, g = _combine(dp, _csch(up), _csch(um), scale)
    return PropagatorCoeffs(a, b, c, d, f, g)


def diagonal_coeffs(dp: DecoupledParams, beta) -> DiagonalCoeffs:
    """Exponent of the diagonal density, evaluated with tanh(u/2) directly."""
    beta = _check_beta(beta)
    up, um = _mode_arguments(dp, beta)
    scale = dp.m * dp.omega / dp.hbar
    a_t, b_t, c_t = _combine(dp, np.tanh(up / 2.0), np.tanh(um / 2.0), scale)
    log_norm = (
        math.log(dp.m * dp.omega / (2.0 * math.pi * dp.hbar))
        + beta * dp.e0
        - 0.5 * (_log_sinh(up) + _log_sinh(um))
    )
    return DiagonalCoeffs(a_t, b_t, c_t, log_norm)


def wavefunction_coeffs(dp: DecoupledParams, beta) -> WavefunctionCoeffs:
    beta = _check_beta(beta)
    up, um = _mode_arguments(dp, beta)
    scale = dp.m * dp.omega / (2.0 * dp.hbar)
    alpha, beta_t, gamma = _combine(dp, np.tanh(up), np.tanh(um), scale)
    log_norm = (
        0.5 * math.log(dp.m * dp.omega / (4.0 * math.pi * dp.hbar))
        - 0.5 * (_log_cosh(up) + _log_cosh(um))
        + beta * dp.hbar * dp.omega * math.cosh(dp.eta)
    )
    return WavefunctionCoeffs(alpha, beta_t, gamma, log_norm)


def density_matrix_kernel(dp: DecoupledParams, beta: float) -> QuadKernel:
    """rho(b, a; beta) as a kernel over (x1b, x2b, x1a, x2a)."""
    a, b, c, d, f, g = (float(v) for v in propagator_coeffs(dp, beta))
    up, um = _mode_arguments(dp, float(beta))
    log_pref = (
        math.log(dp.m * dp.omega / (2.0 * math.pi * dp.hbar))
        + beta * dp.e0
        - 0.5 * float(_log_sinh(up) + _log_sinh(um))
    )
    quad = np.array(
        [
            [a, -c, -d, g],
            [-c, b, g, -f],
            [-d, g, a, -c],
            [g, -f, -c, b],
        ]
    )
    return QuadKernel(log_pref, quad)


def density_matrix(dp: DecoupledParams, beta: float, xb, xa):
    """Element rho(x1b, x2b, x1a, x2a; beta); ``xb`` and ``xa`` are point pairs
    whose components may be arrays."""
    kernel = density_matrix_kernel(dp, beta)
    x1b, x2b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in xb))
    x1a, x2a = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in xa))
    points = np.stack(np.broadcast_arrays(x1b, x2b, x1a, x2a), axis=-1)
    return kernel(points)


def diagonal_kernel(dp: DecoupledParams, beta: float) -> QuadKernel:
    a_t, b_t, c_t, log_norm = (float(v) for v in diagonal_coeffs(dp, beta))
    return QuadKernel(log_norm, [[a_t, -c_t], [-c_t, b_t]])


def probability_density(dp: DecoupledParams, beta: float, x1, x2, normalized: bool = False):
    """Diagonal density P_beta(x1, x2).

    With ``normalized=False`` the value carries the ``exp(+beta*E0)`` factor and
    does not integrate to one; ``normalized=True`` divides by its integral.
    """
    kernel = diagonal_kernel(dp, beta)
    log_p = kernel.log_value(np.stack(np.broadcast_arrays(x1, x2), axis=-1))
    if normalized:
        log_p = log_p - quadform.log_integrate_all(kernel)
    return np.exp(log_p)


def classical_density(params: OscillatorParams, beta0: float, x1, x2):
    """High-temperature Boltzmann form ``m e^{beta0 E0} / (2 pi hbar^2 beta0) e^{-beta0 V}``."""
    beta0 = float(_check_beta(beta0))
    dp = derive_decoupled(params)
    log_pref = math.log(dp.m / (2.0 * math.pi * params.hbar**2 * beta0)) + beta0 * dp.e0
    return np.exp(log_pref - beta0 * potential(params, x1, x2))


def ground_state(dp: DecoupledParams, x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    c = math.cos(dp.theta / 2.0)
    s = math.sin(dp.theta / 2.0)
    stiff = dp.mu * c * x1 - s * x2 / dp.mu
    soft = dp.mu * s * x1 + c * x2 / dp.mu
    scale = dp.m * dp.omega / (2.0 * dp.hbar)
    exponent = -scale * math.exp(dp.eta) * stiff**2 - scale * math.exp(-dp.eta) * soft**2
    return math.sqrt(dp.m * dp.omega / (dp.hbar * math.pi)) * np.exp(exponent)


def wavefunction_kernel(dp: DecoupledParams, beta: float) -> QuadKernel:
    alpha, beta_t, gamma, log_norm = (float(v) for v in wavefunction_coeffs(dp, beta))
    return QuadKernel(log_norm, [[alpha, -gamma], [-gamma, beta_t]])


def log_wavefunction(dp: DecoupledParams, beta: float, x1, x2):
    kernel = wavefunction_kernel(dp, beta)
    return kernel.log_value(np.stack(np.broadcast_arrays(x1, x2), axis=-1))


def wavefunction(dp: DecoupledParams, beta: float, x1, x2):
    """Temperature-dependent wavefunction psi(x1, x2; beta) (not normalised)."""
    return np.exp(log_wavefunction(dp, beta, x1, x2))


def initial_wavefunction(dp: DecoupledParams, x1, x2, epsilon: float = DEFAULT_EPSILON):
    """Non-normalised starting wavefunction at beta = epsilon/2."""
    a_t, b_t, c_t, _ = (float(v) for v in diagonal_coeffs(dp, epsilon))
    up, um = _mode_arguments(dp, epsilon / 2.0)
    log_pref = 0.5 * math.log(dp.m * dp.omega / (4.0 * math.pi * dp.hbar)) - 0.5 * float(
        _log_cosh(up) + _log_cosh(um)
    )
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return np.exp(log_pref - 0.5 * a_t * x1**2 - 0.5 * b_t * x2**2 + c_t * x1 * x2)


def reduced_density_kernel(dp: DecoupledParams, beta: float) -> QuadKernel:
    """One-particle reduced density rho_red(x1, x1') with unit trace."""
    alpha, beta_t, gamma, _ = (float(v) for v in wavefunction_coeffs(dp, beta))
    det = alpha * beta_t - gamma**2
    diag = (2.0 * alpha * beta_t - gamma**2) / (2.0 * beta_t)
    cross = gamma**2 / beta_t
    log_norm = 0.5 * math.log(2.0 * det / (math.pi * beta_t))
    return QuadKernel(log_norm, [[diag, -cross / 2.0], [-cross / 2.0, diag]])


def reduced_density(dp: DecoupledParams, beta: float, x1, x1p):
    kernel = reduced_density_kernel(dp, beta)
    return kernel(np.stack(np.broadcast_arrays(x1, x1p), axis=-1))
