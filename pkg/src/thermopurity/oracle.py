"""Grid-based numerical checks of the closed forms.

Nothing here reuses the hand-derived purity or propagator coefficients:

* :func:`purity_quadrature` samples the wavefunction and does the partial
  trace and the purity trace with the trapezoid rule;
* :func:`imaginary_time_evolve` propagates the initial wavefunction with a
  Strang split-step scheme built from the Hamiltonian alone;
* :func:`schrodinger_residual` plugs the wavefunction into the imaginary-time
  Schroedinger equation with finite differences;
* :func:`path_integral_kernel` builds the density matrix from 2**n Trotter
  slices by exact Gaussian composition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import model, quadform, thermal
from .errors import NonMonotoneBeta, NonPositiveBeta, UnderResolvedGrid
from .model import DecoupledParams
from .quadform import QuadKernel

__all__ = [
    "Grid2D",
    "Field2D",
    "QuadratureResult",
    "thermal_width",
    "narrow_width",
    "purity_quadrature",
    "imaginary_time_evolve",
    "schrodinger_residual",
    "path_integral_kernel",
]

DEFAULT_BETA_START = 0.5 * thermal.DEFAULT_EPSILON
# Minimum nodes per narrowest Gaussian width. Trapezoid error on a Gaussian of
# width w and spacing h is ~exp(-2 pi^2 (w/h)^2), below 1e-30 at w/h = 2.
MIN_POINTS_PER_WIDTH = 2.0
DEFAULT_FD_STEP = 1e-6


@dataclass(frozen=True)
class Grid2D:
    """Square grid of ``n`` nodes per axis spanning ``+-half_extent`` thermal widths."""

    half_extent: float = 8.0
    n: int = 257

    def __post_init__(self):
        if self.n < 65 or self.n % 2 == 0:
            raise ValueError(f"n must be odd and >= 65, got {self.n}")
        if not self.half_extent > 0:
            raise ValueError("half_extent must be > 0")

    def spacing(self, scale: float = 1.0) -> float:
        return 2.0 * self.half_extent * scale / (self.n - 1)

    def axis(self, scale: float = 1.0) -> np.ndarray:
        return np.linspace(-self.half_extent * scale, self.half_extent * scale, self.n)


@dataclass(frozen=True)
class Field2D:
    grid: Grid2D
    axis: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise FloatingPointError("field has non-finite samples")

    def normalized(self) -> np.ndarray:
        """Values scaled to unit discrete L2 norm."""
        h = self.axis[1] - self.axis[0]
        return self.values / math.sqrt(np.sum(self.values**2) * h * h)


class QuadratureResult(NamedTuple):
    value: float
    error: float
    trace: float


def _mode_width(dp: DecoupledParams, beta: float, sign: int) -> float:
    e = math.exp(sign * abs(dp.eta))
    return math.sqrt(dp.hbar / (dp.m * dp.omega * e * math.tanh(dp.hbar * dp.omega * beta * e)))


def thermal_width(dp: DecoupledParams, beta: float) -> float:
    """Width of the widest mode in x coordinates; sets the grid extent."""
    return _mode_width(dp, beta, -1) * max(dp.mu, 1.0 / dp.mu)


def narrow_width(dp: DecoupledParams, beta: float) -> float:
    return _mode_width(dp, beta, +1) * min(dp.mu, 1.0 / dp.mu)


def _axis(dp, beta, grid):
    scale = thermal_width(dp, beta)
    h = grid.spacing(scale)
    if narrow_width(dp, beta) / h < MIN_POINTS_PER_WIDTH:
        raise UnderResolvedGrid(
            f"spacing {h:.3g} resolves the narrowest width {narrow_width(dp, beta):.3g} "
            f"with fewer than {MIN_POINTS_PER_WIDTH} points"
        )
    return grid.axis(scale)


def _trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = h / 2.0
    return w


def _sampled_purity(psi: np.ndarray, weights: np.ndarray) -> tuple[float, float]:
    # rho(x, x') = int psi(x, y) psi(x', y) dy, normalised by int int psi^2
    rho = (psi * weights[None, :]) @ psi.T
    norm = weights @ np.diag(rho)
    rho = rho / norm
    trace = float(weights @ np.diag(rho))
    value = float(weights @ (rho * rho.T) @ weights)
    return value, trace


def purity_quadrature(dp: DecoupledParams, beta: float, grid: Grid2D = Grid2D()) -> QuadratureResult:
    """Purity from the sampled wavefunction by trapezoid quadrature.

    ``error`` is the change against the same computation on every second
    node; ``trace`` is the trapezoid trace of the normalised reduced density.
    """
    if not beta > 0:
        raise NonPositiveBeta(f"beta must be > 0, got {beta!r}")
    x = _axis(dp, beta, grid)
    x1, x2 = np.meshgrid(x, x, indexing="ij")
    log_psi = thermal.log_wavefunction(dp, beta, x1, x2)
    psi = np.exp(log_psi - log_psi.max())
    h = x[1] - x[0]
    value, trace = _sampled_purity(psi, _trapezoid_weights(len(x), h))
    coarse, _ = _sampled_purity(psi[::2, ::2], _trapezoid_weights(len(x[::2]), 2 * h))
    return QuadratureResult(value, abs(value - coarse), trace)


def imaginary_time_evolve(
    dp: DecoupledParams,
    grid: Grid2D,
    beta_start: float = DEFAULT_BETA_START,
    beta_end: float = 1.0,
    steps: int = 1000,
) -> Field2D:
    """Propagate the initial wavefunction from ``beta_start`` to ``beta_end``.

    Strang splitting of ``exp(-dbeta (H - E0))`` with the kinetic factor applied
    exactly in Fourier space. The grid is sized at ``beta_end``.
    """
    if steps < 100:
        raise ValueError(f"steps must be >= 100, got {steps}")
    if not beta_start > 0:
        raise NonPositiveBeta(f"beta_start must be > 0, got {beta_start!r}")
    if not beta_end > beta_start:
        raise NonMonotoneBeta(f"need beta_end > beta_start, got {beta_start} -> {beta_end}")
    x = _axis(dp, beta_end, grid)
    h = x[1] - x[0]
    x1, x2 = np.meshgrid(x, x, indexing="ij")
    params = model.to_oscillator_params(dp)
    dbeta = (beta_end - beta_start) / steps

    half_potential = np.exp(-0.5 * dbeta * (model.potential(params, x1, x2) - dp.e0))
    k1 = 2.0 * np.pi * np.fft.fftfreq(grid.n, d=h)
    k2 = 2.0 * np.pi * np.fft.rfftfreq(grid.n, d=h)
    kinetic = np.exp(
        -dbeta
        * dp.hbar**2
        * (k1[:, None] ** 2 / (2.0 * dp.m1) + k2[None, :] ** 2 / (2.0 * dp.m2))
    )
    shape = (grid.n, grid.n)

    psi = thermal.initial_wavefunction(dp, x1, x2, epsilon=2.0 * beta_start)
    psi = psi * half_potential
    for step in range(steps):
        psi = np.fft.irfft2(np.fft.rfft2(psi) * kinetic, s=shape)
        psi *= half_potential
        if step < steps - 1:
            psi *= half_potential
    return Field2D(grid, x, psi)


def schrodinger_residual(
    dp: DecoupledParams,
    beta: float,
    grid: Grid2D = Grid2D(),
    step: float | None = None,
    dbeta: float = 1e-4,
    extent: float = 2.0,
) -> float:
    """Max of ``|(H - E0) psi + d psi / d beta| / |psi|`` over the grid nodes
    within ``extent`` thermal widths.

    Second-order central differences in x1, x2 with step ``step`` (in thermal
    widths; ``None`` means 1e-6) and a five-point stencil in beta. Samples are
    formed as ratios psi(x + dx)/psi(x) in extended precision so the small
    spatial step does not drown in rounding error.
    """
    if not beta > 0.1:
        raise ValueError(f"beta must exceed 0.1 for the beta stencil, got {beta}")
    width = thermal_width(dp, beta)
    x = _axis(dp, beta, grid)
    inner = x[np.abs(x) <= extent * width + 1e-12 * width]
    x1, x2 = (v.astype(np.longdouble) for v in np.meshgrid(inner, inner, indexing="ij"))
    h = np.longdouble((DEFAULT_FD_STEP if step is None else step) * width)

    def ratio(a1, a2, b=beta):
        return np.exp(thermal.log_wavefunction(dp, b, a1, a2) - log_center)

    log_center = thermal.log_wavefunction(dp, beta, x1, x2)
    d2_1 = (ratio(x1 + h, x2) - 2 + ratio(x1 - h, x2)) / h**2
    d2_2 = (ratio(x1, x2 + h) - 2 + ratio(x1, x2 - h)) / h**2
    kinetic = -(dp.hbar**2) / 2.0 * (d2_1 / dp.m1 + d2_2 / dp.m2)
    potential = model.potential(model.to_oscillator_params(dp), inner[:, None], inner[None, :])
    d_beta = (
        -ratio(x1, x2, beta + 2 * dbeta)
        + 8 * ratio(x1, x2, beta + dbeta)
        - 8 * ratio(x1, x2, beta - dbeta)
        + ratio(x1, x2, beta - 2 * dbeta)
    ) / (12 * dbeta)
    residual = kinetic + (potential - dp.e0) + d_beta
    return float(np.max(np.abs(residual)))


def _trotter_slice(dp: DecoupledParams, tau: float) -> QuadKernel:
    """Symmetric Trotter factor e^{-tau V/2} e^{-tau T} e^{-tau V/2} e^{tau E0}
    over (x1b, x2b, x1a, x2a)."""
    params = model.to_oscillator_params(dp)
    half_v = 0.25 * tau * params.stiffness_matrix  # tau/2 * x.K.x/2
    free = np.diag([dp.m1, dp.m2]) / (2.0 * dp.hbar**2 * tau)
    quad = np.block([[free + half_v, -free], [-free, free + half_v]])
    log_pref = math.log(math.sqrt(dp.m1 * dp.m2) / (2.0 * math.pi * dp.hbar**2 * tau)) + tau * dp.e0
    return QuadKernel(log_pref, quad)


def path_integral_kernel(dp: DecoupledParams, beta: float, doublings: int = 12) -> QuadKernel:
    """Density matrix over (x1b, x2b, x1a, x2a) from ``2**doublings`` Trotter slices."""
    if not beta > 0:
        raise NonPositiveBeta(f"beta must be > 0, got {beta!r}")
    kernel = _trotter_slice(dp, beta / 2**doublings)
    for _ in range(doublings):
        kernel = quadform.compose(kernel, kernel)
    return kernel
