"""Physical inputs of two coupled oscillators and their normal-mode picture.

The Hamiltonian is

    H = p1**2/(2 m1) + p2**2/(2 m2) + C1 x1**2/2 + C2 x2**2/2 + C3 x1 x2/2

and the rotation-plus-scaling

    x1 = ( cos(theta/2) X1 + sin(theta/2) X2) / mu
    x2 = (-sin(theta/2) X1 + cos(theta/2) X2) * mu

maps it to two independent modes of mass ``m`` and stiffness ``k*exp(+-2*eta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveParameter, UnstablePotential

__all__ = [
    "OscillatorParams",
    "DecoupledParams",
    "validate",
    "mode_exponentials",
    "derive_decoupled",
    "from_decoupled",
    "to_oscillator_params",
    "transform_matrix",
    "potential",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class OscillatorParams:
    m1: float
    m2: float
    C1: float
    C2: float
    C3: float
    hbar: float = 1.0

    @property
    def stiffness_matrix(self) -> np.ndarray:
        """Symmetric K with V(x) = x.K.x / 2."""
        return np.array([[self.C1, self.C3 / 2.0], [self.C3 / 2.0, self.C2]])


@dataclass(frozen=True)
class DecoupledParams:
    """Normal-mode parameters.

    ``omega * exp(eta)`` and ``omega * exp(-eta)`` are the two mode
    frequencies; ``e0 = hbar * omega * cosh(eta)`` is the ground-state energy.
    """

    mu: float
    theta: float
    eta: float
    k: float
    m: float
    omega: float
    e0: float
    hbar: float = 1.0

    @property
    def m1(self) -> float:
        return self.m * self.mu**2

    @property
    def m2(self) -> float:
        return self.m / self.mu**2

    @property
    def omega_plus(self) -> float:
        return self.omega * math.exp(self.eta)

    @property
    def omega_minus(self) -> float:
        return self.omega * math.exp(-self.eta)


def validate(params: OscillatorParams) -> None:
    for name in ("m1", "m2", "C1", "C2", "hbar"):
        value = getattr(params, name)
        if not value > 0:
            raise NonPositiveParameter(f"{name} must be > 0, got {value!r}")
    if not params.C1 * params.C2 - params.C3**2 / 4.0 > 0:
        raise UnstablePotential(
            f"C1*C2 - C3**2/4 = {params.C1 * params.C2 - params.C3**2 / 4.0!r} <= 0"
        )


def _mass_ratio_root(params: OscillatorParams) -> float:
    return (params.m1 / params.m2) ** 0.25


def mode_exponentials(params: OscillatorParams) -> tuple[float, float]:
    """Return ``(exp(2*eta), exp(-2*eta))`` from the two square-root branches.

    The stiff branch is taken as ``exp(2*eta)`` so that ``eta >= 0``.
    """
    validate(params)
    mu = _mass_ratio_root(params)
    a = params.C1 / mu**2
    b = mu**2 * params.C2
    k = math.sqrt(params.C1 * params.C2 - params.C3**2 / 4.0)
    root = math.hypot(a - b, params.C3)
    return (a + b + root) / (2.0 * k), (a + b - root) / (2.0 * k)


def derive_decoupled(params: OscillatorParams) -> DecoupledParams:
    """Normal-mode parameters of ``params``.

    ``eta >= 0`` always, and ``theta`` is chosen so that X1 is the stiff mode,
    i.e. the returned pair reproduces the original potential exactly (see
    :func:`to_oscillator_params`). ``theta`` lies in [0, 2*pi).
    """
    e_plus, _ = mode_exponentials(params)
    mu = _mass_ratio_root(params)
    a = params.C1 / mu**2
    b = mu**2 * params.C2
    theta = math.atan2(-params.C3, a - b) % TWO_PI
    eta = 0.5 * math.log(e_plus)
    k = math.sqrt(params.C1 * params.C2 - params.C3**2 / 4.0)
    m = math.sqrt(params.m1 * params.m2)
    omega = math.sqrt(k / m)
    return DecoupledParams(
        mu=mu,
        theta=theta,
        eta=eta,
        k=k,
        m=m,
        omega=omega,
        e0=params.hbar * omega * math.cosh(eta),
        hbar=params.hbar,
    )


def from_decoupled(eta: float, theta: float) -> DecoupledParams:
    """Dimensionless parameters with hbar = m = omega = k = mu = 1."""
    return DecoupledParams(
        mu=1.0, theta=theta, eta=eta, k=1.0, m=1.0, omega=1.0, e0=math.cosh(eta)
    )


def transform_matrix(dp: DecoupledParams) -> np.ndarray:
    """Matrix R with x = R @ X."""
    c = math.cos(dp.theta / 2.0)
    s = math.sin(dp.theta / 2.0)
    return np.array([[c / dp.mu, s / dp.mu], [-dp.mu * s, dp.mu * c]])


def to_oscillator_params(dp: DecoupledParams) -> OscillatorParams:
    """Inverse of :func:`derive_decoupled` (up to the (eta, theta) equivalences)."""
    inv = np.linalg.inv(transform_matrix(dp))
    modes = np.diag([dp.k * math.exp(2 * dp.eta), dp.k * math.exp(-2 * dp.eta)])
    stiff = inv.T @ modes @ inv
    return OscillatorParams(
        m1=dp.m1,
        m2=dp.m2,
        C1=float(stiff[0, 0]),
        C2=float(stiff[1, 1]),
        C3=float(stiff[0, 1] + stiff[1, 0]),
        hbar=dp.hbar,
    )


def potential(params: OscillatorParams, x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return 0.5 * (params.C1 * x1**2 + params.C2 * x2**2 + params.C3 * x1 * x2)
