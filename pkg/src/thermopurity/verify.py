"""Self-check suite behind ``thermopurity verify``.

``quick`` runs the closed-form identities; ``full`` adds the quadrature,
finite-difference, split-step and path-integral oracles. Checks look up the
library functions at call time so a patched function is what gets checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import model, oracle, purity, quadform, sweep, thermal

__all__ = ["Check", "Report", "verify", "QUICK_CHECKS", "FULL_CHECKS"]

TWO_PI = 2.0 * math.pi
SWEEP_ETA = np.linspace(-4.0, 4.0, 20)
SWEEP_THETA = np.linspace(0.0, TWO_PI, 20)
SWEEP_BETA = np.linspace(0.1, 50.0, 10)
# Rounding allowance when comparing neighbouring purities for monotonicity.
MONOTONE_SLACK = 1e-15


class Check(NamedTuple):
    name: str
    tolerance: float
    observed: float
    passed: bool


@dataclass
class Report:
    level: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def format(self) -> str:
        lines = [f"verify --level {self.level}"]
        for check in self.checks:
            status = "PASS" if check.passed else "FAIL"
            lines.append(
                f"  [{status}] {check.name:<50} observed={check.observed:.3e} tol={check.tolerance:.1e}"
            )
        total = sum(check.passed for check in self.checks)
        lines.append(f"{total}/{len(self.checks)} checks passed")
        return "\n".join(lines)


def _below(name, tolerance, observed):
    observed = float(observed)
    return Check(name, tolerance, observed, bool(observed < tolerance))


def _non_degenerate(theta, margin=0.05):
    return min(abs(theta), abs(theta - math.pi), abs(TWO_PI - theta)) >= margin


def check_shorthand_identities():
    worst = 0.0
    for eta in np.linspace(-2.0, 2.0, 9):
        for theta in np.linspace(0.0, TWO_PI, 9):
            dp = model.from_decoupled(eta, theta)
            beta = np.geomspace(0.01, 100.0, 13)
            p = thermal.propagator_coeffs(dp, beta)
            d = thermal.diagonal_coeffs(dp, beta)
            worst = max(
                worst,
                np.max(np.abs(d.a_tilde - 2 * (p.a - p.d))),
                np.max(np.abs(d.b_tilde - 2 * (p.b - p.f))),
                np.max(np.abs(d.c_tilde - 2 * (p.c - p.g))),
            )
    return _below("shorthand identities a~=2(a-d) etc.", 1e-12, worst)


def check_doubling_identity():
    worst = 0.0
    for eta in np.linspace(-2.0, 2.0, 9):
        for theta in np.linspace(0.0, TWO_PI, 9):
            dp = model.from_decoupled(eta, theta)
            beta = np.geomspace(0.01, 100.0, 13)
            w = thermal.wavefunction_coeffs(dp, beta)
            d = thermal.diagonal_coeffs(dp, 2 * beta)
            worst = max(
                worst,
                np.max(np.abs(2 * w.alpha_tilde - d.a_tilde)),
                np.max(np.abs(2 * w.beta_tilde - d.b_tilde)),
                np.max(np.abs(2 * w.gamma_tilde - d.c_tilde)),
            )
    return _below("doubling identity 2 alpha~(b) = a~(2b)", 1e-12, worst)


def check_positive_exponents():
    worst = math.inf
    for eta in np.linspace(-2.0, 2.0, 10):
        for theta in np.linspace(0.0, TWO_PI, 10):
            dp = model.from_decoupled(eta, theta)
            beta = np.geomspace(0.01, 100.0, 10)
            d = thermal.diagonal_coeffs(dp, beta)
            w = thermal.wavefunction_coeffs(dp, beta)
            worst = min(
                worst,
                np.min(d.a_tilde * d.b_tilde - d.c_tilde**2),
                np.min(w.alpha_tilde * w.beta_tilde - w.gamma_tilde**2),
            )
    return Check("positive-definite exponents (min det)", 0.0, float(worst), bool(worst > 0))


def check_two_path_purity():
    worst = 0.0
    for eta in SWEEP_ETA:
        for theta in SWEEP_THETA:
            dp = model.from_decoupled(eta, theta)
            for beta in SWEEP_BETA:
                coeffs = thermal.wavefunction_coeffs(dp, beta)
                worst = max(
                    worst,
                    abs(purity.purity_from_coeffs(coeffs) - purity.purity_closed(eta, theta, beta)),
                )
    return _below("purity from coefficients vs closed form", 1e-12, worst)


def _sweep_values():
    e, t, b = np.meshgrid(SWEEP_ETA, SWEEP_THETA, SWEEP_BETA, indexing="ij")
    return e, t, b, purity.purity_closed(e, t, b)


def check_symmetries():
    e, t, b, p = _sweep_values()
    worst = max(
        np.max(np.abs(purity.purity_closed(-e, t, b) - p)),
        np.max(np.abs(purity.purity_closed(e, TWO_PI - t, b) - p)),
        np.max(np.abs(purity.purity_closed(e, math.pi - t, b) - p)),
    )
    return _below("symmetries eta->-eta, theta->2pi-theta, pi-theta", 1e-12, worst)


def check_range_and_monotonicity():
    e, t, b, p = _sweep_values()
    in_range = bool(np.all((p > 0) & (p <= 1)))
    steps = np.diff(p, axis=2)
    worst_drop = float(max(0.0, -np.min(steps)))
    return [
        Check("purity in (0, 1]", 0.0, float(np.min(p)), in_range),
        Check("purity non-decreasing in beta", MONOTONE_SLACK, worst_drop, worst_drop <= MONOTONE_SLACK),
    ]


def check_temperature_limits():
    low = high = relation = 0.0
    for eta in np.linspace(-2.0, 2.0, 20):
        for theta in np.linspace(0.05, TWO_PI - 0.05, 20):
            if not _non_degenerate(theta):
                continue
            low = max(low, abs(purity.purity_closed(eta, theta, 50.0) - purity.purity_low_t(eta, theta)))
            high = max(high, abs(purity.purity_closed(eta, theta, 1e-3) - purity.purity_high_t(eta, theta)))
            relation = max(relation, abs(purity.purity_high_t(eta, theta) - purity.purity_low_t(2 * eta, theta)))
    return [
        _below("low-T limit at beta=50", 1e-6, low),
        _below("high-T limit at beta=1e-3", 1e-4, high),
        _below("high-T(eta) = low-T(2 eta)", 1e-12, relation),
    ]


def check_identical_particles():
    closed = purity.purity_closed(math.log(2.0), math.pi / 2, 50.0)
    identical = purity.purity_identical(1.0, 30.0 / 17.0, 1.0, 1.0, 50.0)
    return _below("identical particles -> 4/5", 1e-6, max(abs(closed - 0.8), abs(identical - 0.8)))


def check_coupling_limits():
    rng = np.random.default_rng(7)
    weak = 0.0
    for _ in range(50):
        m1, m2, c1, c2 = rng.uniform(0.2, 5.0, size=4)
        dp = model.derive_decoupled(model.OscillatorParams(m1, m2, c1, c2, 0.0))
        weak = max(weak, abs(purity.purity_closed(dp.eta, dp.theta, 1.0) - 1.0))
    strong = []
    for delta in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
        dp = model.derive_decoupled(model.OscillatorParams(1.0, 1.0, 1.0, 1.0, 2.0 * (1 - delta)))
        strong.append(float(purity.purity_closed(dp.eta, dp.theta, 1.0)))
    decreasing = all(a > b for a, b in zip(strong, strong[1:]))
    return [
        _below("weak coupling C3=0 -> purity 1", 1e-12, weak),
        Check("strong coupling -> purity < 0.05, decreasing", 0.05, strong[-1], decreasing and strong[-1] < 0.05),
    ]


def check_high_t_couplings():
    dp = model.derive_decoupled(model.OscillatorParams(1.0, 1.0, 1.0, 1.0, 1.0))
    return _below("high-T purity = sqrt(3)/2 for C3=1", 1e-12, abs(purity.purity_high_t(dp.eta, dp.theta) - math.sqrt(3) / 2))


def _ground_density_kernel(dp):
    """|psi0|**2 written as a Gaussian kernel in (x1, x2)."""
    c = math.cos(dp.theta / 2)
    s = math.sin(dp.theta / 2)
    stiff = np.array([dp.mu * c, -s / dp.mu])
    soft = np.array([dp.mu * s, c / dp.mu])
    scale = dp.m * dp.omega / dp.hbar
    quad = scale * (math.exp(dp.eta) * np.outer(stiff, stiff) + math.exp(-dp.eta) * np.outer(soft, soft))
    return quadform.QuadKernel(math.log(scale / math.pi), quad)


def check_normalisations():
    worst = 0.0
    points = np.array([[0.0, 0.0], [0.3, -0.4], [-1.1, 0.7]])
    for eta, theta, beta in [(0.0, 0.0, 1.0), (1.0, math.pi / 3, 2.0), (-0.7, 2.0, 0.3)]:
        dp = model.from_decoupled(eta, theta)
        reduced = thermal.reduced_density_kernel(dp, beta)
        trace = quadform.integrate_all(quadform.pullback(reduced, [[1.0], [1.0]]))
        ground = _ground_density_kernel(dp)
        sampled = thermal.ground_state(dp, points[:, 0], points[:, 1]) ** 2
        worst = max(
            worst,
            abs(trace - 1.0),
            abs(quadform.integrate_all(ground) - 1.0),
            float(np.max(np.abs(sampled / ground(points) - 1.0))),
        )
    return _below("unit trace of rho_red and |psi0|^2", 1e-10, worst)


def check_quadrature_oracle():
    worst = 0.0
    for eta in (0.0, 1.0, math.log(2.0)):
        for theta in (math.pi / 2, math.pi / 3):
            for beta in (0.5, 1.0, 5.0):
                dp = model.from_decoupled(eta, theta)
                result = oracle.purity_quadrature(dp, beta, oracle.Grid2D(8, 257))
                worst = max(worst, abs(result.value - purity.purity_closed(eta, theta, beta)))
    return _below("quadrature purity vs closed form", 1e-6, worst)


def check_schrodinger_residual():
    worst = 0.0
    for eta in (0.0, 1.0):
        for theta in (0.0, math.pi / 2):
            for beta in (0.5, 2.0):
                dp = model.from_decoupled(eta, theta)
                worst = max(worst, oracle.schrodinger_residual(dp, beta, oracle.Grid2D(8, 257)))
    return _below("imaginary-time Schroedinger residual", 1e-4, worst)


def ground_state_mismatch(dp: model.DecoupledParams, steps: int = 20000, grid=None) -> float:
    """Pointwise relative gap between the evolved field at beta=20 and psi0,
    over nodes where psi0 exceeds 1% of its peak."""
    grid = grid or oracle.Grid2D(8, 129)
    field_ = oracle.imaginary_time_evolve(dp, grid, beta_end=20.0, steps=steps)
    x1, x2 = np.meshgrid(field_.axis, field_.axis, indexing="ij")
    target = thermal.ground_state(dp, x1, x2)
    h = field_.axis[1] - field_.axis[0]
    target = target / math.sqrt(np.sum(target**2) * h * h)
    evolved = field_.normalized()
    mask = target >= 1e-2 * target.max()
    return float(np.max(np.abs(evolved[mask] / target[mask] - 1.0)))


def check_ground_state_convergence():
    worst = max(
        ground_state_mismatch(model.from_decoupled(0.0, 0.0)),
        ground_state_mismatch(model.from_decoupled(1.0, math.pi / 2)),
    )
    return _below("split-step evolution to beta=20 vs psi0", 1e-5, worst)


def check_path_integral():
    dp = model.from_decoupled(1.0, math.pi / 3)
    sliced = oracle.path_integral_kernel(dp, 2.0)
    exact = thermal.density_matrix_kernel(dp, 2.0)
    observed = max(
        abs(math.expm1(sliced.log_prefactor - exact.log_prefactor)),
        float(np.max(np.abs(sliced.quad - exact.quad)) / np.max(np.abs(exact.quad))),
    )
    return _below("Trotter path integral (2^12 slices) vs rho", 1e-4, observed)


def check_preset_ranges():
    violations = 0
    for spec in sweep.load_presets().values():
        violations += len(sweep.run_sweep(spec).metadata["range_violations"])
    return Check("preset sweeps: rows outside (0, 1]", 0.0, float(violations), violations == 0)


QUICK_CHECKS: list[Callable] = [
    check_shorthand_identities,
    check_doubling_identity,
    check_positive_exponents,
    check_two_path_purity,
    check_symmetries,
    check_range_and_monotonicity,
    check_temperature_limits,
    check_identical_particles,
    check_coupling_limits,
    check_high_t_couplings,
    check_normalisations,
    check_preset_ranges,
]
FULL_CHECKS: list[Callable] = QUICK_CHECKS + [
    check_quadrature_oracle,
    check_schrodinger_residual,
    check_path_integral,
    check_ground_state_convergence,
]


def verify(level: str = "quick") -> Report:
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    report = Report(level)
    for run in QUICK_CHECKS if level == "quick" else FULL_CHECKS:
        outcome = run()
        report.checks.extend(outcome if isinstance(outcome, list) else [outcome])
    return report
