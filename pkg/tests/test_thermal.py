import math

import numpy as np
import pytest

from thermopurity import model, purity, quadform, thermal
from thermopurity.errors import NonPositiveBeta
from thermopurity.quadform import QuadKernel

ETAS = np.linspace(-2.0, 2.0, 10)
THETAS = np.linspace(0.0, 2 * math.pi, 10)


def mehler(mass, freq, beta, xb, xa, hbar=1.0):
    """Single-oscillator thermal kernel, written out independently."""
    u = hbar * freq * beta
    pref = math.sqrt(mass * freq / (2 * math.pi * hbar * math.sinh(u)))
    expo = -mass * freq / (2 * hbar * math.sinh(u)) * ((xb**2 + xa**2) * math.cosh(u) - 2 * xb * xa)
    return pref * np.exp(expo)


def fitted_kernel(func):
    """Recover exp(log_prefactor - x.Q.x) from point evaluations of a Gaussian."""
    f0 = math.log(func(0.0, 0.0))
    q11 = f0 - math.log(func(1.0, 0.0))
    q22 = f0 - math.log(func(0.0, 1.0))
    q12 = 0.5 * (f0 - math.log(func(1.0, 1.0)) - q11 - q22)
    return QuadKernel(f0, [[q11, q12], [q12, q22]])


@pytest.mark.parametrize("func", [thermal.propagator_coeffs, thermal.diagonal_coeffs, thermal.wavefunction_coeffs])
@pytest.mark.parametrize("beta", [0.0, -1.0])
def test_non_positive_beta_rejected(func, beta):
    with pytest.raises(NonPositiveBeta):
        func(model.from_decoupled(1.0, 1.0), beta)


def test_propagator_equal_modes():
    p = thermal.propagator_coeffs(model.from_decoupled(0.0, 1.1), 1.0)
    assert p.c == pytest.approx(0.0, abs=1e-15) and p.g == pytest.approx(0.0, abs=1e-15)
    assert p.a == pytest.approx(0.5 / math.tanh(1.0), rel=1e-14)
    assert p.d == pytest.approx(0.5 / math.sinh(1.0), rel=1e-14)


def test_propagator_no_mixing_separates_modes():
    e = math.e
    p = thermal.propagator_coeffs(model.from_decoupled(1.0, 0.0), 1.0)
    assert p.c == 0.0 and p.g == 0.0
    assert p.a == pytest.approx(0.5 * e / math.tanh(e), rel=1e-14)
    assert p.d == pytest.approx(0.5 * e / math.sinh(e), rel=1e-14)
    assert p.b == pytest.approx(0.5 / e / math.tanh(1 / e), rel=1e-14)
    assert p.f == pytest.approx(0.5 / e / math.sinh(1 / e), rel=1e-14)


def test_propagator_positive_and_cross_terms_vanish_without_mixing():
    betas = np.geomspace(0.01, 100.0, 9)
    for eta in ETAS:
        for theta in THETAS:
            p = thermal.propagator_coeffs(model.from_decoupled(eta, theta), betas)
            assert np.all(np.array([p.a, p.b, p.d, p.f]) > 0)
        for theta in (0.0, math.pi):
            p = thermal.propagator_coeffs(model.from_decoupled(eta, theta), betas)
            np.testing.assert_allclose([p.c, p.g], 0.0, atol=1e-14)


def test_shorthand_identities_two_paths():
    dp = model.from_decoupled(1.0, math.pi / 2)
    p = thermal.propagator_coeffs(dp, 1.0)
    d = thermal.diagonal_coeffs(dp, 1.0)
    assert d.a_tilde == pytest.approx(2 * (p.a - p.d), abs=1e-12)
    assert d.b_tilde == pytest.approx(2 * (p.b - p.f), abs=1e-12)
    assert d.c_tilde == pytest.approx(2 * (p.c - p.g), abs=1e-12)


def test_shorthand_and_doubling_on_grid():
    betas = np.geomspace(0.01, 100.0, 13)
    for eta in ETAS:
        for theta in THETAS:
            dp = model.from_decoupled(eta, theta)
            p = thermal.propagator_coeffs(dp, betas)
            d = thermal.diagonal_coeffs(dp, betas)
            np.testing.assert_allclose(d.a_tilde, 2 * (p.a - p.d), atol=1e-12)
            np.testing.assert_allclose(d.b_tilde, 2 * (p.b - p.f), atol=1e-12)
            np.testing.assert_allclose(d.c_tilde, 2 * (p.c - p.g), atol=1e-12)
            w = thermal.wavefunction_coeffs(dp, betas)
            d2 = thermal.diagonal_coeffs(dp, 2 * betas)
            np.testing.assert_allclose(2 * w.alpha_tilde, d2.a_tilde, atol=1e-12)
            np.testing.assert_allclose(2 * w.beta_tilde, d2.b_tilde, atol=1e-12)
            np.testing.assert_allclose(2 * w.gamma_tilde, d2.c_tilde, atol=1e-12)


def test_exponents_positive_definite():
    betas = np.geomspace(0.01, 100.0, 10)
    for eta in ETAS:
        for theta in THETAS:
            dp = model.from_decoupled(eta, theta)
            d = thermal.diagonal_coeffs(dp, betas)
            w = thermal.wavefunction_coeffs(dp, betas)
            assert np.all(d.a_tilde > 0) and np.all(d.b_tilde > 0)
            assert np.all(d.a_tilde * d.b_tilde - d.c_tilde**2 > 0)
            assert np.all(w.alpha_tilde > 0) and np.all(w.beta_tilde > 0)
            assert np.all(w.alpha_tilde * w.beta_tilde - w.gamma_tilde**2 > 0)


def test_large_beta_stays_finite():
    dp = model.from_decoupled(3.0, 1.0)
    assert math.isfinite(thermal.density_matrix_kernel(dp, 500.0).log_prefactor)
    assert math.isfinite(thermal.wavefunction_coeffs(dp, 500.0).log_norm)
    assert math.isfinite(thermal.diagonal_coeffs(dp, 500.0).log_norm)


def test_density_matrix_symmetric():
    rng = np.random.default_rng(0)
    dp = model.from_decoupled(0.8, 2.0)
    for _ in range(10):
        xb, xa = rng.normal(size=(2, 2))
        assert thermal.density_matrix(dp, 1.5, xb, xa) == pytest.approx(
            thermal.density_matrix(dp, 1.5, xa, xb), rel=1e-13
        )


def test_density_matrix_factorises_into_modes():
    dp = model.from_decoupled(1.0, math.pi / 3)
    beta = 2.0
    inverse = np.linalg.inv(model.transform_matrix(dp))
    rng = np.random.default_rng(1)
    for _ in range(10):
        xb, xa = rng.normal(size=(2, 2))
        xb_n, xa_n = inverse @ xb, inverse @ xa
        expected = (
            math.exp(beta * dp.e0)
            * mehler(dp.m, dp.omega_plus, beta, xb_n[0], xa_n[0])
            * mehler(dp.m, dp.omega_minus, beta, xb_n[1], xa_n[1])
        )
        assert thermal.density_matrix(dp, beta, xb, xa) == pytest.approx(expected, rel=1e-12)


def test_density_matrix_origin_value():
    dp = model.from_decoupled(0.0, 0.0)
    value = thermal.density_matrix(dp, 1.0, (0.0, 0.0), (0.0, 0.0))
    assert value == pytest.approx(math.e / (2 * math.pi * math.sinh(1.0)), rel=1e-14)


def test_probability_density_is_coincident_density_matrix():
    rng = np.random.default_rng(2)
    for _ in range(20):
        eta, theta = rng.uniform(-2, 2), rng.uniform(0, 2 * math.pi)
        beta = rng.uniform(0.1, 5.0)
        x = rng.normal(size=2)
        dp = model.from_decoupled(eta, theta)
        assert thermal.probability_density(dp, beta, *x) == pytest.approx(
            thermal.density_matrix(dp, beta, x, x), rel=1e-11
        )


def test_probability_density_normalised_flag():
    dp = model.from_decoupled(1.0, 1.0)
    kernel = fitted_kernel(lambda a, b: thermal.probability_density(dp, 0.7, a, b, normalized=True))
    assert quadform.integrate_all(kernel) == pytest.approx(1.0, rel=1e-10)


def test_probability_density_classical_limit():
    dp = model.from_decoupled(1.0, math.pi / 2)
    params = model.to_oscillator_params(dp)
    beta = 1e-3
    for x1 in np.linspace(-1, 1, 5):
        for x2 in np.linspace(-1, 1, 5):
            ratio = thermal.probability_density(dp, beta, x1, x2) / thermal.probability_density(dp, beta, 0, 0)
            assert ratio == pytest.approx(math.exp(-beta * model.potential(params, x1, x2)), rel=1e-4)


def test_probability_density_ground_state_limit():
    # The soft mode's tanh(beta e^-eta / 2) must be saturated at beta = 50.
    dp = model.from_decoupled(0.5, 1.0)
    for x1 in np.linspace(-1, 1, 5):
        for x2 in np.linspace(-1, 1, 5):
            ratio = thermal.probability_density(dp, 50.0, x1, x2) / thermal.probability_density(dp, 50.0, 0, 0)
            expected = (thermal.ground_state(dp, x1, x2) / thermal.ground_state(dp, 0, 0)) ** 2
            assert ratio == pytest.approx(expected, rel=1e-8)


def test_classical_density_prefactor_and_ratio():
    params = model.OscillatorParams(1.5, 0.5, 2.0, 1.0, 0.4)
    dp = model.derive_decoupled(params)
    beta0 = 0.2
    origin = thermal.classical_density(params, beta0, 0.0, 0.0)
    assert origin == pytest.approx(dp.m * math.exp(beta0 * dp.e0) / (2 * math.pi * beta0), rel=1e-14)
    ratio = thermal.classical_density(params, beta0, 0.3, -0.2) / origin
    assert ratio == pytest.approx(math.exp(-beta0 * model.potential(params, 0.3, -0.2)), rel=1e-14)


def test_classical_density_matches_quantum_at_high_temperature():
    dp = model.from_decoupled(1.0, math.pi / 2)
    params = model.to_oscillator_params(dp)
    beta0 = 1e-3
    quantum0 = thermal.probability_density(dp, beta0, 0, 0)
    classical0 = thermal.classical_density(params, beta0, 0, 0)
    for x1 in np.linspace(-1, 1, 5):
        for x2 in np.linspace(-1, 1, 5):
            q = thermal.probability_density(dp, beta0, x1, x2) / quantum0
            c = thermal.classical_density(params, beta0, x1, x2) / classical0
            assert abs(q / c - 1) < 1e-3


def test_ground_state_normalised():
    for eta, theta in [(0.0, 0.0), (1.0, math.pi / 3), (-0.5, 4.0)]:
        dp = model.from_decoupled(eta, theta)
        kernel = fitted_kernel(lambda a, b: thermal.ground_state(dp, a, b) ** 2)
        assert quadform.integrate_all(kernel) == pytest.approx(1.0, abs=1e-10)


def test_ground_state_decoupled_product():
    dp = model.from_decoupled(0.0, 0.0)
    x1, x2 = 0.4, -1.3
    single = lambda x: math.pi**-0.25 * math.exp(-0.5 * x**2)
    assert thermal.ground_state(dp, x1, x2) == pytest.approx(single(x1) * single(x2), rel=1e-14)


def test_ground_state_exponent_eigenvalues():
    dp = model.from_decoupled(math.log(2.0), math.pi / 2)
    kernel = fitted_kernel(lambda a, b: thermal.ground_state(dp, a, b) ** 2)
    np.testing.assert_allclose(np.linalg.eigvalsh(kernel.quad), [0.5, 2.0], rtol=1e-12)


def test_wavefunction_converges_to_ground_state():
    dp = model.from_decoupled(1.0, 2.0)
    for x1 in np.linspace(-1, 1, 5):
        for x2 in np.linspace(-1, 1, 5):
            ratio = thermal.wavefunction(dp, 50.0, x1, x2) / thermal.wavefunction(dp, 50.0, 0, 0)
            expected = thermal.ground_state(dp, x1, x2) / thermal.ground_state(dp, 0, 0)
            assert ratio == pytest.approx(expected, rel=1e-8)


def test_wavefunction_squared_is_diagonal_at_double_beta():
    dp = model.from_decoupled(1.2, 0.9)
    beta = 0.6
    for x in [(0.3, 0.2), (-1.0, 0.5), (0.7, -0.8)]:
        lhs = (thermal.wavefunction(dp, beta, *x) / thermal.wavefunction(dp, beta, 0, 0)) ** 2
        rhs = thermal.probability_density(dp, 2 * beta, *x) / thermal.probability_density(dp, 2 * beta, 0, 0)
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_wavefunction_decoupled_is_isotropic():
    dp = model.from_decoupled(0.0, 0.0)
    beta = 0.8
    w = thermal.wavefunction_coeffs(dp, beta)
    assert w.gamma_tilde == 0.0
    assert w.alpha_tilde == pytest.approx(0.5 * math.tanh(beta), rel=1e-14)
    assert w.beta_tilde == pytest.approx(0.5 * math.tanh(beta), rel=1e-14)


def test_wavefunction_prefactor():
    dp = model.from_decoupled(0.7, 1.0)
    beta = 1.4
    expected = (
        math.sqrt(1 / (4 * math.pi))
        / math.sqrt(math.cosh(math.exp(0.7) * beta) * math.cosh(math.exp(-0.7) * beta))
        * math.exp(beta * math.cosh(0.7))
    )
    assert thermal.wavefunction(dp, beta, 0.0, 0.0) == pytest.approx(expected, rel=1e-13)


def test_wavefunction_coeffs_mass_ratio_scaling():
    params = model.OscillatorParams(4.0, 1.0, 4.0, 1.0, 0.0)
    dp = model.derive_decoupled(params)
    w = thermal.wavefunction_coeffs(dp, 0.5)
    assert w.gamma_tilde == pytest.approx(0.0, abs=1e-15)
    scale = dp.m * dp.omega / 2 * math.tanh(dp.omega * 0.5)
    assert w.alpha_tilde == pytest.approx(dp.mu**2 * scale, rel=1e-12)
    assert w.beta_tilde == pytest.approx(scale / dp.mu**2, rel=1e-12)


def test_wavefunction_coeffs_symmetric_mixing():
    w = thermal.wavefunction_coeffs(model.from_decoupled(1.3, math.pi / 2), 0.9)
    assert w.alpha_tilde == pytest.approx(w.beta_tilde, rel=1e-14)


def test_wavefunction_purity_reference_value():
    w = thermal.wavefunction_coeffs(model.from_decoupled(1.0, math.pi / 2), 1.0)
    assert w.alpha_tilde * w.beta_tilde - w.gamma_tilde**2 > 0
    assert purity.purity_from_coeffs(w) == pytest.approx(0.4185, abs=5e-4)


def test_convolution_with_initial_wavefunction():
    # psi(beta) is proportional to int rho(x, y; beta - eps/2) psi_init(y) dy
    dp = model.from_decoupled(1.0, math.pi / 3)
    eps = thermal.DEFAULT_EPSILON
    init = fitted_kernel(lambda a, b: thermal.initial_wavefunction(dp, a, b, epsilon=eps))
    rho = thermal.density_matrix_kernel(dp, 1.0 - eps / 2)
    joint = quadform.QuadKernel(
        rho.log_prefactor + init.log_prefactor,
        rho.quad + np.block([[np.zeros((2, 2)), np.zeros((2, 2))], [np.zeros((2, 2)), init.quad]]),
    )
    out = quadform.marginalize(quadform.marginalize(joint, 3), 2)
    np.testing.assert_allclose(out.quad, thermal.wavefunction_kernel(dp, 1.0).quad, rtol=1e-10)


def test_reduced_density_unit_trace_and_symmetry():
    rng = np.random.default_rng(3)
    for eta, theta, beta in [(1.0, math.pi / 2, 1.0), (-1.5, 0.4, 0.2), (2.0, 5.0, 10.0)]:
        dp = model.from_decoupled(eta, theta)
        kernel = thermal.reduced_density_kernel(dp, beta)
        trace = quadform.integrate_all(quadform.pullback(kernel, [[1.0], [1.0]]))
        assert trace == pytest.approx(1.0, abs=1e-10)
        x, xp = rng.normal(size=2)
        assert thermal.reduced_density(dp, beta, x, xp) == pytest.approx(
            thermal.reduced_density(dp, beta, xp, x), rel=1e-14
        )


def test_reduced_density_factorises_without_entanglement():
    dp = model.from_decoupled(0.0, 1.0)
    x, xp = 0.4, -0.9
    value = thermal.reduced_density(dp, 1.0, x, xp)
    product = math.sqrt(thermal.reduced_density(dp, 1.0, x, x) * thermal.reduced_density(dp, 1.0, xp, xp))
    assert value == pytest.approx(product, rel=1e-13)


def test_reduced_density_matches_wavefunction_partial_trace():
    dp = model.from_decoupled(1.0, 2.2)
    beta = 0.9
    psi = thermal.wavefunction_kernel(dp, beta)
    # rho(x, x') = int psi(x, y) psi(x', y) dy over (x, x', y)
    q = psi.quad
    joint = quadform.QuadKernel(
        2 * psi.log_prefactor,
        [[q[0, 0], 0.0, q[0, 1]], [0.0, q[0, 0], q[0, 1]], [q[0, 1], q[0, 1], 2 * q[1, 1]]],
    )
    raw = quadform.marginalize(joint, 2)
    expected = thermal.reduced_density_kernel(dp, beta)
    np.testing.assert_allclose(raw.quad, expected.quad, rtol=1e-12)


def test_thermal_marginal_diagonal_proportional_to_reduced_density():
    # Tracing the 2*beta thermal state over particle 2 and taking its diagonal
    # reproduces rho_red(x, x; beta) up to a constant.
    dp = model.from_decoupled(1.0, math.pi / 3)
    beta = 0.8
    rho = thermal.density_matrix_kernel(dp, 2 * beta)
    # variables (x1b, x1a, y) with x2b = x2a = y
    embed = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0], [0, 0, 1]], dtype=float)
    marginal = quadform.marginalize(quadform.pullback(rho, embed), 2)
    xs = np.linspace(-1.5, 1.5, 7)
    ratios = [
        marginal(np.array([x, x])) / thermal.reduced_density(dp, beta, x, x) for x in xs
    ]
    np.testing.assert_allclose(ratios, ratios[0], rtol=1e-10)
