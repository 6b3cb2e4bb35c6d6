import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hbvm.blended import (
    BlendedConfig,
    BlendedOperator,
    Mode,
    amplification_grid,
    blended_solve,
    contraction_factor,
    error_propagation_matrix,
    gamma_opt,
    iteration_matrix_Z,
    linear_analysis,
    max_amplification,
    residual_F,
    rho_star,
    rho_star_optimal,
    spectral_radius,
)
from hbvm.errors import (
    ConvergenceError,
    InvalidArgumentError,
    InvalidSpectrumError,
    PoleError,
    StepRejectedError,
)
from hbvm.integrator import make_partition
from hbvm.systems import HamiltonianSystem, harmonic_oscillator, pendulum, quartic_oscillator
from hbvm.tableau import eigenvalues, pair_spectra, x_matrix

import oracles


def gauss_spectrum(s):
    return eigenvalues(x_matrix(s))


def free_particle_at_rest():
    # H = 0 gives f = 0
    return HamiltonianSystem(2, lambda y: np.zeros(np.shape(y)[:-1]),
                             lambda y: np.zeros(np.shape(y)), lambda y: np.zeros((2, 2)), "zero")


def test_gamma_opt_examples():
    assert round(gamma_opt(gauss_spectrum(2)), 4) == 0.2887
    assert round(gamma_opt(gauss_spectrum(5)), 4) == 0.1173
    assert gamma_opt([0.5]) == 0.5
    with pytest.raises(InvalidSpectrumError):
        gamma_opt([0.5, 0.0])
    with pytest.raises(InvalidSpectrumError):
        gamma_opt([])


def test_rho_star_examples():
    assert round(rho_star(gauss_spectrum(2), 0.2887), 4) == 0.1340
    mu10 = gauss_spectrum(10)
    assert round(rho_star(mu10, gamma_opt(mu10)), 4) == 0.6467
    assert rho_star([0.5], 0.5) == 0.0
    with pytest.raises(InvalidArgumentError):
        rho_star([0.5], 0.0)


@pytest.mark.parametrize("s", range(1, 11))
def test_rho_star_at_optimum_is_one_minus_cos(s):
    mu = gauss_spectrum(s)
    assert rho_star(mu, gamma_opt(mu)) == pytest.approx(rho_star_optimal(mu), abs=1e-14)


@pytest.mark.parametrize("s", range(2, 8))
def test_gamma_opt_minimises_rho_star(s):
    mu = gauss_spectrum(s)
    g = gamma_opt(mu)
    best = rho_star(mu, g)
    for factor in np.linspace(0.5, 2.0, 31):
        assert rho_star(mu, g * factor) >= best - 1e-14


def test_Z_vanishes_at_zero():
    C = make_partition(4, 2).C
    assert np.all(iteration_matrix_Z(C, 0.3, 0.0) == 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.floats(-3, 3).filter(lambda y: abs(y) > 1e-3))
def test_Z_spectral_mapping(s, y):
    C = make_partition(s + 2, s).C
    g = gamma_opt(eigenvalues(C))
    q = 1j * y
    mu = eigenvalues(C)
    mapped = q * (mu - g) ** 2 / (mu * (1 - g * q) ** 2)
    assert pair_spectra(np.linalg.eigvals(iteration_matrix_Z(C, g, q)), mapped) <= 1e-10


def test_Z_at_i():
    C = make_partition(6, 2).C
    g = gamma_opt(eigenvalues(C))
    mu = eigenvalues(C)
    mapped = 1j * (mu - g) ** 2 / (mu * (1 - 1j * g) ** 2)
    assert pair_spectra(np.linalg.eigvals(iteration_matrix_Z(C, g, 1j)), mapped) <= 1e-12


def test_Z_decays_at_infinity():
    C = make_partition(4, 2).C
    assert spectral_radius(iteration_matrix_Z(C, gamma_opt(eigenvalues(C)), 1e6j)) <= 1e-5


def test_Z_errors():
    C = make_partition(4, 2).C
    with pytest.raises(PoleError):
        iteration_matrix_Z(C, 0.5, 2.0)
    with pytest.raises(InvalidArgumentError):
        iteration_matrix_Z(np.zeros((2, 2)), 0.5, 1j)


def test_scalar_amplification_factor_maximum():
    for g in (0.1, 0.29, 1.0):
        ys = np.logspace(-4, 4, 20001)
        vals = ys / np.abs(1 - 1j * g * ys) ** 2
        assert vals.max() == pytest.approx(1 / (2 * g), rel=1e-6)
        assert ys[np.argmax(vals)] == pytest.approx(1 / g, rel=1e-3)


def test_max_amplification_matches_rho_star():
    C = make_partition(4, 2).C
    g = gamma_opt(eigenvalues(C))
    value = max_amplification(C, g, 200)
    assert value == pytest.approx(0.1340, abs=1e-4)
    assert value == pytest.approx(rho_star(eigenvalues(C), g), abs=1e-6)
    assert max_amplification(C, 2 * g) > value


def test_amplification_grid():
    ys = amplification_grid(0.25, 16)
    assert ys.min() == pytest.approx(1e-3) and ys.max() == pytest.approx(1e3)
    assert 4.0 in ys
    with pytest.raises(InvalidArgumentError):
        amplification_grid(0.25, 8)


@pytest.mark.parametrize("s", range(1, 11))
def test_A_and_L_convergence(s):
    an = linear_analysis(x_matrix(s), grid_size=400)
    assert an.max_rho < 1.0
    assert an.rho_star < 1.0
    assert spectral_radius(iteration_matrix_Z(x_matrix(s), an.gamma, 1e6j)) <= 1e-4


def test_error_propagation_equals_Z():
    for k, s in [(2, 2), (4, 2), (7, 3), (10, 4)]:
        C = make_partition(k, s).C
        g = gamma_opt(eigenvalues(C))
        for q in (1j, 0.3j, -0.5 + 2j, 1j / g):
            np.testing.assert_allclose(error_propagation_matrix(C, g, q), iteration_matrix_Z(C, g, q), atol=1e-10)


@pytest.mark.parametrize("q", [0.7j, -1 + 0.2j, 3j])
def test_equivalent_formulations_share_solution(q):
    C = make_partition(6, 3).C
    s = len(C)
    g = gamma_opt(eigenvalues(C))
    rng = np.random.default_rng(11)
    psi1 = rng.normal(size=s) + 1j * rng.normal(size=s)
    newton = np.eye(s) - q * C
    scaled = g * (np.linalg.inv(C) - q * np.eye(s))
    psi2 = g * np.linalg.solve(C, psi1)
    theta = 1 / (1 - g * q)
    M = theta * newton + (1 - theta) * scaled
    psi = theta * psi1 + (1 - theta) * psi2
    d1 = np.linalg.solve(newton, psi1)
    d2 = np.linalg.solve(scaled, psi2)
    d3 = np.linalg.solve(M, psi)
    np.testing.assert_allclose(d2, d1, atol=1e-12)
    np.testing.assert_allclose(d3, d1, atol=1e-12)
    # the operator assembles the same M
    op = BlendedOperator(C, g, 1.0, np.array([[q]]))
    M_op = np.column_stack([op.M(e[:, None])[:, 0] for e in np.eye(s, dtype=complex)])
    np.testing.assert_allclose(M_op, M, atol=1e-13)
    # and its linear sweeps converge to that solution
    delta = np.zeros((s, 1), dtype=complex)
    for _ in range(300):
        delta = op.sweep(delta, op.rhs(-psi1[:, None]))
    np.testing.assert_allclose(delta[:, 0], d1, atol=1e-10)


def test_residual_with_zero_step():
    part = make_partition(4, 2)
    y0 = np.array([0.4, 0.1])
    y1 = np.array([[0.5, 0.0], [0.3, -0.2]])
    np.testing.assert_allclose(residual_F(part, pendulum(), y0, 0.0, y1), y1 - y0)


def test_residual_zero_field():
    part = make_partition(6, 2)
    y0 = np.array([1.0, 2.0])
    assert np.all(residual_F(part, free_particle_at_rest(), y0, 0.3, np.tile(y0, (2, 1))) == 0)


def test_residual_affine_on_linear_problem():
    omega, h = 1.3, 0.2
    part = make_partition(7, 3)
    system = harmonic_oscillator(omega)
    y0 = np.array([0.8, -0.1])
    rng = np.random.default_rng(5)
    y1 = rng.normal(size=(3, 2))
    J0 = system.jacobian(y0)
    # F(y1) = (I - h C kron J0) vec(y1) - (e - h u-part) terms; assemble densely
    dense = np.eye(6) - h * np.kron(part.C, J0)
    const = -(np.kron(np.ones(3), y0) + h * np.kron(part.B2 @ part.u_hat, J0 @ y0))
    np.testing.assert_allclose(residual_F(part, system, y0, h, y1).ravel(), dense @ y1.ravel() + const, atol=1e-14)


def test_residual_shape_check():
    part = make_partition(4, 2)
    with pytest.raises(InvalidArgumentError):
        residual_F(part, pendulum(), np.zeros(2), 0.1, np.zeros((3, 2)))


def test_blended_zero_field_one_iteration():
    part = make_partition(4, 2)
    y0 = np.array([0.2, 0.3])
    y1, stats = blended_solve(part, free_particle_at_rest(), y0, 0.1)
    np.testing.assert_array_equal(y1, np.tile(y0, (2, 1)))
    assert stats.iterations <= 1


@pytest.mark.parametrize("k, s", [(4, 2), (6, 3), (2, 2), (7, 2)])
@pytest.mark.parametrize("mode", [Mode.NONLINEAR, Mode.LINEARIZED])
def test_blended_matches_direct_newton_on_pendulum(k, s, mode):
    part = make_partition(k, s)
    y0 = np.array([1.2, 0.3])
    y1, stats = blended_solve(part, pendulum(), y0, 0.1, BlendedConfig(mode=mode))
    ref = oracles.direct_rk_newton(part.tableau.A, pendulum(), y0, 0.1)
    np.testing.assert_allclose(y1, ref[list(part.fund_idx)], atol=1e-10)
    assert stats.residuals[-1] <= 1e-14


def test_contraction_at_i_over_gamma():
    part = make_partition(4, 2)
    g = gamma_opt(eigenvalues(part.C))
    cfg = BlendedConfig(rtol=0.0, atol=1e-15, max_inner=200)
    _, stats = blended_solve(part, harmonic_oscillator(1 / g), np.array([1.0, 0.0]), 1.0, cfg)
    rate = contraction_factor(stats.residuals)
    assert rate <= 0.1340 + 0.01
    assert rate == pytest.approx(0.1340, abs=0.01)


def test_fd_jacobian_used_when_missing():
    base = quartic_oscillator()
    no_jac = HamiltonianSystem(2, base.hamiltonian, base.gradient, None, "quartic-fd")
    part = make_partition(4, 2)
    y0 = np.array([0.9, -0.4])
    a, _ = blended_solve(part, base, y0, 0.1)
    b, _ = blended_solve(part, no_jac, y0, 0.1)
    np.testing.assert_allclose(a, b, atol=1e-13)


def test_non_convergence_raises():
    part = make_partition(4, 2)
    with pytest.raises(ConvergenceError) as info:
        blended_solve(part, pendulum(), np.array([2.5, 0.0]), 2.0, BlendedConfig(max_inner=2))
    assert info.value.residual > 0


def test_singular_phi_rejected():
    part = make_partition(2, 1)
    g = 0.5
    # Phi = I - h g J0 with J0 = I / (h g) is singular
    with pytest.raises(StepRejectedError):
        blended_solve(part, pendulum(), np.array([0.1, 0.0]), 1.0, BlendedConfig(gamma=g),
                      jac0=np.eye(2) / g)


@pytest.mark.parametrize("kwargs", [
    {"gamma": -1.0}, {"max_inner": 0}, {"max_outer": 0}, {"rtol": 0.0, "atol": 0.0}, {"rtol": -1e-3},
])
def test_config_validation(kwargs):
    with pytest.raises(InvalidArgumentError):
        BlendedConfig(**kwargs)


def test_config_accepts_mode_string():
    assert BlendedConfig(mode="linearized").mode is Mode.LINEARIZED


def test_contraction_factor_window():
    r = 0.3 ** np.arange(40)
    assert contraction_factor(r) == pytest.approx(0.3)
    with pytest.raises(InvalidArgumentError):
        contraction_factor([1.0, 0.5])
