import numpy as np
import pytest

from cascaded_fwm import (
    QUADRATURE_LABELS,
    SWAP_PERMUTATION,
    FluctuationModel,
    StabilityError,
    SystemParams,
    build_fluctuation_model,
    integrated_spectrum,
    output_spectrum,
    output_spectrum_at,
    quadrature_basis_matrix,
    quadrature_transform,
    spectral_matrix,
    state_for_branch,
    stationary_covariance,
)
from helpers import pumped, toy_model


def test_scalar_lorentzian():
    gamma, d0 = 0.7, 1.3
    model = toy_model([[gamma]], [[d0]])
    for omega in (0.0, 0.2, 5.0):
        s = spectral_matrix(model, omega)
        assert s[0, 0] == pytest.approx(d0 / (gamma**2 + omega**2), rel=1e-13)


def test_zero_diffusion_zero_spectrum():
    params = pumped(0.4, 1.2)
    model = build_fluctuation_model(params, state_for_branch(params, "lower"))
    zero = FluctuationModel(params=params, steady_state=model.steady_state,
                            m=model.m, d=np.zeros((12, 12)))
    assert np.max(np.abs(spectral_matrix(zero, 0.5))) == 0.0


def test_solve_agrees_with_explicit_inverse():
    rng = np.random.default_rng(42)
    a = rng.standard_normal((12, 12))
    m = a @ a.T / 12.0 + 0.5 * np.eye(12)  # comfortably stable
    g = rng.standard_normal((12, 12))
    d = (g + g.T) / 2.0
    model = toy_model(m, d)
    for omega in (0.0, 0.3, 2.0):
        lhs = np.linalg.inv(m + 1j * omega * np.eye(12))
        rhs = np.linalg.inv(m.T - 1j * omega * np.eye(12))
        assert np.max(np.abs(spectral_matrix(model, omega) - lhs @ d @ rhs)) < 1e-12


def test_high_frequency_decay():
    # S -> D / omega^2 far above every cavity linewidth.
    params = pumped(0.5, 1.5)
    model = build_fluctuation_model(params, state_for_branch(params, "lower"))
    omega = 1e6 * params.gamma_a
    s = spectral_matrix(model, omega)
    limit = 1.2 * np.max(np.abs(model.d)) / omega**2
    assert 0.0 < np.max(np.abs(s)) < limit


def test_formal_evaluation_off_the_stable_manifold():
    # The kept branches above the upper threshold are saddles; the spectral
    # formula still evaluates there (that is how these spectra are reported)
    # and the resulting output matrix stays positive semidefinite.
    params = pumped(0.4, 2.2, reference="eps_th_prime")
    for branch in ("lower", "upper"):
        model = build_fluctuation_model(params, state_for_branch(params, branch))
        for omega_norm in (0.05, 1.0, 30.0):
            spec = output_spectrum_at(model, omega_norm * params.gamma_a)
            assert np.min(np.linalg.eigvalsh(spec.v_out)) > -1e-9


def test_quadrature_basis_matrix_shape():
    t = quadrature_basis_matrix()
    eye = np.eye(6)
    assert np.array_equal(t[:6, :6], eye)
    assert np.array_equal(t[:6, 6:], eye)
    assert np.array_equal(t[6:, :6], -1j * eye)
    assert np.array_equal(t[6:, 6:], 1j * eye)
    assert QUADRATURE_LABELS[0] == "Xp2" and QUADRATURE_LABELS[6] == "Yp2"


def test_quadrature_transform_zero():
    assert np.array_equal(quadrature_transform(np.zeros((12, 12))),
                          np.zeros((12, 12)))


def test_output_spectrum_entrywise_form():
    params = SystemParams(gamma_a=0.02, gamma_b=0.05, gamma_c=0.08,
                          k1=1.0, k2=0.4, k3=0.4)
    v_intra = np.zeros((12, 12))
    v_intra[0, 0] = 1.5          # X_p2 variance
    v_intra[2, 8] = v_intra[8, 2] = -0.25  # X_i1 x Y_i1 cross entry
    spec = output_spectrum(v_intra, params, omega=0.01)
    v = spec.v_out
    assert v[0, 0] == pytest.approx(1.0 + 2.0 * 0.02 * 1.5)
    assert v[2, 8] == pytest.approx(2.0 * np.sqrt(0.05 * 0.05) * -0.25)
    assert v[1, 1] == 1.0  # untouched mode sits at shot noise
    assert spec.omega_norm == pytest.approx(0.01 / 0.02)


def test_vacuum_limit_and_symmetry():
    params = pumped(0.4, 1.2)
    model = build_fluctuation_model(params, state_for_branch(params, "lower"))
    spec = output_spectrum_at(model, 1e3 * params.gamma_a)
    assert np.max(np.abs(spec.v_out - np.eye(12))) < 2e-3
    assert np.array_equal(spec.v_out, spec.v_out.T)
    assert np.all(np.diag(spec.v_out) >= 0.0)


def test_mode_swap_invariance():
    params = pumped(0.4, 1.2)
    model = build_fluctuation_model(params, state_for_branch(params, "lower"))
    perm = np.concatenate([SWAP_PERMUTATION, 6 + np.array(SWAP_PERMUTATION)])
    for omega_norm in (0.05, 0.7, 12.0):
        v = output_spectrum_at(model, omega_norm * params.gamma_a).v_out
        assert np.max(np.abs(v[np.ix_(perm, perm)] - v)) < 1e-10


def test_linear_combination_consistency():
    # c^T v_out c must equal the variance assembled through the amplitude
    # basis: shot noise + 2 Re(u^T S u) with u = T^T G^(1/2) c.
    params = pumped(0.4, 1.2)
    model = build_fluctuation_model(params, state_for_branch(params, "lower"))
    t = quadrature_basis_matrix()
    g_half = np.sqrt(np.tile(params.damping_rates(), 2))
    rng = np.random.default_rng(8)
    for omega_norm in (0.03, 1.0, 40.0):
        omega = omega_norm * params.gamma_a
        s = spectral_matrix(model, omega)
        v_out = output_spectrum_at(model, omega).v_out
        for _ in range(5):
            c = rng.standard_normal(12)
            direct = c @ v_out @ c
            u = t.T @ (g_half * c)
            alpha_route = c @ c + 2.0 * np.real(u @ s @ u)
            assert abs(direct - alpha_route) < 1e-10 * (1.0 + abs(direct))


def test_integrated_spectrum_matches_lyapunov():
    params = pumped(0.4, 0.8)
    model = build_fluctuation_model(params, state_for_branch(params, "trivial"))
    sigma = stationary_covariance(model)
    integral = integrated_spectrum(model)
    assert np.max(np.abs(integral - sigma)) < 1e-6


def test_integrated_spectrum_rejects_marginal_drift():
    # The converted branch holds an exactly neutral phase mode that carries
    # diffusion; the integral diverges there and must refuse loudly instead
    # of returning quadrature noise.
    params = pumped(0.4, 1.2)
    model = build_fluctuation_model(params, state_for_branch(params, "lower"))
    with pytest.raises(StabilityError):
        integrated_spectrum(model)


def test_integrated_spectrum_zero_diffusion():
    params = pumped(0.4, 0.8)
    model = build_fluctuation_model(params, state_for_branch(params, "trivial"))
    zero = FluctuationModel(params=params, steady_state=model.steady_state,
                            m=model.m, d=np.zeros((12, 12)))
    assert np.max(np.abs(integrated_spectrum(zero))) < 1e-15
