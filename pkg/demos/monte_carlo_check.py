"""
Stochastic cross-check of the linearized fluctuation model
==========================================================

Factors the (indefinite, complex-symmetric) diffusion matrix with a Takagi
decomposition, integrates an Euler-Maruyama ensemble of the linear Langevin
system below threshold, and compares the sampled stationary moments and the
Welch-averaged spectrum against their closed-form counterparts.
"""

import numpy as np

from cascaded_fwm import (
    SystemParams,
    build_fluctuation_model,
    compute_thresholds,
    estimate_spectrum,
    factor_diffusion,
    mc_stationary_covariance,
    simulate_ou,
    spectral_matrix,
    state_for_branch,
    stationary_covariance,
    takagi,
)

params = SystemParams(gamma_a=0.03, gamma_b=0.03, gamma_c=0.03,
                      k1=1.0, k2=0.4, k3=0.4)
th = compute_thresholds(params)
system = params.with_epsilon(0.8 * th.eps_th)
model = build_fluctuation_model(system, state_for_branch(system, "trivial"))

# ---- noise factorization ----------------------------------------------------
# D is symmetric but indefinite, so no Cholesky factor exists; the Takagi
# factorization D = u diag(sigma) u^T gives B = u diag(sqrt(sigma)) with
# B B^T = D exactly (complex B, real noise increments).
sigma_vals, u = takagi(model.d)
noise = factor_diffusion(model.d)
print("diffusion singular values:", np.array2string(sigma_vals, precision=4))
print(f"factorization residual |B B^T - D|_max = {noise.residual:.3e}")

# ---- stationary moments -----------------------------------------------------
sigma = stationary_covariance(model)
sigma_mc, stderr = mc_stationary_covariance(model, n_paths=32, seed=2024)
mask = stderr > 0
z = np.max(np.abs(sigma_mc - sigma)[mask] / stderr[mask])
print(f"\nstationary moments, Monte Carlo vs Lyapunov:")
print(f"  largest analytic second moment  {np.max(np.abs(sigma)):.4f}")
print(f"  worst disagreement              {z:.2f} standard errors (32 paths)")

# ---- spectrum from sample paths ----------------------------------------------
length = 4096
ensemble = simulate_ou(model, steps=6 * length, n_paths=8, seed=99)
omegas = np.array([0.2, 0.5, 1.0, 2.0]) * system.gamma_a
est = estimate_spectrum(ensemble, omegas, segment_length=length, skip=length)
print(f"\nWelch spectrum from {est.n_segments} segments:")
print("  omega/gamma_a   |S| analytic   |S| sampled    worst z")
for i, w in enumerate(est.omega_used):
    target = spectral_matrix(model, w)
    m = est.stderr[i] > 0
    worst = np.max(np.abs(est.values[i] - target)[m] / est.stderr[i][m])
    print(f"  {w / system.gamma_a:12.3f}  {np.max(np.abs(target)):12.4f}  "
          f"{np.max(np.abs(est.values[i])):12.4f}  {worst:8.2f}")
