"""Shared operating points for the test suite.

The two canonical coupling sets: k2 = 0.5 puts the system exactly on the
threshold-coincidence manifold (k1 = 2 k2, equal dampings), k2 = 0.4 gives
the split thresholds with eps_th_prime = 2 eps_th.
"""

import numpy as np

from cascaded_fwm import SystemParams, compute_thresholds

GAMMA = 0.03


def make_params(k2, epsilon=0.0, gamma=GAMMA, k1=1.0):
    return SystemParams(gamma_a=gamma, gamma_b=gamma, gamma_c=gamma,
                        k1=k1, k2=k2, k3=k2, epsilon=epsilon)


def pumped(k2, ratio, reference="eps_th", **kwargs):
    """Parameter set with epsilon = ratio * (chosen threshold)."""
    params = make_params(k2, **kwargs)
    th = compute_thresholds(params)
    base = th.eps_th if reference == "eps_th" else th.eps_th_prime
    return params.with_epsilon(ratio * base)


def random_params(rng, regime=None):
    """One random valid parameter set, optionally pinned to a pump regime."""
    gammas = 10.0 ** rng.uniform(-2.5, -0.5, size=3)
    k2 = 10.0 ** rng.uniform(-1.0, 0.3)
    coincidence = 2.0 * k2 * np.sqrt(gammas[1] / gammas[2])
    if regime == "NoThreshold":
        k1 = coincidence * rng.uniform(0.3, 0.95)
    else:
        k1 = coincidence * rng.uniform(1.05, 3.0)
    params = SystemParams(gamma_a=gammas[0], gamma_b=gammas[1], gamma_c=gammas[2],
                          k1=k1, k2=k2, k3=k2)
    th = compute_thresholds(params)
    if regime in (None, "NoThreshold"):
        eps = rng.uniform(0.0, 1.0) * (th.eps_th if th.has_threshold else 1.0)
    elif regime == "BelowThreshold":
        eps = rng.uniform(0.1, 0.99) * th.eps_th
    elif regime == "BetweenThresholds":
        eps = th.eps_th + rng.uniform(0.05, 0.95) * (th.eps_th_prime - th.eps_th)
    elif regime == "AboveUpperThreshold":
        eps = th.eps_th_prime * rng.uniform(1.05, 4.0)
    else:
        raise ValueError(regime)
    return params.with_epsilon(float(eps))


def toy_model(m, d, k2=0.4):
    """FluctuationModel wrapper around an arbitrary small (M, D) pair."""
    from cascaded_fwm import Branch, FluctuationModel, state_for_branch

    params = make_params(k2, epsilon=0.0)
    ss = state_for_branch(params, Branch.TRIVIAL)
    return FluctuationModel(params=params, steady_state=ss,
                            m=np.asarray(m, dtype=float),
                            d=np.asarray(d, dtype=float))
