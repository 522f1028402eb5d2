"""
Pump thresholds, steady-state branches and where the dynamics actually goes
===========================================================================

Walks the pump amplitude through the three regimes for the split-threshold
coupling set (k2 = 0.4, so eps_th' = 2 eps_th), prints every analytic branch
with its linear stability report, and then integrates the full nonlinear
equations to show which states the dynamics selects.
"""

import numpy as np

from cascaded_fwm import (
    MODE_LABELS,
    SystemParams,
    analytic_steady_states,
    build_fluctuation_model,
    classify_regime,
    compute_thresholds,
    relax_to_steady_state,
    sample_initial_conditions,
    stability,
)

params = SystemParams(gamma_a=0.03, gamma_b=0.03, gamma_c=0.03,
                      k1=1.0, k2=0.4, k3=0.4)
th = compute_thresholds(params)
print(f"eps_th       = {th.eps_th:.12e}")
print(f"eps_th_prime = {th.eps_th_prime:.12e}")
print(f"ratio        = {th.eps_th_prime / th.eps_th:.12f}")

# ---- branch structure across the regimes ----------------------------------
for ratio in (0.8, 1.2, 2.2):
    system = params.with_epsilon(ratio * th.eps_th)
    print(f"\npump = {ratio} eps_th  ->  regime {classify_regime(system).value}")
    for state in analytic_steady_states(system):
        amps = ", ".join(f"A_{m}={a:.5f}"
                         for m, a in zip(MODE_LABELS, state.amplitudes))
        report = stability(build_fluctuation_model(system, state).m)
        verdict = ("marginal" if report.indeterminate
                   else "stable" if report.stable else "unstable")
        print(f"  {state.branch.value:8s} {amps}")
        print(f"  {'':8s} slowest decay margin {report.margin:+.3e} ({verdict})")

# Every converted branch carries one exactly neutral mode: the free common
# phase of the down-converted triplet. Stability is therefore never strict.

# ---- nonlinear relaxation: who attracts? -----------------------------------
# Between the thresholds the converted branch is the attractor (up to the
# free phase). Far above the upper threshold BOTH analytic branches are
# saddles and the flow settles on a pump-asymmetric state instead.
for ratio, tag in ((1.2, "between thresholds"), (4.4, "far above upper")):
    system = params.with_epsilon(ratio * th.eps_th)
    initial = sample_initial_conditions(system, 1, seed=7)[0]
    result = relax_to_steady_state(system, initial)
    moduli = np.abs(result.amplitudes)
    print(f"\nrelaxation at {ratio} eps_th ({tag}): status {result.status}")
    print("  endpoint moduli " + ", ".join(f"{m:.5f}" for m in moduli))
    matched = result.matched.branch.value if result.matched else "none"
    print(f"  matched branch  {matched}  "
          f"(distance to nearest analytic branch {result.distance:.3e})")
    print(f"  pump asymmetry  |A_p2| - |A_p1| = {moduli[0] - moduli[1]:+.5f}")
