"""Classical stationary amplitudes: closed forms and a relaxation oracle.

The mean-field equations of motion for the six intracavity amplitudes
follow from the cascaded interaction Hamiltonian in the P representation.
On the symmetric manifold (equal pumps, k2 == k3) the stationary solutions
are known in closed form:

* a trivial branch with only the pumps occupied, A_a = eps / gamma_a;
* between the thresholds, one converted branch pinned at A_a = eps_th / gamma_a;
* above the upper threshold, a second branch at A_a = eps_th_prime / gamma_a.

For the converted branches the daughter amplitudes follow from

    A_b = sqrt((eps - gamma_a A_a) / (k1 A_a)),
    A_c = k2 A_a**2 A_b / gamma_c.

``relax_to_steady_state`` provides an independent numeric check: it
integrates the full (phase-unrestricted) equations from an arbitrary complex
initial condition and reports which analytic branch, if any, the endpoint
matches.  The equations carry a free relative phase between the generated
pairs, so matching compares moduli.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NumericalError, ParameterError
from .params import (
    Mode,
    Regime,
    SystemParams,
    Thresholds,
    classify_regime,
    compute_thresholds,
)


class Branch(enum.Enum):
    TRIVIAL = "trivial"
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True)
class SteadyState:
    """A symmetric stationary solution with real, non-negative amplitudes.

    ``amplitudes`` holds (A_p2, A_p1, A_i1, A_s1, A_i2, A_s2) in canonical
    mode order; on the symmetric manifold A_p2 = A_p1 = A_a and so on.
    """

    amplitudes: np.ndarray
    branch: Branch
    regime: Regime

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=float)
        if amps.shape != (6,):
            raise ParameterError(f"amplitudes must have shape (6,), got {amps.shape}")
        if np.any(amps < 0.0) or not np.all(np.isfinite(amps)):
            raise ParameterError("amplitudes must be finite and >= 0")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def a_a(self) -> float:
        return float(self.amplitudes[Mode.P1])

    @property
    def a_b(self) -> float:
        return float(self.amplitudes[Mode.S1])

    @property
    def a_c(self) -> float:
        return float(self.amplitudes[Mode.S2])

    def alpha(self) -> np.ndarray:
        """Amplitudes as a complex state vector usable by ``drift``."""
        return self.amplitudes.astype(complex)


def drift(params: SystemParams, alpha: np.ndarray) -> np.ndarray:
    """Deterministic part of the equations of motion, d(alpha)/dt.

    Parameters
    ----------
    params : SystemParams
    alpha : array_like, shape (6,), complex
        Intracavity amplitudes in canonical mode order (p2, p1, i1, s1, i2, s2).

    Returns
    -------
    numpy.ndarray, shape (6,), complex
        The right-hand side of the six amplitude equations.  Both pumps are
        driven by the same real amplitude ``params.epsilon``.
    """
    a = np.asarray(alpha, dtype=complex)
    if a.shape != (6,):
        raise ParameterError(f"alpha must have shape (6,), got {a.shape}")
    p2, p1, i1, s1, i2, s2 = a
    eps = params.epsilon
    k1, k2, k3 = params.k1, params.k2, params.k3
    out = np.empty(6, dtype=complex)
    out[Mode.P2] = (eps - params.gamma_a * p2
                    - k1 * np.conj(p1) * s1 * i1
                    - k2 * np.conj(i1) * p1 * i2
                    + k3 * np.conj(s2) * s1 * p1)
    out[Mode.P1] = (eps - params.gamma_a * p1
                    - k1 * np.conj(p2) * s1 * i1
                    - k3 * np.conj(s1) * p2 * s2
                    + k2 * np.conj(i2) * i1 * p2)
    out[Mode.I1] = (-params.gamma_b * i1
                    + k1 * np.conj(s1) * p1 * p2
                    - k2 * np.conj(p2) * p1 * i2)
    out[Mode.S1] = (-params.gamma_b * s1
                    + k1 * np.conj(i1) * p1 * p2
                    - k3 * np.conj(p1) * p2 * s2)
    out[Mode.I2] = -params.gamma_c * i2 + k2 * np.conj(p1) * p2 * i1
    out[Mode.S2] = -params.gamma_c * s2 + k3 * np.conj(p2) * p1 * s1
    return out


def _converted_state(params: SystemParams, a_a: float, branch: Branch,
                     regime: Regime) -> SteadyState:
    # Radicand is non-negative whenever eps exceeds the branch threshold;
    # tolerate rounding dust, anything beyond that is an internal error.
    radicand = (params.epsilon - params.gamma_a * a_a) / (params.k1 * a_a)
    if radicand < 0.0:
        if radicand > -1e-12 * (1.0 + abs(params.epsilon)):
            radicand = 0.0
        else:
            raise NumericalError(
                f"negative radicand {radicand!r} for branch {branch.value}; "
                "operating point inconsistent with its regime"
            )
    a_b = math.sqrt(radicand)
    a_c = params.k2 * a_a**2 * a_b / params.gamma_c
    amps = np.array([a_a, a_a, a_b, a_b, a_c, a_c])
    return SteadyState(amplitudes=amps, branch=branch, regime=regime)


def analytic_steady_states(params: SystemParams) -> list[SteadyState]:
    """All closed-form stationary solutions for the current regime.

    Returns
    -------
    list of SteadyState
        Below threshold (or without one): the trivial pumps-only solution.
        Between the thresholds: the single converted branch.
        Above the upper threshold: the lower and upper branches, in that
        order.  Each branch computes A_b, A_c from its own A_a.
    """
    thresholds = compute_thresholds(params)
    regime = classify_regime(params, thresholds)
    if regime in (Regime.NO_THRESHOLD, Regime.BELOW_THRESHOLD):
        a_a = params.epsilon / params.gamma_a
        amps = np.array([a_a, a_a, 0.0, 0.0, 0.0, 0.0])
        return [SteadyState(amplitudes=amps, branch=Branch.TRIVIAL, regime=regime)]
    lower = _converted_state(params, thresholds.eps_th / params.gamma_a,
                             Branch.LOWER, regime)
    if regime is Regime.BETWEEN_THRESHOLDS:
        return [lower]
    upper = _converted_state(params, thresholds.eps_th_prime / params.gamma_a,
                             Branch.UPPER, regime)
    return [lower, upper]


def state_for_branch(params: SystemParams, branch: Branch | str) -> SteadyState:
    """The analytic steady state of one branch, if the regime provides it."""
    want = Branch(branch) if not isinstance(branch, Branch) else branch
    states = analytic_steady_states(params)
    for state in states:
        if state.branch is want:
            return state
    available = ", ".join(s.branch.value for s in states)
    raise ParameterError(
        f"branch {want.value!r} does not exist in regime {states[0].regime.value} "
        f"(available: {available})"
    )


@dataclass(frozen=True)
class RelaxationResult:
    """Outcome of one relaxation run.

    ``status`` is "converged", "timeout" or "diverged".  ``matched`` holds the
    analytic branch whose amplitude moduli lie nearest the endpoint, provided
    the distance falls within the match radius; None otherwise.
    """

    status: str
    amplitudes: np.ndarray
    residual: float
    elapsed: float
    matched: SteadyState | None
    distance: float


def _rhs_real(params: SystemParams):
    # Integrate the 12 real components rather than relying on complex
    # support in the stepper; u = (Re alpha, Im alpha).
    def rhs(t, u):
        a = u[:6] + 1j * u[6:]
        f = drift(params, a)
        return np.concatenate([f.real, f.imag])

    return rhs


def _match_branch(params: SystemParams, endpoint: np.ndarray, match_radius: float):
    candidates = sorted(analytic_steady_states(params), key=lambda s: s.a_a)
    moduli = np.abs(endpoint)
    best = None
    best_dist = math.inf
    for cand in candidates:  # sorted by A_a, so ties resolve to the smaller
        dist = float(np.max(np.abs(moduli - cand.amplitudes)))
        if dist < best_dist:
            best, best_dist = cand, dist
    if best is not None and best_dist <= match_radius:
        return best, best_dist
    return None, best_dist


def relax_to_steady_state(
    params: SystemParams,
    initial: np.ndarray,
    t_max: float = 1e5,
    tol: float = 1e-9,
    divergence_bound: float = 1e4,
    match_radius: float = 1e-6,
) -> RelaxationResult:
    """Integrate the amplitude equations until they stop moving.

    Runs an adaptive high-order Runge-Kutta integration of the full complex
    equations from ``initial`` until the drift infinity-norm falls below
    ``tol`` (converged), the state norm exceeds ``divergence_bound``
    (diverged), or ``t_max`` is reached (timeout; reported, not raised).

    The generated pairs carry a free relative phase, so branch matching
    compares amplitude moduli against the closed-form branches; an endpoint
    counts as matched when the moduli agree within ``match_radius``.
    """
    a0 = np.asarray(initial, dtype=complex)
    if a0.shape != (6,):
        raise ParameterError(f"initial must have shape (6,), got {a0.shape}")
    if tol <= 0.0 or t_max <= 0.0 or divergence_bound <= 0.0:
        raise ParameterError("tol, t_max and divergence_bound must be > 0")

    rhs = _rhs_real(params)

    def converged(t, u):
        a = u[:6] + 1j * u[6:]
        return float(np.max(np.abs(drift(params, a)))) - tol

    converged.terminal = True
    converged.direction = -1

    def diverged(t, u):
        a = u[:6] + 1j * u[6:]
        return float(np.max(np.abs(a))) - divergence_bound

    diverged.terminal = True
    diverged.direction = 1

    u0 = np.concatenate([a0.real, a0.imag])
    sol = solve_ivp(rhs, (0.0, t_max), u0, method="DOP853",
                    rtol=1e-9, atol=1e-12, events=(converged, diverged))
    if not sol.success:
        raise NumericalError(f"relaxation integrator failed: {sol.message}")
    u_end = sol.y[:, -1]
    a_end = u_end[:6] + 1j * u_end[6:]
    residual = float(np.max(np.abs(drift(params, a_end))))
    elapsed = float(sol.t[-1])

    if sol.t_events[1].size > 0:
        return RelaxationResult("diverged", a_end, residual, elapsed, None, math.inf)
    if sol.t_events[0].size == 0 and residual >= tol:
        return RelaxationResult("timeout", a_end, residual, elapsed, None, math.inf)
    matched, distance = _match_branch(params, a_end, match_radius)
    return RelaxationResult("converged", a_end, residual, elapsed, matched, distance)


def sample_initial_conditions(
    params: SystemParams, count: int, seed: int, scale: float | None = None
) -> np.ndarray:
    """Complex Gaussian initial conditions sized to the stationary amplitudes."""
    if scale is None:
        states = analytic_steady_states(params)
        scale = 2.0 * max(float(np.max(s.amplitudes)) for s in states)
        if scale == 0.0:
            scale = 1.0
    rng = np.random.default_rng(seed)
    return scale * (rng.standard_normal((count, 6)) + 1j * rng.standard_normal((count, 6)))


def basin_statistics(
    params: SystemParams,
    count: int,
    seed: int,
    tol: float = 1e-10,
    t_max: float = 1e5,
    scale: float | None = None,
    match_radius: float = 1e-6,
) -> dict:
    """Relax ``count`` random initial conditions and tally the endpoints.

    Returns a dict with one entry per branch name plus "unmatched",
    "timeout" and "diverged".  The tallies are empirical properties of this
    ensemble only; nothing here claims a physical branch-selection law.
    """
    tallies = {b.value: 0 for b in Branch}
    tallies.update(unmatched=0, timeout=0, diverged=0)
    for a0 in sample_initial_conditions(params, count, seed, scale):
        result = relax_to_steady_state(
            params, a0, t_max=t_max, tol=tol, match_radius=match_radius
        )
        if result.status != "converged":
            tallies[result.status] += 1
        elif result.matched is None:
            tallies["unmatched"] += 1
        else:
            tallies[result.matched.branch.value] += 1
    return tallies
