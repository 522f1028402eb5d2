"""Linearized fluctuation dynamics around a stationary point.

Writing alpha = A + delta_alpha and keeping first order gives a linear
Langevin system for the stacked fluctuation vector
(delta_alpha, delta_alpha*):

    d(delta)/dt = -M delta + B eta,   B B^T = D,

with M the negative Jacobian of the doubled drift and D the diffusion
matrix of the P-representation Fokker-Planck equation.  Both inherit the
conjugation block structure

    M = [[m1, m2], [m2*, m1*]],    D = [[d, 0], [0, d*]].

``build_drift_matrix`` differentiates the drift analytically; it also
rebuilds the textbook symmetric-working-point expressions for m1 and m2 and
logs any entry where the two disagree (the Jacobian wins).  ``d`` comes
straight from the second-derivative terms of the Fokker-Planck equation;
it is symmetric but in general indefinite, which is why B may be complex.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_continuous_lyapunov

from .errors import NumericalError, StabilityError, StaleSteadyStateError
from .params import Mode, SystemParams
from .steady_state import SteadyState, drift

logger = logging.getLogger(__name__)

P2, P1, I1, S1, I2, S2 = (int(m) for m in Mode)

_STALE_RESIDUAL = 1e-8
_MARGIN_INDETERMINATE = 1e-10


@dataclass(frozen=True)
class FluctuationModel:
    """Drift matrix, diffusion matrix and the operating point they describe."""

    params: SystemParams
    steady_state: SteadyState
    m: np.ndarray
    d: np.ndarray


@dataclass(frozen=True)
class StabilityReport:
    """Spectral stability of the fluctuation drift matrix.

    ``margin`` is min(Re eig(M)); the linearized dynamics decay iff it is
    positive.  ``indeterminate`` flags margins within 1e-10 of zero, where
    roundoff decides the sign.
    """

    eigenvalues: np.ndarray
    stable: bool
    margin: float
    indeterminate: bool


def jacobian_blocks(params: SystemParams, alpha: np.ndarray):
    """Blocks m1 = -df/dalpha and m2 = -df/dalpha* at arbitrary amplitudes.

    Entry (i, j) of m1 is minus the derivative of drift row i with respect
    to alpha_j; m2 differentiates with respect to alpha_j*.  Valid at any
    complex alpha, not only stationary points.
    """
    a = np.asarray(alpha, dtype=complex)
    p2, p1, i1, s1, i2, s2 = a
    k1, k2, k3 = params.k1, params.k2, params.k3
    ga, gb, gc = params.gamma_a, params.gamma_b, params.gamma_c
    c = np.conj

    m1 = np.zeros((6, 6), dtype=complex)
    m2 = np.zeros((6, 6), dtype=complex)

    m1[P2, P2] = ga
    m1[P2, P1] = k2 * c(i1) * i2 - k3 * c(s2) * s1
    m1[P2, I1] = k1 * c(p1) * s1
    m1[P2, S1] = k1 * c(p1) * i1 - k3 * c(s2) * p1
    m1[P2, I2] = k2 * c(i1) * p1
    m2[P2, P1] = k1 * s1 * i1
    m2[P2, I1] = k2 * p1 * i2
    m2[P2, S2] = -k3 * s1 * p1

    m1[P1, P2] = k3 * c(s1) * s2 - k2 * c(i2) * i1
    m1[P1, P1] = ga
    m1[P1, I1] = k1 * c(p2) * s1 - k2 * c(i2) * p2
    m1[P1, S1] = k1 * c(p2) * i1
    m1[P1, S2] = k3 * c(s1) * p2
    m2[P1, P2] = k1 * s1 * i1
    m2[P1, S1] = k3 * p2 * s2
    m2[P1, I2] = -k2 * i1 * p2

    m1[I1, P2] = -k1 * c(s1) * p1
    m1[I1, P1] = -k1 * c(s1) * p2 + k2 * c(p2) * i2
    m1[I1, I1] = gb
    m1[I1, I2] = k2 * c(p2) * p1
    m2[I1, P2] = k2 * p1 * i2
    m2[I1, S1] = -k1 * p1 * p2

    m1[S1, P2] = -k1 * c(i1) * p1 + k3 * c(p1) * s2
    m1[S1, P1] = -k1 * c(i1) * p2
    m1[S1, S1] = gb
    m1[S1, S2] = k3 * c(p1) * p2
    m2[S1, P1] = k3 * p2 * s2
    m2[S1, I1] = -k1 * p1 * p2

    m1[I2, P2] = -k2 * c(p1) * i1
    m1[I2, I1] = -k2 * c(p1) * p2
    m1[I2, I2] = gc
    m2[I2, P1] = -k2 * p2 * i1

    m1[S2, P1] = -k3 * c(p2) * s1
    m1[S2, S1] = -k3 * c(p2) * p1
    m1[S2, S2] = gc
    m2[S2, P2] = -k3 * p1 * s1

    return m1, m2


def reference_drift_blocks(params: SystemParams, ss: SteadyState):
    """m1, m2 re-derived independently for a symmetric working point.

    Assumes real amplitudes with A_p1 = A_p2 = A_a, A_i1 = A_s1 = A_b,
    A_i2 = A_s2 = A_c and k2 = k3.  Used only to cross-check the general
    Jacobian, never as the primary construction.
    """
    aa, ab, ac = ss.a_a, ss.a_b, ss.a_c
    ga, gb, gc = params.gamma_a, params.gamma_b, params.gamma_c
    k1, k2 = params.k1, params.k2
    kab = k1 * aa * ab
    kac = k2 * aa * ac
    kcb = k2 * aa * ab
    m1 = np.array([
        [ga, 0.0, kab, kab - kac, kcb, 0.0],
        [0.0, ga, kab - kac, kab, 0.0, kcb],
        [-kab, -kab + kac, gb, 0.0, k2 * aa**2, 0.0],
        [-kab + kac, -kab, 0.0, gb, 0.0, k2 * aa**2],
        [-kcb, 0.0, -k2 * aa**2, 0.0, gc, 0.0],
        [0.0, -kcb, 0.0, -k2 * aa**2, 0.0, gc],
    ])
    m2 = np.array([
        [0.0, k1 * ab**2, kac, 0.0, 0.0, -kcb],
        [k1 * ab**2, 0.0, 0.0, kac, -kcb, 0.0],
        [kac, 0.0, 0.0, -k1 * aa**2, 0.0, 0.0],
        [0.0, kac, -k1 * aa**2, 0.0, 0.0, 0.0],
        [0.0, -kcb, 0.0, 0.0, 0.0, 0.0],
        [-kcb, 0.0, 0.0, 0.0, 0.0, 0.0],
    ])
    return m1, m2


def _require_stationary(params: SystemParams, ss: SteadyState):
    residual = float(np.max(np.abs(drift(params, ss.alpha()))))
    if residual > _STALE_RESIDUAL:
        raise StaleSteadyStateError(
            f"state is not stationary for these parameters "
            f"(drift residual {residual:.3e} > {_STALE_RESIDUAL:.0e}); "
            "rebuild the steady state after changing params"
        )


def build_drift_matrix(params: SystemParams, ss: SteadyState) -> np.ndarray:
    """12x12 fluctuation drift matrix M at a stationary point.

    Derived from the analytic Jacobian of the drift; the independent
    symmetric-point expressions are recomputed alongside and any
    disagreement is logged (the Jacobian governs).  Real at real
    amplitudes, returned as float64 then.
    """
    _require_stationary(params, ss)
    m1, m2 = jacobian_blocks(params, ss.alpha())

    ref1, ref2 = reference_drift_blocks(params, ss)
    scale = 1.0 + max(np.max(np.abs(m1)), np.max(np.abs(m2)))
    dev = max(np.max(np.abs(m1 - ref1)), np.max(np.abs(m2 - ref2)))
    if dev > 1e-12 * scale:
        logger.warning(
            "reference drift blocks disagree with the Jacobian by %.3e "
            "(max entry); using the Jacobian", dev,
        )

    m = np.block([[m1, m2], [np.conj(m2), np.conj(m1)]])
    if np.max(np.abs(m.imag)) == 0.0:
        return m.real
    return m


def build_diffusion_matrix(params: SystemParams, ss: SteadyState) -> np.ndarray:
    """12x12 diffusion matrix D = [[d, 0], [0, d*]] at a stationary point.

    The 6x6 block d collects the second-derivative coefficients of the
    Fokker-Planck equation; its only nonzero entries sit on the mode pairs
    created or annihilated together by one of the three processes.
    """
    _require_stationary(params, ss)
    a = ss.alpha()
    p2, p1, i1, s1, i2, s2 = a
    k1, k2, k3 = params.k1, params.k2, params.k3

    d = np.zeros((6, 6), dtype=complex)
    d[P2, P1] = -k1 * s1 * i1
    d[P2, I1] = -k2 * i2 * p1
    d[P2, S2] = k3 * s1 * p1
    d[P1, S1] = -k3 * s2 * p2
    d[P1, I2] = k2 * i1 * p2
    d[I1, S1] = k1 * p1 * p2
    d = d + d.T

    zero = np.zeros((6, 6), dtype=complex)
    return np.block([[d, zero], [zero, np.conj(d)]])


def build_fluctuation_model(params: SystemParams, ss: SteadyState) -> FluctuationModel:
    """Bundle M and D for one operating point."""
    return FluctuationModel(
        params=params,
        steady_state=ss,
        m=build_drift_matrix(params, ss),
        d=build_diffusion_matrix(params, ss),
    )


def stability(m: np.ndarray) -> StabilityReport:
    """Eigenvalue stability of the drift matrix (decay iff margin > 0)."""
    eigenvalues = np.linalg.eigvals(np.asarray(m))
    margin = float(np.min(eigenvalues.real))
    return StabilityReport(
        eigenvalues=eigenvalues,
        stable=margin > 0.0,
        margin=margin,
        indeterminate=abs(margin) < _MARGIN_INDETERMINATE,
    )


def stationary_covariance(model: FluctuationModel) -> np.ndarray:
    """Stationary second moments Sigma with M Sigma + Sigma M^T = D.

    Solves the continuous Lyapunov equation for the unconjugated moments
    <delta delta^T> of the stacked fluctuation vector.  Requires a stable
    drift matrix; the residual of the returned solution is verified.
    """
    report = stability(model.m)
    if not report.stable or report.indeterminate:
        raise StabilityError(
            f"no stationary covariance: drift matrix margin {report.margin:.3e} "
            "is not decisively positive",
            margin=report.margin,
        )
    # M is real here, so scipy's A X + X A^H = Q is the wanted transpose form.
    sigma = solve_continuous_lyapunov(model.m, model.d)
    residual = np.max(np.abs(model.m @ sigma + sigma @ model.m.T - model.d))
    budget = 1e-10 * max(np.max(np.abs(model.d)), 1e-300)
    if residual > max(budget, 1e-14):
        raise NumericalError(
            f"Lyapunov solve residual {residual:.3e} exceeds budget {budget:.3e}"
        )
    return sigma
