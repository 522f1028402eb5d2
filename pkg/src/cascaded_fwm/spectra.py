"""Fluctuation spectra in the amplitude and quadrature bases.

The linear Langevin system has the two-sided spectral matrix

    S(omega) = (M + i omega I)^-1 D (M^T - i omega I)^-1,

computed here with linear solves rather than explicit inverses.  The
amplitude quadratures X = a + a*, Y = -i (a - a*) (so [X, Y] = 2i and the
vacuum variance is 1) are reached through the fixed block transform

    T = [[I, I], [-i I, i I]],    V(omega) = T S(omega) T^T,

and the measurable output spectra follow from the input-output relation

    v_out(omega) = I + 2 G^(1/2) V(omega) G^(1/2),

with G the diagonal matrix of mode damping rates (each repeated for X and
Y).  ``integrated_spectrum`` closes the loop back to the stationary
covariance: (1/2pi) Integral S d omega over the real line equals the
Lyapunov solution, which the tests use as a cross-module identity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .errors import BasisConsistencyError, NumericalError, StabilityError
from .linearization import FluctuationModel, stability
from .params import MODE_LABELS, SystemParams

logger = logging.getLogger(__name__)

QUADRATURE_LABELS = tuple(f"X{m}" for m in MODE_LABELS) + tuple(
    f"Y{m}" for m in MODE_LABELS
)

_RESIDUE_BUDGET = 1e-9
_SOLVE_BUDGET = 1e-8


def quadrature_basis_matrix() -> np.ndarray:
    """The 12x12 block transform T mapping (alpha, alpha*) to (X, Y)."""
    eye = np.eye(6)
    return np.block([[eye, eye], [-1j * eye, 1j * eye]])


@dataclass(frozen=True)
class QuadratureSpectrum:
    """Output quadrature spectral matrix at one analysis frequency.

    ``omega`` is absolute (same inverse-time unit as the damping rates);
    ``omega_norm`` is the externally reported omega / gamma_a.  ``v_out``
    is real symmetric in the (X_p2..X_s2, Y_p2..Y_s2) basis with vacuum
    normalized to the identity.
    """

    omega: float
    omega_norm: float
    v_out: np.ndarray


def spectral_matrix(model: FluctuationModel, omega: float) -> np.ndarray:
    """Two-sided spectral matrix S(omega) of the stacked fluctuations.

    Evaluated by solving (M + i omega) X = D and then (M - i omega) S^T =
    X^T; never by explicit inversion.  For a strictly decaying drift matrix
    this is the stationary spectrum of the fluctuation process.  Every
    converted operating point carries an exactly neutral mode (the free
    phase shared by the converted pairs), and the branches kept above the
    upper threshold have growing directions as well, so there the formula
    is evaluated in the same formal sense in which those spectra are
    usually reported; solve quality is guarded by a residual check instead
    of a stability gate.
    """
    m = model.m
    eye = np.eye(m.shape[0])
    lhs = m + 1j * omega * eye
    x = np.linalg.solve(lhs, model.d)
    residual = float(np.max(np.abs(lhs @ x - model.d)))
    scale = 1.0 + float(np.max(np.abs(model.d)))
    if residual > _SOLVE_BUDGET * scale * (1.0 + float(np.max(np.abs(x)))):
        raise NumericalError(
            f"ill-conditioned spectral solve at omega={omega!r}: "
            f"residual {residual:.3e}")
    return np.linalg.solve(m - 1j * omega * eye, x.T).T


def quadrature_transform(s: np.ndarray) -> np.ndarray:
    """Map an amplitude-basis spectral matrix into quadrature variances.

    Returns the real symmetric part of T s T^T.  At a real operating point
    the transform is Hermitian up to roundoff; the discarded residue is
    checked against a 1e-9 budget and reported at debug level.  The odd
    (imaginary antisymmetric) component carries cross-quadrature phase
    information that never enters a variance and is dropped by convention.
    """
    t = quadrature_basis_matrix()
    v = t @ np.asarray(s, dtype=complex) @ t.T
    scale = 1.0 + float(np.max(np.abs(v)))
    hermitian_residue = float(np.max(np.abs(v - v.conj().T))) / 2.0
    if hermitian_residue > _RESIDUE_BUDGET * scale:
        raise BasisConsistencyError(
            f"quadrature spectrum not Hermitian: residue {hermitian_residue:.3e} "
            f"exceeds {_RESIDUE_BUDGET:.0e} * {scale:.3e}"
        )
    logger.debug("quadrature transform residue %.3e (scale %.3e)",
                 hermitian_residue, scale)
    sym = (v + v.T) / 2.0
    return sym.real.copy()


def output_spectrum(v_intra: np.ndarray, params: SystemParams, omega: float) -> QuadratureSpectrum:
    """Input-output transformed spectrum, vacuum (shot noise) at identity."""
    gains = np.sqrt(np.tile(params.damping_rates(), 2))
    v_out = np.eye(12) + 2.0 * gains[:, None] * np.asarray(v_intra) * gains[None, :]
    return QuadratureSpectrum(
        omega=float(omega),
        omega_norm=float(omega) / params.gamma_a,
        v_out=v_out,
    )


def output_spectrum_at(model: FluctuationModel, omega: float) -> QuadratureSpectrum:
    """Convenience chain: spectral matrix -> quadratures -> output."""
    s = spectral_matrix(model, omega)
    return output_spectrum(quadrature_transform(s), model.params, omega)


def integrated_spectrum(model: FluctuationModel, half_width: float | None = None) -> np.ndarray:
    """(1/2pi) Integral of S(omega) over the real line, by quadrature.

    Integrates adaptively over [-W, W] (folded onto [0, W] since
    S(-omega) = S(omega)* at a real operating point) and adds the leading
    asymptotic tail D / (pi W); the remaining truncation error is O(W^-3).
    With the default W = 1e3 gamma_a this reproduces the Lyapunov
    stationary covariance to well below 1e-6.
    """
    report = stability(model.m)
    if not report.stable or report.indeterminate:
        # A marginal drift mode with nonzero diffusion makes S ~ 1/omega^2
        # near zero; the quadrature would silently miss the divergence.
        raise StabilityError(
            f"spectral integral needs a decisively decaying drift "
            f"(margin {report.margin:.3e})",
            margin=report.margin,
        )
    if half_width is None:
        half_width = 1e3 * model.params.gamma_a
    if half_width <= 0.0:
        raise NumericalError(f"half_width must be > 0, got {half_width!r}")
    if np.max(np.abs(model.d.imag)) > 1e-12 * (1.0 + np.max(np.abs(model.d))):
        raise NumericalError("integrated_spectrum assumes a real diffusion matrix")

    def integrand(w):
        return spectral_matrix(model, w).real

    value, err = quad_vec(integrand, 0.0, half_width,
                          epsabs=1e-10, epsrel=1e-10, norm="max")
    logger.debug("spectral integral quadrature error estimate %.3e", err)
    tail = model.d.real / (np.pi * half_width)
    return value / np.pi + tail
