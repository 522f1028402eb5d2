"""Multipartite entanglement witnesses on the output spectra.

Five combination inequalities certify genuine six-partite entanglement:
each bounds the sum of an X-difference (or sum) variance and a gain-dressed
Y-combination variance by 4 for any separable state,

    V(X_i +- X_j) + V(sum_k h_k Y_k) >= 4,

with two of the Y coefficients fixed at +-1 and the remaining four free
gains minimized over.  Violating any one inequality at some analysis
frequency certifies the corresponding partition structure.

The five inequalities fall into three symmetry classes (A, B, C) that are
exactly degenerate at the symmetric working point; the sweep helpers
evaluate every requested inequality so that degeneracy can be verified
rather than assumed.  Gain optimization is a linear-algebra problem: the
variance is a convex quadratic in the gains, so the optimum solves a 4x4
normal system, with the minimum-norm solution taken when that system is
singular.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, PhysicalityError
from .linearization import FluctuationModel, build_fluctuation_model
from .params import MODE_LABELS, SystemParams
from .spectra import QuadratureSpectrum, output_spectrum, quadrature_transform, spectral_matrix
from .steady_state import Branch, state_for_branch

_PSD_TOLERANCE = -1e-9
_SINGULAR_RCOND = 1e-12


@dataclass(frozen=True)
class VlfInequality:
    """One combination inequality: coefficients and its symmetry class.

    ``x_coeffs`` holds the +-1 coefficients of the X combination,
    ``y_fixed`` the +-1 coefficients pinned in the Y combination; the four
    remaining modes listed in ``free_modes`` carry optimizable gains.
    """

    label: str
    symmetry_class: str
    x_coeffs: tuple
    y_fixed: tuple
    free_modes: tuple

    def __post_init__(self):
        x = np.array(self.x_coeffs, dtype=float)
        y = np.array(self.y_fixed, dtype=float)
        if x.shape != (6,) or y.shape != (6,):
            raise ParameterError("coefficient vectors must have length 6")
        x_support = set(np.flatnonzero(x).tolist())
        y_support = set(np.flatnonzero(y).tolist())
        if len(x_support) != 2 or x_support != y_support:
            raise ParameterError(
                f"{self.label}: fixed Y coefficients must sit on the X pair"
            )
        if set(self.free_modes) != set(range(6)) - x_support:
            raise ParameterError(f"{self.label}: free modes must complement the X pair")
        if sorted(self.free_modes) != list(self.free_modes):
            raise ParameterError(f"{self.label}: free modes must be ascending")

    def free_mode_labels(self) -> tuple:
        return tuple(MODE_LABELS[i] for i in self.free_modes)


# Note the fourth inequality fixes -Y_p2 while the fifth fixes +Y_p2.
INEQUALITIES = (
    VlfInequality("i2-p1", "C", (0, -1, 0, 0, 1, 0), (0, 1, 0, 0, 1, 0), (0, 2, 3, 5)),
    VlfInequality("p1+s1", "B", (0, 1, 0, 1, 0, 0), (0, 1, 0, -1, 0, 0), (0, 2, 4, 5)),
    VlfInequality("s1-i1", "A", (0, 0, -1, 1, 0, 0), (0, 0, 1, 1, 0, 0), (0, 1, 4, 5)),
    VlfInequality("i1+p2", "B", (1, 0, 1, 0, 0, 0), (-1, 0, 1, 0, 0, 0), (1, 3, 4, 5)),
    VlfInequality("p2-s2", "C", (1, 0, 0, 0, 0, -1), (1, 0, 0, 0, 0, 1), (1, 2, 3, 4)),
)

SYMMETRY_CLASSES = ("A", "B", "C")


def inequality_by_label(label: str) -> VlfInequality:
    for ineq in INEQUALITIES:
        if ineq.label == label:
            return ineq
    known = ", ".join(i.label for i in INEQUALITIES)
    raise ParameterError(f"unknown inequality {label!r} (known: {known})")


def class_members(symmetry_class: str) -> tuple:
    members = tuple(i for i in INEQUALITIES if i.symmetry_class == symmetry_class)
    if not members:
        raise ParameterError(f"unknown symmetry class {symmetry_class!r}")
    return members


@dataclass(frozen=True)
class VlfResult:
    """An inequality value (optimized or not) at one analysis frequency."""

    label: str
    symmetry_class: str
    omega: float
    omega_norm: float
    value: float
    gains: np.ndarray
    free_modes: tuple

    @property
    def violated(self) -> bool:
        """True when the separability bound 4 is beaten."""
        return self.value < 4.0


def _stacked_vectors(ineq: VlfInequality, gains: np.ndarray):
    a = np.zeros(12)
    a[:6] = ineq.x_coeffs
    b = np.zeros(12)
    b[6:] = ineq.y_fixed
    b[6 + np.array(ineq.free_modes)] = gains
    return a, b


def evaluate_inequality(ineq: VlfInequality, spectrum: QuadratureSpectrum,
                        gains: np.ndarray) -> float:
    """Left-hand side V(X combo) + V(Y combo) for explicit gains.

    Both variances are full quadratic forms over the stacked 12-component
    quadrature vector, so any X-Y cross correlations would contribute;
    nothing here assumes the block structure of v_out.
    """
    gains = np.asarray(gains, dtype=float)
    if gains.shape != (len(ineq.free_modes),):
        raise ParameterError(
            f"{ineq.label}: expected {len(ineq.free_modes)} gains, got {gains.shape}"
        )
    v = spectrum.v_out
    a, b = _stacked_vectors(ineq, gains)
    return float(a @ v @ a + b @ v @ b)


def _require_physical(v: np.ndarray):
    min_eig = float(np.min(np.linalg.eigvalsh((v + v.T) / 2.0)))
    if min_eig < _PSD_TOLERANCE:
        raise PhysicalityError(
            f"output spectrum is not positive semidefinite "
            f"(min eigenvalue {min_eig:.3e})"
        )


def optimize_gains(ineq: VlfInequality, spectrum: QuadratureSpectrum) -> VlfResult:
    """Minimize the inequality value over its four free gains.

    The Y variance is convex quadratic in the gains, so the optimum solves
    (E^T V E) g = -E^T V b0 with E the embedding of the free positions.
    ``lstsq`` provides the minimum-norm solution when the normal matrix is
    singular to within 1e-12 relative.
    """
    v = spectrum.v_out
    _require_physical(v)
    free = 6 + np.array(ineq.free_modes)
    b0 = np.zeros(12)
    b0[6:] = ineq.y_fixed
    normal = v[np.ix_(free, free)]
    rhs = -(v @ b0)[free]
    gains, *_ = np.linalg.lstsq(normal, rhs, rcond=_SINGULAR_RCOND)
    value = evaluate_inequality(ineq, spectrum, gains)
    return VlfResult(
        label=ineq.label,
        symmetry_class=ineq.symmetry_class,
        omega=spectrum.omega,
        omega_norm=spectrum.omega_norm,
        value=value,
        gains=gains,
        free_modes=ineq.free_modes,
    )


def _resolve_inequalities(inequalities):
    if inequalities is None:
        return INEQUALITIES
    resolved = []
    for item in inequalities:
        resolved.append(item if isinstance(item, VlfInequality)
                        else inequality_by_label(item))
    return tuple(resolved)


def build_branch_model(params: SystemParams, branch: Branch | str,
                       zero_diffusion: bool = False) -> FluctuationModel:
    """Fluctuation model at one analytic branch.

    ``zero_diffusion`` substitutes D = 0, which turns every output spectrum
    into plain shot noise; useful as a pipeline null test.
    """
    model = build_fluctuation_model(params, state_for_branch(params, branch))
    if zero_diffusion:
        model = FluctuationModel(
            params=model.params,
            steady_state=model.steady_state,
            m=model.m,
            d=np.zeros_like(model.d),
        )
    return model


def _spectrum_at(model: FluctuationModel, omega_norm: float) -> QuadratureSpectrum:
    omega = omega_norm * model.params.gamma_a
    v_intra = quadrature_transform(spectral_matrix(model, omega))
    return output_spectrum(v_intra, model.params, omega)


def sweep_frequency(
    params: SystemParams,
    branch: Branch | str,
    inequalities=None,
    omega_grid=None,
    zero_diffusion: bool = False,
    model: FluctuationModel | None = None,
) -> list:
    """Optimize each inequality over a grid of omega / gamma_a.

    Returns a flat list of VlfResult ordered by frequency, then by the
    declaration order of INEQUALITIES.  ``omega_grid`` defaults to 400
    logarithmic points on [0.01, 100].
    """
    ineqs = _resolve_inequalities(inequalities)
    if omega_grid is None:
        omega_grid = np.geomspace(0.01, 100.0, 400)
    if model is None:
        model = build_branch_model(params, branch, zero_diffusion)
    results = []
    for omega_norm in np.asarray(omega_grid, dtype=float):
        spectrum = _spectrum_at(model, omega_norm)
        for ineq in ineqs:
            results.append(optimize_gains(ineq, spectrum))
    return results


def _golden_section(f, lo, hi, xtol):
    # Standard golden-section descent; one function evaluation per step.
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    while (hi - lo) > xtol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def min_over_frequency(
    params: SystemParams,
    branch: Branch | str,
    inequality,
    omega_range=(0.01, 100.0),
    coarse_points: int = 64,
    scale: str = "log",
    xtol: float = 1e-6,
    zero_diffusion: bool = False,
    model: FluctuationModel | None = None,
) -> VlfResult:
    """Global minimum of one optimized inequality over a frequency window.

    Scans a coarse grid, then refines the best bracket by golden section to
    ``xtol`` in omega / gamma_a.  A minimum on the window edge is refined
    within the outermost cell and can land on the edge itself.
    """
    ineq = (inequality if isinstance(inequality, VlfInequality)
            else inequality_by_label(inequality))
    lo, hi = float(omega_range[0]), float(omega_range[1])
    if not (0.0 < lo < hi):
        raise ParameterError(f"invalid omega_range {omega_range!r}")
    if coarse_points < 3:
        raise ParameterError("coarse_points must be at least 3")
    if model is None:
        model = build_branch_model(params, branch, zero_diffusion)
    if scale == "log":
        grid = np.geomspace(lo, hi, coarse_points)
    elif scale == "linear":
        grid = np.linspace(lo, hi, coarse_points)
    else:
        raise ParameterError(f"scale must be 'log' or 'linear', got {scale!r}")

    def value_at(omega_norm):
        return optimize_gains(ineq, _spectrum_at(model, omega_norm)).value

    values = np.array([value_at(w) for w in grid])
    best = int(np.argmin(values))
    left = grid[max(best - 1, 0)]
    right = grid[min(best + 1, coarse_points - 1)]
    w_ref, v_ref = _golden_section(value_at, float(left), float(right), xtol)
    w_min = w_ref if v_ref <= values[best] else float(grid[best])
    return optimize_gains(ineq, _spectrum_at(model, w_min))
