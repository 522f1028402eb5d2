"""Stochastic simulation oracle for the linearized fluctuation dynamics.

Everything analytic in this package (Lyapunov covariances, spectral
matrices) can be cross-checked by brute force: factor the diffusion matrix
as D = B B^T, integrate

    d(delta) = -M delta dt + B dW

with Euler-Maruyama, and estimate covariances and spectra from the sample
paths.  D is symmetric but indefinite, so B is complex and the simulated
(delta_alpha, delta_alpha*) components are not pointwise conjugate; that is
a representation feature, and every comparison made here depends on B only
through B B^T.

Paths own deterministic random streams derived from (seed, path index), so
ensembles are reproducible and embarrassingly parallel in structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError, ParameterError, StabilityError, StepSizeError
from .linearization import FluctuationModel, stability

_FACTOR_BUDGET = 1e-10
_STEP_LIMIT = 0.1  # dt * max|eig(M)| must stay below this


def takagi(matrix: np.ndarray, rtol: float = 1e-12):
    """Symmetric (Autonne-Takagi) factorization a = u diag(sigma) u^T.

    Returns non-negative ``sigma`` (descending) and unitary ``u``.  Real
    symmetric input reduces to an eigendecomposition with an imaginary-unit
    phase absorbed into the columns for negative eigenvalues; general
    complex symmetric input goes through the SVD, fixing the left/right
    gauge blockwise on degenerate singular subspaces.
    """
    a = np.asarray(matrix)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ParameterError(f"matrix must be square, got {a.shape}")
    scale = max(float(np.max(np.abs(a))), 1.0)
    if np.max(np.abs(a - a.T)) > rtol * scale:
        raise ParameterError("matrix must be symmetric (a == a.T)")
    a = (a + a.T) / 2.0

    if not np.iscomplexobj(a) or np.max(np.abs(a.imag)) <= rtol * scale:
        eigenvalues, q = np.linalg.eigh(a.real)
        order = np.argsort(-np.abs(eigenvalues), kind="stable")
        eigenvalues, q = eigenvalues[order], q[:, order]
        phases = np.where(eigenvalues < 0.0, 1j, 1.0 + 0j)
        return np.abs(eigenvalues), q.astype(complex) * phases[None, :]

    v, sigma, wh = np.linalg.svd(a)
    w = wh.conj().T
    u = np.zeros((n, n), dtype=complex)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and sigma[stop] > (1.0 - 1e-8) * sigma[start]:
            stop += 1
        block = slice(start, stop)
        # On a degenerate singular subspace v^T w is unitary symmetric; its
        # principal square root rotates v onto a valid Takagi factor.
        z = v[:, block].T @ w[:, block]
        u[:, block] = v[:, block] @ np.conj(scipy.linalg.sqrtm(z))
        start = stop
    return sigma, u


@dataclass(frozen=True)
class NoiseFactor:
    """A noise coupling B with B B^T equal to the diffusion matrix."""

    b: np.ndarray
    residual: float


def factor_diffusion(d: np.ndarray) -> NoiseFactor:
    """Factor a (complex) symmetric diffusion matrix as D = B B^T.

    Any factor with the right outer product is acceptable; this one is
    B = u diag(sqrt(sigma)) from the Takagi factorization.  The residual
    ||B B^T - D||_max is checked against 1e-10 * (1 + ||D||_max).
    """
    d = np.asarray(d, dtype=complex)
    sigma, u = takagi(d)
    b = u * np.sqrt(sigma)[None, :]
    residual = float(np.max(np.abs(b @ b.T - d)))
    budget = _FACTOR_BUDGET * (1.0 + float(np.max(np.abs(d))))
    if residual > budget:
        raise NumericalError(
            f"diffusion factorization residual {residual:.3e} exceeds {budget:.3e}"
        )
    return NoiseFactor(b=b, residual=residual)


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Sampled fluctuation paths, shape (count, steps + 1, 12)."""

    paths: np.ndarray
    dt: float
    seed: int
    count: int


def _check_step(model: FluctuationModel, dt: float) -> None:
    report = stability(model.m)
    if not report.stable or report.indeterminate:
        raise StabilityError(
            f"will not simulate without a decisively decaying drift "
            f"(margin {report.margin:.3e})",
            margin=report.margin,
        )
    fastest = float(np.max(np.abs(report.eigenvalues)))
    if dt <= 0.0 or dt * fastest >= _STEP_LIMIT:
        raise StepSizeError(
            f"dt = {dt!r} too large: need dt * max|eig(M)| < {_STEP_LIMIT} "
            f"(max|eig| = {fastest:.3e})"
        )


def default_step(model: FluctuationModel) -> float:
    """Default Euler-Maruyama step, 0.01 / max|Re eig(M)|."""
    report = stability(model.m)
    return 0.01 / float(np.max(np.abs(report.eigenvalues.real)))


def _path_rng(seed: int, path_index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(path_index)])


def simulate_ou(
    model: FluctuationModel,
    steps: int,
    n_paths: int,
    seed: int,
    dt: float | None = None,
    noise: NoiseFactor | None = None,
    initial: np.ndarray | None = None,
) -> TrajectoryEnsemble:
    """Euler-Maruyama ensemble of the linear Langevin system.

    Every path starts from ``initial`` (default: the origin) and consumes
    its own random stream seeded by (seed, path index).  Requires a stable
    drift matrix and dt * max|eig(M)| < 0.1; the default step is
    0.01 / max|Re eig(M)|.
    """
    if dt is None:
        dt = default_step(model)
    _check_step(model, dt)
    if steps < 1 or n_paths < 1:
        raise ParameterError("steps and n_paths must be >= 1")
    if noise is None:
        noise = factor_diffusion(model.d)
    b = noise.b
    dim = model.m.shape[0]

    x = np.zeros((n_paths, dim), dtype=complex)
    if initial is not None:
        x[:] = np.asarray(initial, dtype=complex)
    paths = np.empty((n_paths, steps + 1, dim), dtype=complex)
    paths[:, 0, :] = x

    decay = np.eye(dim) - dt * model.m
    sqrt_dt = np.sqrt(dt)
    increments = np.empty((n_paths, steps, dim))
    for p in range(n_paths):
        increments[p] = _path_rng(seed, p).standard_normal((steps, dim))
    for t in range(steps):
        x = x @ decay.T + sqrt_dt * (increments[:, t, :] @ b.T)
        paths[:, t + 1, :] = x
    return TrajectoryEnsemble(paths=paths, dt=float(dt), seed=int(seed),
                              count=int(n_paths))


@dataclass(frozen=True)
class SpectrumEstimate:
    """Averaged cross-periodogram on a frequency grid.

    ``values[i]`` estimates the unconjugated spectral matrix at the FFT bin
    nearest the requested ``omega[i]`` (the bin center is ``omega_used[i]``);
    ``stderr`` combines the real and imaginary scatter across segments.
    """

    omega: np.ndarray
    omega_used: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    n_segments: int


def estimate_spectrum(
    ensemble: TrajectoryEnsemble,
    omegas,
    segment_length: int = 4096,
    skip: int = 0,
    window: str = "hann",
) -> SpectrumEstimate:
    """Welch-style estimate of S(omega) from sample paths.

    Splits each path (after dropping ``skip`` burn-in samples) into
    non-overlapping windowed segments and averages the cross-periodograms
    d t * F(omega) F(-omega)^T / sum(w**2), whose expectation is the
    two-sided spectral matrix in the e^{-i omega t} convention used by the
    analytic side.  The ensemble must be long enough that segments span
    several correlation times; that precondition is the caller's.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    dt = ensemble.dt
    nyquist = np.pi / dt
    if np.any(np.abs(omegas) > nyquist):
        raise ParameterError(
            f"requested |omega| exceeds the Nyquist frequency {nyquist:.3e}"
        )
    data = ensemble.paths[:, skip:, :]
    usable = data.shape[1]
    if segment_length < 8 or usable < segment_length:
        raise ParameterError(
            f"segment_length {segment_length} incompatible with "
            f"{usable} usable samples"
        )
    if window == "hann":
        w = np.hanning(segment_length)
    elif window == "boxcar":
        w = np.ones(segment_length)
    else:
        raise ParameterError(f"unknown window {window!r}")
    w_norm = float(np.sum(w**2))
    n_seg_per_path = usable // segment_length
    dim = data.shape[2]

    bins = np.mod(np.rint(omegas * segment_length * dt / (2.0 * np.pi)).astype(int),
                  segment_length)
    omega_used = bins * 2.0 * np.pi / (segment_length * dt)
    omega_used = np.where(omega_used > nyquist,
                          omega_used - 2.0 * np.pi / dt, omega_used)
    conj_bins = (-bins) % segment_length

    per_segment = []
    for p in range(ensemble.count):
        for s in range(n_seg_per_path):
            seg = data[p, s * segment_length:(s + 1) * segment_length, :]
            f = np.fft.fft(w[:, None] * seg, axis=0)
            est = dt * f[bins, :, None] * f[conj_bins, None, :] / w_norm
            per_segment.append(est)
    per_segment = np.array(per_segment)
    n_segments = per_segment.shape[0]
    if n_segments < 2:
        raise ParameterError("need at least two segments for error estimates")
    values = per_segment.mean(axis=0)
    var = per_segment.real.var(axis=0, ddof=1) + per_segment.imag.var(axis=0, ddof=1)
    stderr = np.sqrt(var / n_segments)
    return SpectrumEstimate(
        omega=omegas,
        omega_used=omega_used,
        values=values,
        stderr=stderr,
        n_segments=n_segments,
    )


def mc_stationary_covariance(
    model: FluctuationModel,
    n_paths: int = 64,
    seed: int = 0,
    dt: float | None = None,
    burn_in_time: float | None = None,
    average_time: float | None = None,
    noise: NoiseFactor | None = None,
    chunk: int = 2048,
):
    """Monte-Carlo estimate of the stationary moments <delta delta^T>.

    Streams the integration in chunks (nothing is stored per step), taking
    per-path time averages after a burn-in of several relaxation times.
    Returns (sigma_hat, stderr) where ``stderr`` combines real and
    imaginary scatter of the per-path averages.
    """
    if dt is None:
        dt = default_step(model)
    _check_step(model, dt)
    report = stability(model.m)
    relax_time = 1.0 / report.margin
    if burn_in_time is None:
        burn_in_time = 8.0 * relax_time
    if average_time is None:
        average_time = 50.0 * relax_time
    burn_steps = int(np.ceil(burn_in_time / dt))
    avg_steps = int(np.ceil(average_time / dt))
    if noise is None:
        noise = factor_diffusion(model.d)
    b = noise.b
    dim = model.m.shape[0]
    decay = np.eye(dim) - dt * model.m
    sqrt_dt = np.sqrt(dt)

    rngs = [_path_rng(seed, p) for p in range(n_paths)]
    x = np.zeros((n_paths, dim), dtype=complex)
    sums = np.zeros((n_paths, dim, dim), dtype=complex)
    counted = 0
    done = 0
    total = burn_steps + avg_steps
    while done < total:
        block = min(chunk, total - done)
        increments = np.stack(
            [rng.standard_normal((block, dim)) for rng in rngs]
        )
        for t in range(block):
            x = x @ decay.T + sqrt_dt * (increments[:, t, :] @ b.T)
            if done + t + 1 > burn_steps:
                sums += x[:, :, None] * x[:, None, :]
                counted += 1
        done += block
    per_path = sums / counted
    sigma_hat = per_path.mean(axis=0)
    var = per_path.real.var(axis=0, ddof=1) + per_path.imag.var(axis=0, ddof=1)
    stderr = np.sqrt(var / n_paths)
    return sigma_hat, stderr
