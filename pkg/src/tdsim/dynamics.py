"""Propagators for beta_dot = M beta with a time-independent generator.

Three independent routes are provided and must agree:

* :func:`rk4_propagate` -- classical fixed-step Runge-Kutta 4, the
  reference method (default dt = 0.01 in units of 1/gamma);
* :func:`eigen_solve`  -- spectral solution beta(t) = sum_i c_i V_i e^{l_i t},
  exact in time, default for moderate N;
* :func:`oracle_expm`  -- scaling-and-squaring matrix exponential with a
  truncated-series core, written independently of the other two and used
  only as a verification oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import FOCK, AmplitudeState
from .kernels import GeneratorMatrix

__all__ = [
    "Trajectory",
    "EigenSolution",
    "DegenerateSpectrumError",
    "rk4_propagate",
    "eigen_decompose",
    "eigen_solve",
    "oracle_expm",
    "record_indices",
]

EIGEN_COND_LIMIT = 1e12


class DegenerateSpectrumError(RuntimeError):
    """Raised when the eigenbasis is too ill-conditioned to solve with."""


@dataclass(frozen=True)
class Trajectory:
    """Time grid plus amplitude snapshots, row t -> beta(t)."""

    times: np.ndarray
    amplitudes: np.ndarray
    basis: str
    kernel: str | None = None
    solver: str = "unknown"
    dt: float | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        a = np.asarray(self.amplitudes, dtype=complex)
        if t.ndim != 1 or a.ndim != 2 or a.shape[0] != t.shape[0]:
            raise ValueError("times and amplitude snapshots must align")
        if t[0] != 0.0 or (t.size > 1 and np.any(np.diff(t) <= 0)):
            raise ValueError("times must be strictly increasing and start at 0")
        if not np.all(np.isfinite(a)):
            raise ValueError("trajectory snapshots must be finite")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "amplitudes", a)

    @property
    def n(self) -> int:
        return self.amplitudes.shape[1]

    def state(self, i: int) -> AmplitudeState:
        return AmplitudeState(self.amplitudes[i], self.basis)


@dataclass(frozen=True)
class EigenSolution:
    """Spectral data of a generator plus the initial-condition coefficients."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    coefficients: np.ndarray


def _resolve(generator, state0):
    """Accept GeneratorMatrix/AmplitudeState or raw arrays; check tags."""
    if isinstance(generator, GeneratorMatrix):
        matrix = generator.matrix
        g_basis, kernel = generator.basis, generator.kernel
    else:
        matrix = np.asarray(generator, dtype=complex)
        g_basis, kernel = None, None
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("generator must be a square matrix")
    if isinstance(state0, AmplitudeState):
        beta0 = state0.amplitudes
        s_basis = state0.basis
    else:
        beta0 = np.asarray(state0, dtype=complex).reshape(-1)
        s_basis = None
    if g_basis is not None and s_basis is not None and g_basis != s_basis:
        raise ValueError(
            f"basis mismatch: generator is {g_basis!r}, state is {s_basis!r}"
        )
    if beta0.shape[0] != matrix.shape[0]:
        raise ValueError(
            f"dimension mismatch: generator is {matrix.shape[0]}, state is {beta0.shape[0]}"
        )
    if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(beta0))):
        raise ValueError("generator and initial state must be finite")
    basis = g_basis or s_basis or FOCK
    return matrix, beta0, basis, kernel


def record_indices(n_steps: int, stride: int = 1) -> np.ndarray:
    """Step indices kept in a trajectory: every stride-th plus the last."""
    if stride < 1:
        raise ValueError("stride must be >= 1")
    idx = list(range(0, n_steps + 1, stride))
    if idx[-1] != n_steps:
        idx.append(n_steps)
    return np.asarray(idx, dtype=int)


def rk4_propagate(generator, state0, dt: float = 0.01, t_max: float = 10.0,
                  stride: int = 1) -> Trajectory:
    """Fixed-step RK4 integration, snapshots every ``stride`` steps."""
    matrix, beta0, basis, kernel = _resolve(generator, state0)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if t_max < 0:
        raise ValueError(f"t_max must be nonnegative, got {t_max!r}")
    n_steps = int(round(t_max / dt))
    keep = record_indices(n_steps, stride)
    keep_set = set(keep.tolist())
    out = np.empty((keep.size, beta0.size), dtype=complex)
    out[0] = beta0
    beta = beta0.copy()
    row = 1
    for step in range(1, n_steps + 1):
        k1 = matrix @ beta
        k2 = matrix @ (beta + 0.5 * dt * k1)
        k3 = matrix @ (beta + 0.5 * dt * k2)
        k4 = matrix @ (beta + dt * k3)
        beta = beta + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step in keep_set:
            out[row] = beta
            row += 1
    return Trajectory(times=keep * dt, amplitudes=out, basis=basis,
                      kernel=kernel, solver="rk4", dt=dt)


def eigen_decompose(generator, state0) -> EigenSolution:
    """Eigendecomposition of the generator with coefficients V c = beta(0)."""
    matrix, beta0, _, _ = _resolve(generator, state0)
    lam, V = np.linalg.eig(matrix)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > EIGEN_COND_LIMIT:
        raise DegenerateSpectrumError(
            f"eigenvector matrix condition number {cond:.3e} exceeds "
            f"{EIGEN_COND_LIMIT:.0e}; the spectrum is numerically degenerate, "
            "use rk4_propagate instead"
        )
    c = np.linalg.solve(V, beta0)
    return EigenSolution(eigenvalues=lam, eigenvectors=V, coefficients=c)


def eigen_solve(generator, state0, times) -> Trajectory:
    """Exact-in-time solution beta(t) = V (c * e^{lambda t}) on a time grid."""
    matrix, beta0, basis, kernel = _resolve(generator, state0)
    t = np.asarray(times, dtype=float).reshape(-1)
    if t.size < 1 or t[0] != 0.0 or (t.size > 1 and np.any(np.diff(t) <= 0)):
        raise ValueError("times must be strictly increasing and start at 0")
    sol = eigen_decompose(matrix, beta0)
    phases = np.exp(np.outer(sol.eigenvalues, t))
    amp = (sol.eigenvectors @ (sol.coefficients[:, None] * phases)).T
    amp[0] = beta0
    return Trajectory(times=t, amplitudes=amp, basis=basis,
                      kernel=kernel, solver="eigen", dt=None)


def oracle_expm(generator, state0, t: float) -> AmplitudeState:
    """beta(t) = exp(M t) beta(0) by scaling and squaring.

    The scaled exponential is summed as a truncated Taylor series; this
    path shares no code with rk4_propagate or eigen_solve and exists to
    cross-check them.
    """
    matrix, beta0, basis, _ = _resolve(generator, state0)
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    A = matrix * t
    norm = float(np.linalg.norm(A, 1))
    if norm > 2.0**40:
        raise OverflowError(f"||M t|| = {norm:.3e} is out of range for expm")
    squarings = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0.5 else 0
    A = A / 2.0**squarings
    n = A.shape[0]
    E = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 41):
        term = term @ A / k
        E = E + term
        if np.linalg.norm(term, 1) < 1e-18 * np.linalg.norm(E, 1):
            break
    for _ in range(squarings):
        E = E @ E
    return AmplitudeState(E @ beta0, basis)
