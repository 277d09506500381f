"""Effective decay generators for the single-excitation amplitude equations.

Two couplings are supported for beta_dot = M beta in the Fock basis:

* sine kernel:        M_ji = -gamma * sin(K_ji)/K_ji   (real symmetric),
* exponential kernel: M_ji = i*gamma * e^{i K_ji}/K_ji (adds collective
  Lamb shifts and the virtual, counter-rotating channel).

Both self terms are regularized to M_jj = -gamma: the sine limit is exact,
while the exponential kernel's divergent imaginary self term is the
single-atom Lamb shift, absorbed into the transition frequency.  The
Hermitian part of the exponential generator therefore equals the sine
generator entry for entry: Re[i e^{iK}/K] = -sin(K)/K.

No 1/N prefactor is applied here; the 1/N seen in the TD-basis equations
of motion comes out of the 1/sqrt(N) state normalizations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import FOCK, TD, TDTransform, ladder_weights
from .ensemble import Ensemble

SINE = "sine"
EXP = "exp"

__all__ = [
    "GeneratorMatrix",
    "build_sine_generator",
    "build_exp_generator",
    "build_generator",
    "transform_generator",
    "assemble_td_direct",
]


@dataclass(frozen=True)
class GeneratorMatrix:
    """N x N complex generator of beta_dot = M beta with its tags."""

    matrix: np.ndarray
    basis: str
    kernel: str
    gamma: float

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=complex)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("generator matrix must be square")
        if not np.all(np.isfinite(M)):
            raise ValueError("generator matrix must be finite")
        if self.basis not in (FOCK, TD):
            raise ValueError(f"unknown basis tag {self.basis!r}")
        if self.kernel not in (SINE, EXP):
            raise ValueError(f"unknown kernel tag {self.kernel!r}")
        object.__setattr__(self, "matrix", M)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _kernel_matrix(ensemble: Ensemble, kernel: str, gamma: float) -> np.ndarray:
    """Fock-basis kernel values on the K matrix, self terms set to -gamma."""
    K = ensemble.K
    with np.errstate(divide="ignore", invalid="ignore"):
        if kernel == SINE:
            M = -gamma * np.sin(K) / K
        elif kernel == EXP:
            M = 1j * gamma * np.exp(1j * K) / K
        else:
            raise ValueError(f"unknown kernel tag {kernel!r}")
    M = np.asarray(M, dtype=complex)
    np.fill_diagonal(M, -gamma)
    return M


def build_sine_generator(ensemble: Ensemble, gamma: float = 1.0) -> GeneratorMatrix:
    """Sine-kernel Fock generator (pure real decay couplings, no Lamb shift)."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    return GeneratorMatrix(_kernel_matrix(ensemble, SINE, gamma), FOCK, SINE, gamma)


def build_exp_generator(ensemble: Ensemble, gamma: float = 1.0) -> GeneratorMatrix:
    """Exponential-kernel Fock generator including collective Lamb shifts."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    return GeneratorMatrix(_kernel_matrix(ensemble, EXP, gamma), FOCK, EXP, gamma)


def build_generator(ensemble: Ensemble, kernel: str, gamma: float = 1.0) -> GeneratorMatrix:
    """Dispatch on the kernel tag."""
    if kernel == SINE:
        return build_sine_generator(ensemble, gamma)
    if kernel == EXP:
        return build_exp_generator(ensemble, gamma)
    raise ValueError(f"unknown kernel tag {kernel!r}")


def transform_generator(transform: TDTransform, generator: GeneratorMatrix) -> GeneratorMatrix:
    """Conjugate a Fock generator into the TD basis: S M S^dagger."""
    if generator.basis != FOCK:
        raise ValueError("transform_generator expects a fock-basis generator")
    if generator.n != transform.n:
        raise ValueError(
            f"dimension mismatch: transform is {transform.n}, generator is {generator.n}"
        )
    S = transform.S
    M_td = S @ generator.matrix @ S.conj().T
    return GeneratorMatrix(M_td, TD, generator.kernel, generator.gamma)


def assemble_td_direct(ensemble: Ensemble, kernel: str, gamma: float = 1.0) -> GeneratorMatrix:
    """TD-basis generator assembled directly from the pair double sums.

    Element (p, q) is sum_{j,i} w^p_j w^q_i e^{-i Kvec_ji} kappa(K_ji)
    with the real ladder weights w and the timing factors e^{-i Kvec_ji}
    combined analytically, rather than conjugating the assembled Fock
    matrix.  Serves as the independent cross-check of
    :func:`transform_generator`.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    kappa = _kernel_matrix(ensemble, kernel, gamma)
    timed = np.exp(-1j * ensemble.Kvec) * kappa
    W = ladder_weights(ensemble.n)
    return GeneratorMatrix(W @ timed @ W.T, TD, kernel, gamma)
