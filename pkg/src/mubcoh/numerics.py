"""Dense complex-matrix primitives.

Everything here is built on Hermitian eigendecomposition: spectral
functions, singular values (as square roots of the spectrum of X^dagger X)
and the trace and spectral norms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DegenerateDimension, DomainError, NotHermitian

HERMITICITY_TOL = 1e-9
ZERO_CUTOFF = 1e-12
# relative to the largest eigenvalue of X^dagger X; roundoff there is ~d*eps
GRAM_CUTOFF = 1e-14


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_square_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite complex square matrix or raise."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] == 0:
        raise DegenerateDimension("matrix dimension must be at least 1")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def hermiticity_deviation(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def hermitian_eig(a, hermiticity_tol: float = HERMITICITY_TOL) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as (A + A^dagger)/2 before decomposition, so
    small roundoff asymmetries are tolerated up to ``hermiticity_tol``
    (absolute, max-entry).
    """
    m = as_square_matrix(a)
    dev = hermiticity_deviation(m)
    if dev > hermiticity_tol:
        raise NotHermitian(f"max |A - A^dagger| = {dev:.3e} exceeds {hermiticity_tol:.1e}")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return Spectrum(eigenvalues=w, eigenvectors=v)


def _sqrt(w: np.ndarray, cut: float) -> np.ndarray:
    if np.any(w < -cut):
        raise DomainError(f"sqrt of negative eigenvalue {w.min():.3e}")
    return np.sqrt(np.clip(w, 0.0, None))


def _log(w: np.ndarray, cut: float) -> np.ndarray:
    if np.any(w < -cut):
        raise DomainError(f"log of negative eigenvalue {w.min():.3e}")
    out = np.zeros_like(w)
    pos = w > cut
    out[pos] = np.log(w[pos])
    return out


_NAMED = {"sqrt": _sqrt, "log": _log, "ln": _log}

SpectralFunction = Union[str, Callable[[np.ndarray], np.ndarray]]


def apply_spectral_function(
    a,
    f: SpectralFunction,
    zero_cutoff: float = ZERO_CUTOFF,
    hermiticity_tol: float = HERMITICITY_TOL,
) -> np.ndarray:
    """Return V f(Lambda) V^dagger for Hermitian ``a``.

    ``f`` is either a vectorized callable or one of the named functions
    ``"sqrt"`` and ``"log"``. The named ones know their domain:

    * ``sqrt`` clamps eigenvalues in [-cutoff, 0) to zero.
    * ``log`` maps eigenvalues in [-cutoff, cutoff] to 0, which implements
      the 0 ln 0 = 0 convention once the result is multiplied by an
      operator with the same spectrum.

    The cutoff is ``zero_cutoff`` times the largest eigenvalue magnitude.
    Anything further below zero raises :class:`DomainError`.
    """
    spec = hermitian_eig(a, hermiticity_tol)
    w = spec.eigenvalues
    scale = float(np.max(np.abs(w)))
    cut = zero_cutoff * scale if scale > 0 else zero_cutoff
    if isinstance(f, str):
        try:
            fw = _NAMED[f](w, cut)
        except KeyError:
            raise ValueError(f"unknown spectral function {f!r}") from None
    else:
        fw = np.asarray(f(w), dtype=float)
    v = spec.eigenvectors
    return (v * fw) @ v.conj().T


def singular_values(x, zero_cutoff: float = GRAM_CUTOFF) -> np.ndarray:
    """Singular values of ``x`` in ascending order.

    Computed as nonnegative square roots of the eigenvalues of X^dagger X.
    Eigenvalues below ``zero_cutoff`` times the largest one are treated as
    exact zeros, which removes the sqrt(eps) noise of rank-deficient inputs.
    """
    m = as_square_matrix(x)
    w = np.linalg.eigvalsh(m.conj().T @ m)
    top = w[-1]
    w = np.where(w > zero_cutoff * top, w, 0.0)
    return np.sqrt(w)


def norms(x, zero_cutoff: float = GRAM_CUTOFF) -> tuple[float, float]:
    """Trace norm and spectral norm of ``x``."""
    s = singular_values(x, zero_cutoff)
    return float(np.sum(s)), float(s[-1])


def trace_norm(x) -> float:
    return norms(x)[0]


def spectral_norm(x) -> float:
    return norms(x)[1]
