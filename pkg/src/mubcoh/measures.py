"""State functionals relative to a reference basis.

Measurement probabilities and their entropies, quantum relative entropy,
fidelity, and the two coherence quantifiers used throughout the package:
the relative entropy of coherence (closed form, Shannon minus von Neumann)
and the geometric coherence (exact for pure states, bracketed for mixed
states, and estimated numerically by simplex-constrained ascent).
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, InvalidState, NegativeRadicand
from .mub import Basis
from .numerics import ZERO_CUTOFF, apply_spectral_function, hermitian_eig, norms
from .states import PureState, as_density, entropy_from_eigenvalues, purity, von_neumann_entropy

PROB_NEG_TOL = 1e-12
PROB_SUM_TOL = 1e-10
IMAG_TOL = 1e-10
RANGE_WEIGHT_TOL = 1e-8
CLAMP_TOL = 1e-9
RADICAND_TOL = 1e-10
STEP_GROWTH = 1.25


def _check_dims(basis: Basis, d: int) -> None:
    if basis.dim != d:
        raise DimensionMismatch(f"basis has dimension {basis.dim}, state has {d}")


def as_probdist(p) -> np.ndarray:
    """Validate a probability vector, clamping roundoff negatives to zero."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidState(f"probability vector must be 1-D and nonempty, got shape {p.shape}")
    if np.any(p < -PROB_NEG_TOL):
        raise InvalidState(f"negative probability {p.min():.3e}")
    p = np.clip(p, 0.0, None)
    s = p.sum()
    if abs(s - 1.0) > PROB_SUM_TOL:
        raise InvalidState(f"probabilities sum to {s!r}")
    return p / s


def probabilities(basis: Basis, rho) -> np.ndarray:
    """p_i = <b_i|rho|b_i>."""
    if isinstance(rho, PureState):
        _check_dims(basis, rho.dim)
        return as_probdist(np.abs(basis.vectors.conj().T @ rho.amplitudes) ** 2)
    rho = as_density(rho)
    _check_dims(basis, rho.dim)
    v = basis.vectors
    p = np.einsum("ai,ab,bi->i", v.conj(), rho.matrix, v)
    if np.max(np.abs(p.imag)) > IMAG_TOL:
        raise InvalidState(f"imaginary residue {np.max(np.abs(p.imag)):.3e} in probabilities")
    return as_probdist(p.real)


def probabilities_batch(bases: np.ndarray, rhos: np.ndarray) -> np.ndarray:
    """Probabilities for many states in many bases at once.

    ``bases`` has shape (M, d, d) with kets as columns. ``rhos`` is either
    (N, d) state vectors or (N, d, d) density matrices. Returns (N, M, d)
    without validation; callers clamp as needed.
    """
    if rhos.ndim == 2:
        amp = np.einsum("mai,na->nmi", bases.conj(), rhos)
        return np.abs(amp) ** 2
    tmp = np.einsum("mai,nab->nmib", bases.conj(), rhos)
    return np.einsum("nmib,mbi->nmi", tmp, bases).real


# --- classical functionals (vectorized over leading axes) -----------------

def shannon_entropy(p) -> float | np.ndarray:
    """H = -sum p ln p with 0 ln 0 = 0, along the last axis."""
    p = np.asarray(p, dtype=float)
    out = entropy_from_eigenvalues(p)
    return float(out) if out.ndim == 0 else out


def min_entropy(p) -> float | np.ndarray:
    """-ln max_i p_i."""
    out = -np.log(np.max(np.asarray(p, dtype=float), axis=-1))
    return float(out) if np.ndim(out) == 0 else out


def index_of_coincidence(p) -> float | np.ndarray:
    """sum_i p_i^2."""
    p = np.asarray(p, dtype=float)
    out = np.sum(p * p, axis=-1)
    return float(out) if out.ndim == 0 else out


# --- quantum divergences ---------------------------------------------------

def relative_entropy(rho, omega, zero_cutoff: float = ZERO_CUTOFF) -> float:
    """D(rho||omega) = tr(rho ln rho - rho ln omega), or ``math.inf``.

    The result is infinite when rho puts more than 1e-8 of its weight on
    the eigenvectors of omega whose eigenvalues fall under the cutoff.
    """
    rho, omega = as_density(rho), as_density(omega)
    if rho.dim != omega.dim:
        raise DimensionMismatch(f"states have dimensions {rho.dim} and {omega.dim}")
    so = hermitian_eig(omega.matrix)
    mu = so.eigenvalues
    cut = zero_cutoff * max(float(np.max(np.abs(mu))), 0.0)
    weights = np.einsum("aj,ab,bj->j", so.eigenvectors.conj(), rho.matrix, so.eigenvectors).real
    null = mu <= cut
    if np.sum(weights[null]) > RANGE_WEIGHT_TOL:
        return math.inf
    cross = float(np.sum(weights[~null] * np.log(mu[~null])))
    return -von_neumann_entropy(rho) - cross


def rel_entropy_coherence(basis: Basis, rho) -> float:
    """C_1 = H(diagonal of rho in ``basis``) - S(rho), clamped at 0."""
    p = probabilities(basis, rho)
    c = shannon_entropy(p) - von_neumann_entropy(rho)
    if c < -CLAMP_TOL:
        raise AssertionError(f"relative entropy of coherence came out negative ({c:.3e})")
    return max(c, 0.0)


def fidelity(rho, omega) -> float:
    """Squared trace norm of sqrt(rho) sqrt(omega), clamped to [0, 1]."""
    rho, omega = as_density(rho), as_density(omega)
    if rho.dim != omega.dim:
        raise DimensionMismatch(f"states have dimensions {rho.dim} and {omega.dim}")
    x = apply_spectral_function(rho.matrix, "sqrt") @ apply_spectral_function(omega.matrix, "sqrt")
    tn, _ = norms(x)
    return min(max(tn * tn, 0.0), 1.0)


# --- geometric coherence ----------------------------------------------------

class GeomBounds(NamedTuple):
    """Two-sided estimate of the geometric coherence of a mixed state.

    ``raw_lower`` is the unclamped lower expression, which goes negative
    when the index of coincidence exceeds the purity.
    """

    lower: float
    upper: float
    raw_lower: float


def geometric_coherence_pure(basis: Basis, psi) -> float:
    """1 - max_i |<b_i|psi>|^2."""
    if not isinstance(psi, PureState):
        psi = PureState(psi)
    p = probabilities(basis, psi)
    return float(1.0 - np.max(p))


def geometric_lower_expression(index_coinc, pur, d: int):
    """(d-1)/d {1 - sqrt(1 + d/(d-1) [J - tr rho^2])}, unclamped and vectorized."""
    rad = 1.0 + d / (d - 1) * (np.asarray(index_coinc) - np.asarray(pur))
    if np.any(rad < -RADICAND_TOL):
        raise NegativeRadicand(f"radicand {np.min(rad):.3e} is negative; the state is invalid")
    return (d - 1) / d * (1.0 - np.sqrt(np.clip(rad, 0.0, None)))


def geometric_coherence_bounds(basis: Basis, rho) -> GeomBounds:
    rho_d = as_density(rho)
    _check_dims(basis, rho_d.dim)
    d = rho_d.dim
    # same probability path as the closed form, so pure states attain the upper end bit-for-bit
    p = probabilities(basis, rho if isinstance(rho, PureState) else rho_d)
    upper = float(1.0 - np.max(p))
    if d == 1:
        return GeomBounds(0.0, upper, 0.0)
    raw = float(geometric_lower_expression(index_of_coincidence(p), purity(rho_d), d))
    return GeomBounds(max(raw, 0.0), upper, raw)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row of ``v`` onto the probability simplex."""
    v = np.atleast_2d(np.asarray(v, dtype=float))
    n = v.shape[1]
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    k = np.arange(1, n + 1)
    cond = u - css / k > 0
    r = n - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(v.shape[0]), r] / (r + 1)
    return np.clip(v - theta[:, None], 0.0, None)


def _fidelity_with_diagonal(rho_b: np.ndarray, deltas: np.ndarray, cutoff: float) -> np.ndarray:
    """F(rho, diag(delta)) for each row of ``deltas``; rho in basis coordinates."""
    s = np.sqrt(np.clip(deltas, 0.0, None))
    a = s[:, :, None] * rho_b[None, :, :] * s[:, None, :]
    w = np.linalg.eigvalsh(a)
    w = np.where(w > cutoff * w[:, -1:], w, 0.0)
    return np.sum(np.sqrt(w), axis=1) ** 2


class GeometricEstimate(NamedTuple):
    value: float
    converged: bool
    weights: np.ndarray
    fidelity: float


def geometric_coherence_numeric(
    basis: Basis,
    rho,
    starts: int = 32,
    max_iters: int = 10_000,
    tol: float = 1e-10,
    seed: int = 0,
    fd_step: float = 1e-6,
    zero_cutoff: float = ZERO_CUTOFF,
) -> GeometricEstimate:
    """Numerical geometric coherence by projected gradient ascent.

    Maximizes F(rho, delta) over diagonal states delta, starting from the
    uniform distribution and ``starts - 1`` Dirichlet draws. Gradients are
    central differences of step ``fd_step``, projected onto the tangent
    space of the simplex. Each start keeps its own step size, grown by
    ``STEP_GROWTH`` on success and halved on failure, and stops once an accepted move is
    shorter than ``tol``.

    Ascent can stall below the global maximum, so ``value`` is an upper
    estimate of the true geometric coherence. ``converged`` is False if any
    start hit ``max_iters``.
    """
    rho_d = as_density(rho)
    _check_dims(basis, rho_d.dim)
    if starts < 1:
        raise ValueError(f"starts must be >= 1, got {starts}")
    d = rho_d.dim
    v = basis.vectors
    rho_b = v.conj().T @ rho_d.matrix @ v
    rho_b = 0.5 * (rho_b + rho_b.conj().T)

    rng = np.random.default_rng(seed)
    x = np.empty((starts, d))
    x[0] = 1.0 / d
    if starts > 1:
        x[1:] = rng.dirichlet(np.ones(d), size=starts - 1)
    f = _fidelity_with_diagonal(rho_b, x, zero_cutoff)
    eta = np.full(starts, 0.5)
    done = np.zeros(starts, dtype=bool)
    grad = np.zeros((starts, d))
    stale = np.ones(starts, dtype=bool)
    eye = np.eye(d)

    for _ in range(max_iters):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        upd = act[stale[act]]
        if upd.size:
            xu = x[upd]
            k = upd.size
            plus = xu[:, None, :] + fd_step * eye
            minus = np.clip(xu[:, None, :] - fd_step * eye, 0.0, None)
            span = fd_step + (xu - np.clip(xu - fd_step, 0.0, None))
            both = np.concatenate([plus, minus]).reshape(2 * k * d, d)
            fb = _fidelity_with_diagonal(rho_b, both, zero_cutoff).reshape(2, k, d)
            g = (fb[0] - fb[1]) / span
            grad[upd] = g - g.mean(axis=1, keepdims=True)
            stale[upd] = False
        xa = x[act]
        cand = project_simplex(xa + eta[act, None] * grad[act])
        fc = _fidelity_with_diagonal(rho_b, cand, zero_cutoff)
        move = np.linalg.norm(cand - xa, axis=1)
        ok = fc >= f[act]
        acc = act[ok]
        x[acc] = cand[ok]
        f[acc] = fc[ok]
        stale[acc] = True
        eta[acc] *= STEP_GROWTH
        eta[act[~ok]] *= 0.5
        finished = (ok & (move < tol)) | (eta[act] < 1e-18)
        done[act[finished]] = True

    best = int(np.argmax(f))
    fbest = float(min(max(f[best], 0.0), 1.0))
    return GeometricEstimate(1.0 - fbest, bool(done.all()), x[best].copy(), fbest)
