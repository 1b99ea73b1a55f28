"""Quantum states, their purity and entropy, and reproducible sampling.

Random draws are keyed by an explicit 64-bit seed. Sweeps derive one seed
per trial from ``(master_seed, *coordinates)`` with :func:`derive_seed`, so
every trial can be regenerated on its own and parallel and serial runs
see the same ensemble.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from . import _jsonio
from .errors import BadDimension, BadRank, DimensionMismatch, InvalidState, ParseError
from .numerics import as_square_matrix, hermiticity_deviation

STATE_HERMITICITY_TOL = 1e-9
STATE_EIGEN_TOL = 1e-10
STATE_TRACE_TOL = 1e-10
PURE_NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Positive semidefinite, unit-trace operator.

    Construction validates the invariants unless ``validate=False``.
    """

    matrix: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = as_square_matrix(self.matrix)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.validate:
            dev = hermiticity_deviation(m)
            if dev > STATE_HERMITICITY_TOL:
                raise InvalidState(f"density matrix not Hermitian (deviation {dev:.2e})")
            tr = np.trace(m).real
            if abs(tr - 1.0) > STATE_TRACE_TOL:
                raise InvalidState(f"density matrix trace {tr!r} is not 1")
            lo = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
            if lo < -STATE_EIGEN_TOL:
                raise InvalidState(f"density matrix has negative eigenvalue {lo:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        m = self.matrix
        return np.linalg.eigvalsh(0.5 * (m + m.conj().T))

    def rotated(self, u: np.ndarray) -> "DensityMatrix":
        """U rho U^dagger."""
        u = np.asarray(u, dtype=complex)
        return DensityMatrix(u @ self.matrix @ u.conj().T)

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        if d < 1:
            raise BadDimension(f"dimension must be >= 1, got {d}")
        return cls(np.eye(d, dtype=complex) / d)


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector |psi>."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.ndim != 1 or a.size == 0:
            raise InvalidState(f"amplitudes must be a nonempty vector, got shape {a.shape}")
        nrm = np.linalg.norm(a)
        if abs(nrm - 1.0) > PURE_NORM_TOL:
            raise InvalidState(f"state vector norm {nrm!r} is not 1")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density(self) -> DensityMatrix:
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()))

    @classmethod
    def normalized(cls, v) -> "PureState":
        v = np.asarray(v, dtype=complex)
        return cls(v / np.linalg.norm(v))


def as_density(state) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return state.density()
    return DensityMatrix(state)


def purity(rho) -> float:
    """tr(rho^2)."""
    m = as_density(rho).matrix
    return float(np.real(np.vdot(m, m)))


def entropy_from_eigenvalues(w: np.ndarray) -> np.ndarray:
    """-sum w ln w along the last axis with 0 ln 0 = 0."""
    w = np.clip(np.asarray(w, dtype=float), 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, w * np.log(np.where(w > 0, w, 1.0)), 0.0)
    return -np.sum(terms, axis=-1)


def von_neumann_entropy(rho) -> float:
    """S(rho) = -tr(rho ln rho), natural logarithm."""
    if isinstance(rho, PureState):
        return 0.0
    return float(entropy_from_eigenvalues(as_density(rho).eigenvalues()))


# --- sampling -------------------------------------------------------------

def derive_seed(master_seed: int, *coords) -> int:
    """64-bit seed for the draw at ``coords`` under ``master_seed``.

    Coordinates may be integers or strings; strings are folded with CRC-32.
    """
    key = tuple(zlib.crc32(c.encode()) if isinstance(c, str) else int(c) for c in coords)
    hi, lo = np.random.SeedSequence(int(master_seed), spawn_key=key).generate_state(2, np.uint32)
    return (int(hi) << 32) | int(lo)


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def draw_pure(d: int, seed: int) -> np.ndarray:
    """Raw Haar-random unit vector; the array behind :func:`sample_pure`."""
    v = _complex_gaussian(_rng(seed), d)
    return v / np.linalg.norm(v)


def draw_density(d: int, rank: int, seed: int) -> np.ndarray:
    """Raw Ginibre density matrix; the array behind :func:`sample_density`."""
    g = _complex_gaussian(_rng(seed), (d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def sample_pure(d: int, seed: int) -> PureState:
    """Haar-random pure state from normalized complex Gaussian amplitudes."""
    if d < 2:
        raise BadDimension(f"pure-state sampling needs d >= 2, got {d}")
    return PureState(draw_pure(d, seed))


def sample_density(d: int, rank: int, seed: int) -> DensityMatrix:
    """Ginibre state G G^dagger / tr(G G^dagger) with G of shape d x rank.

    The result is validated, never projected back onto the PSD cone.
    """
    if d < 1:
        raise BadDimension(f"dimension must be >= 1, got {d}")
    if not 1 <= rank <= d:
        raise BadRank(f"rank must lie in [1, {d}], got {rank}")
    return DensityMatrix(draw_density(d, rank, seed))


def sample_unitary(d: int, seed: int) -> np.ndarray:
    """Haar-random unitary (QR of a Ginibre matrix with phase fix)."""
    if d < 1:
        raise BadDimension(f"dimension must be >= 1, got {d}")
    z = _complex_gaussian(_rng(seed), (d, d)) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


# --- state files ----------------------------------------------------------

def serialize_state(state) -> bytes:
    """JSON bytes with a ``kind`` discriminator ("pure" or "density")."""
    if isinstance(state, PureState):
        obj = {"kind": "pure", "d": state.dim, "vector": _jsonio.complex_to_pairs(state.amplitudes)}
    else:
        rho = as_density(state)
        obj = {"kind": "density", "d": rho.dim, "matrix": _jsonio.complex_to_pairs(rho.matrix)}
    return (_jsonio.dumps(obj) + "\n").encode("utf-8")


def parse_state_file(content) -> PureState | DensityMatrix:
    obj = _jsonio.loads(content)
    kind = obj.get("kind")
    d = obj.get("d")
    if not isinstance(d, int) or d < 1:
        raise ParseError(f"'d' must be a positive integer, got {d!r}")
    try:
        if kind == "pure":
            v = _jsonio.pairs_to_complex(obj.get("vector"), (d,), "vector")
            return PureState(v)
        if kind == "density":
            m = _jsonio.pairs_to_complex(obj.get("matrix"), (d, d), "matrix")
            return DensityMatrix(m)
    except InvalidState as exc:
        raise ParseError(f"invalid state: {exc}") from exc
    raise ParseError(f"'kind' must be 'pure' or 'density', got {kind!r}")


def check_same_dim(*dims: int) -> int:
    if len(set(dims)) != 1:
        raise DimensionMismatch(f"dimensions differ: {dims}")
    return dims[0]
