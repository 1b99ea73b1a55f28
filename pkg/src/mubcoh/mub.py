"""Mutually unbiased bases: construction, verification and file I/O."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _jsonio
from .errors import DimensionMismatch, NotUnbiased, ParseError, UnsupportedDimension
from .gf import galois_field, prime_power

MUB_TOL = 1e-9
PARSE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Basis:
    """d orthonormal kets stored as the columns of a d x d matrix.

    Only the shape is checked here; orthonormality is the business of
    :func:`verify_mub`, so deliberately broken bases can still be built.
    """

    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] == 0:
            raise ParseError(f"basis must be a nonempty square matrix, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ParseError("basis has non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def ket(self, i: int) -> np.ndarray:
        return self.vectors[:, i]

    def projectors(self) -> np.ndarray:
        """Stack of rank-1 projectors |b_i><b_i|, shape (d, d, d)."""
        v = self.vectors
        return np.einsum("ai,bi->iab", v, v.conj())

    @classmethod
    def computational(cls, d: int) -> "Basis":
        return cls(np.eye(d, dtype=complex))


@dataclass(frozen=True, eq=False)
class MubSet:
    """An ordered collection of bases of equal dimension."""

    bases: tuple[Basis, ...]
    label: str = ""

    def __post_init__(self):
        bases = tuple(b if isinstance(b, Basis) else Basis(b) for b in self.bases)
        if not bases:
            raise ParseError("a MUB set needs at least one basis")
        dims = {b.dim for b in bases}
        if len(dims) != 1:
            raise DimensionMismatch(f"bases have different dimensions: {sorted(dims)}")
        object.__setattr__(self, "bases", bases)

    @property
    def dim(self) -> int:
        return self.bases[0].dim

    def __len__(self) -> int:
        return len(self.bases)

    def __iter__(self):
        return iter(self.bases)

    def __getitem__(self, i):
        return self.bases[i]

    def matrices(self) -> np.ndarray:
        """All bases stacked into shape (M, d, d)."""
        return np.stack([b.vectors for b in self.bases])

    def truncated(self, m: int) -> "MubSet":
        """The first ``m`` bases."""
        if not 1 <= m <= len(self.bases):
            raise ValueError(f"M must lie in [1, {len(self.bases)}], got {m}")
        return MubSet(self.bases[:m], self.label)

    def rotated(self, u: np.ndarray) -> "MubSet":
        """Apply one unitary to every basis vector."""
        u = np.asarray(u, dtype=complex)
        return MubSet(tuple(Basis(u @ b.vectors) for b in self.bases), self.label)


class MubVerification(NamedTuple):
    max_orthonormality_deviation: float
    max_unbiasedness_deviation: float
    passed: bool


def verify_mub(mubs: MubSet | Sequence[Basis], tol: float = MUB_TOL) -> MubVerification:
    """Exhaustive check of orthonormality and pairwise unbiasedness."""
    bases = list(mubs.bases if isinstance(mubs, MubSet) else mubs)
    dims = {b.dim for b in bases}
    if len(dims) != 1:
        raise DimensionMismatch(f"bases have different dimensions: {sorted(dims)}")
    d = dims.pop()
    eye = np.eye(d)
    target = 1.0 / np.sqrt(d)
    orth = max(float(np.max(np.abs(b.vectors.conj().T @ b.vectors - eye))) for b in bases)
    unb = 0.0
    for s in range(len(bases)):
        for t in range(s + 1, len(bases)):
            g = np.abs(bases[s].vectors.conj().T @ bases[t].vectors)
            unb = max(unb, float(np.max(np.abs(g - target))))
    return MubVerification(orth, unb, orth <= tol and unb <= tol)


# --- construction ---------------------------------------------------------

def _qubit_bases() -> list[np.ndarray]:
    s = 1 / np.sqrt(2)
    z = np.eye(2, dtype=complex)
    x = s * np.array([[1, 1], [1, -1]], dtype=complex)
    y = s * np.array([[1, 1], [1j, -1j]], dtype=complex)
    return [z, x, y]


def _wootters_fields(q: int) -> list[np.ndarray]:
    field = galois_field(q)
    p = field.p
    omega = np.exp(2j * np.pi * np.arange(p) / p)
    xs = np.arange(q)
    squares = field.mul_table[xs, xs]
    jx = field.mul_table  # jx[j, x] = j * x
    out = [np.eye(q, dtype=complex)]
    for t in range(q):
        tx2 = field.mul_table[t, squares]
        phase = field.trace_table[field.add_table[tx2[None, :], jx]]  # (j, x)
        out.append(omega[phase].T / np.sqrt(q))  # rows x, columns j
    return out


def supported_dimension(d: int) -> bool:
    if d == 2:
        return True
    pn = prime_power(d)
    return pn is not None and pn[0] != 2


@functools.lru_cache(maxsize=64)
def construct_mub(d: int) -> MubSet:
    """d+1 mutually unbiased bases for d = 2 or an odd prime power.

    Basis 0 is the computational basis. For d = 2 the other two are the
    X and Y eigenbases. For odd q = p^n, basis t+1 (t in GF(q)) has vector
    j with component x equal to omega^Tr(t x^2 + j x) / sqrt(q), where
    omega = exp(2 pi i / p) and Tr is the field trace onto Z_p.
    """
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool):
        raise UnsupportedDimension(f"dimension must be an integer, got {d!r}")
    d = int(d)
    if d == 2:
        return MubSet(tuple(Basis(m) for m in _qubit_bases()), "pauli-2")
    if not supported_dimension(d):
        if d >= 4 and prime_power(d) is not None:
            reason = "even prime powers above 2 can be loaded from file but are not constructed"
        else:
            reason = "a complete MUB set is only constructed for d = 2 and odd prime powers"
        raise UnsupportedDimension(f"d = {d}: {reason}")
    return MubSet(tuple(Basis(m) for m in _wootters_fields(d)), f"wootters-fields-{d}")


def mub_set(d: int, m: int | None = None) -> MubSet:
    """The first ``m`` bases of :func:`construct_mub` (all d+1 if omitted)."""
    full = construct_mub(d)
    return full if m is None else full.truncated(m)


# --- file format ----------------------------------------------------------

def mub_to_dict(mubs: MubSet) -> dict:
    return {
        "d": mubs.dim,
        "label": mubs.label,
        # each basis is a list of kets (the matrix columns)
        "bases": [_jsonio.complex_to_pairs(b.vectors.T) for b in mubs.bases],
    }


def serialize_mub(mubs: MubSet) -> bytes:
    return (_jsonio.dumps(mub_to_dict(mubs)) + "\n").encode("utf-8")


def mub_from_dict(obj: dict, verify_tol: float | None = PARSE_TOL) -> MubSet:
    d = obj.get("d")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ParseError(f"'d' must be a positive integer, got {d!r}")
    label = obj.get("label", "")
    if not isinstance(label, str):
        raise ParseError("'label' must be a string")
    raw = obj.get("bases")
    if not isinstance(raw, list) or not raw:
        raise ParseError("'bases' must be a nonempty list")
    bases = []
    for k, b in enumerate(raw):
        if not isinstance(b, list):
            raise ParseError(f"basis {k} is not a list")
        lengths = {len(v) if isinstance(v, list) else -1 for v in b}
        if lengths == {len(b)} and len(b) != d:
            raise DimensionMismatch(f"basis {k} is {len(b)}x{len(b)} but d = {d}")
        kets = _jsonio.pairs_to_complex(b, (d, d), f"basis {k}")
        bases.append(Basis(kets.T))
    mubs = MubSet(tuple(bases), label)
    if verify_tol is not None:
        rep = verify_mub(mubs, verify_tol)
        if not rep.passed:
            raise NotUnbiased(
                f"set fails verification at tol {verify_tol:g}: orthonormality deviation "
                f"{rep.max_orthonormality_deviation:.3e}, unbiasedness deviation "
                f"{rep.max_unbiasedness_deviation:.3e}"
            )
    return mubs


def parse_mub_file(content, verify_tol: float | None = PARSE_TOL) -> MubSet:
    """Parse the JSON MUB format; verifies the set unless ``verify_tol`` is None."""
    return mub_from_dict(_jsonio.loads(content), verify_tol)
