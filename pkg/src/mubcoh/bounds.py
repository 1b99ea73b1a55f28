"""Right-hand sides of the coherence and entropic uncertainty bounds for MUBs.

Every evaluator is a plain function of (d, M) and, where the bound is
state dependent, of the purity tr(rho^2) and the von Neumann entropy S(rho).
They broadcast over numpy arrays, which is how the sweep harness uses them.
Bounds are never clamped: a negative lower bound is vacuous but valid.

Bound identifiers used in reports:

=================  =====  ==========================================================
id                 kind   statement
=================  =====  ==========================================================
``prop1``          lower  mean C_1 >= ln(Md / (tr(rho^2) d + M - 1)) - S(rho)
``prop1_pure``     lower  mean C_1 >= ln(Md / (d + M - 1)) for pure states
``pati_mub``       lower  mean C_1 >= ln(d) / M for pure states
``prop2``          lower  mean C_g >= (d-1)/d - sqrt(d-1)/(d sqrt M) sqrt(Md-1-(Md-d) tr rho^2)
``prop2_pure``     lower  mean C_g >= (d-1)/d (1 - 1/sqrt M) for pure states
``prop2_lp_pure``  lower  mean C_g >= 1 - (1 + sqrt((M^2-M)/d)) / M for pure states
``maxprob_sum``    upper  sum_t p_max(B_t) <= 1 + sqrt((M^2-M)/d) for pure states
``mim6``           upper  sum_t p_j(t) <= 1 + sqrt(sum_{s!=t} ||sqrt A_s sqrt A_t||_inf^2)
``ic_sum``         upper  sum_t J(B_t) <= tr(rho^2) + (M-1)/d
``prop3``          lower  mean H_inf >= ln(M sqrt d / (sqrt d + sqrt(M^2-M)))
``rmub12``         lower  mean H_inf >= ln(sqrt(M) d / (d + sqrt(M) - 1))
=================  =====  ==========================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadIndex, DimensionMismatch, InvalidState, NegativeRadicand
from .mub import MubSet
from .numerics import apply_spectral_function, spectral_norm

DEFAULT_TOL = 1e-9
RADICAND_TOL = 1e-10

LOWER_BOUNDS = ("prop1", "prop1_pure", "pati_mub", "prop2", "prop2_pure", "prop2_lp_pure", "prop3", "rmub12")
UPPER_BOUNDS = ("maxprob_sum", "mim6", "ic_sum")
BOUND_IDS = (
    "prop1", "prop1_pure", "pati_mub", "prop2", "prop2_pure", "prop2_lp_pure",
    "maxprob_sum", "mim6", "ic_sum", "prop3", "rmub12",
)
PURE_ONLY = frozenset({"prop1_pure", "pati_mub", "prop2_pure", "prop2_lp_pure", "maxprob_sum"})


def bound_kind(bound_id: str) -> str:
    if bound_id in LOWER_BOUNDS:
        return "lower"
    if bound_id in UPPER_BOUNDS:
        return "upper"
    raise KeyError(f"unknown bound id {bound_id!r}")


@dataclass(frozen=True)
class MubBoundParams:
    """Inputs shared by the state-dependent bounds."""

    d: int
    M: int
    purity: float = 1.0
    entropy: float = 0.0

    def __post_init__(self):
        if self.d < 2 or self.M < 1:
            raise ValueError(f"need d >= 2 and M >= 1, got d={self.d}, M={self.M}")
        if not 1.0 / self.d - 1e-10 <= self.purity <= 1.0 + 1e-10:
            raise ValueError(f"purity {self.purity} outside [1/d, 1]")
        if not -1e-10 <= self.entropy <= np.log(self.d) + 1e-9:
            raise ValueError(f"entropy {self.entropy} outside [0, ln d]")


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def prop1_rhs(d, M, purity=1.0, entropy=0.0):
    """ln(M d / (purity d + M - 1)) - entropy."""
    d, M = np.asarray(d, dtype=float), np.asarray(M, dtype=float)
    return _scalar(np.log(M * d / (np.asarray(purity) * d + M - 1.0)) - entropy)


def prop1_pure_rhs(d, M):
    return prop1_rhs(d, M, 1.0, 0.0)


def pati_mub_rhs(d, M):
    """-ln(m)/M with m = 1/d for MUBs, i.e. ln(d)/M."""
    return _scalar(np.log(np.asarray(d, dtype=float)) / np.asarray(M, dtype=float))


def prop2_rhs(d, M, purity=1.0):
    d, M = np.asarray(d, dtype=float), np.asarray(M, dtype=float)
    rad = M * d - 1.0 - (M * d - d) * np.asarray(purity, dtype=float)
    if np.any(rad < -RADICAND_TOL):
        raise NegativeRadicand(f"radicand {np.min(rad):.3e} < 0; purity out of range")
    rad = np.clip(rad, 0.0, None)
    return _scalar((d - 1) / d - np.sqrt(d - 1) / (d * np.sqrt(M)) * np.sqrt(rad))


def prop2_pure_rhs(d, M):
    """(d-1)/d (1 - 1/sqrt(M)): ``prop2_rhs`` at purity one, in closed form."""
    d, M = np.asarray(d, dtype=float), np.asarray(M, dtype=float)
    return _scalar((d - 1) / d * (1.0 - 1.0 / np.sqrt(M)))


def maxprob_sum_rhs(d, M):
    d, M = np.asarray(d, dtype=float), np.asarray(M, dtype=float)
    return _scalar(1.0 + np.sqrt((M * M - M) / d))


def prop2_pure_lp_rhs(d, M):
    return _scalar(1.0 - maxprob_sum_rhs(d, M) / np.asarray(M, dtype=float))


def ic_sum_rhs(d, M, purity=1.0):
    """(state-dependent, state-free) upper bounds on sum_t J(B_t|rho)."""
    extra = (np.asarray(M, dtype=float) - 1.0) / np.asarray(d, dtype=float)
    return _scalar(np.asarray(purity) + extra), _scalar(1.0 + extra)


def prop3_rhs(d, M):
    d, M = np.asarray(d, dtype=float), np.asarray(M, dtype=float)
    sd = np.sqrt(d)
    return _scalar(np.log(M * sd / (sd + np.sqrt(M * M - M))))


def rmub12_rhs(d, M):
    d, M = np.asarray(d, dtype=float), np.asarray(M, dtype=float)
    sm = np.sqrt(M)
    return _scalar(np.log(sm * d / (d + sm - 1.0)))


def evaluate(bound_id: str, d: int, M: int, purity: float = 1.0, entropy: float = 0.0):
    """Dispatch on a bound identifier. ``ic_sum`` returns the state-dependent value."""
    table = {
        "prop1": lambda: prop1_rhs(d, M, purity, entropy),
        "prop1_pure": lambda: prop1_pure_rhs(d, M),
        "pati_mub": lambda: pati_mub_rhs(d, M),
        "prop2": lambda: prop2_rhs(d, M, purity),
        "prop2_pure": lambda: prop2_pure_rhs(d, M),
        "prop2_lp_pure": lambda: prop2_pure_lp_rhs(d, M),
        "maxprob_sum": lambda: maxprob_sum_rhs(d, M),
        "mim6": lambda: mim6_rhs(mub_povms(d, M), [0] * M),
        "ic_sum": lambda: ic_sum_rhs(d, M, purity)[0],
        "prop3": lambda: prop3_rhs(d, M),
        "rmub12": lambda: rmub12_rhs(d, M),
    }
    try:
        return table[bound_id]()
    except KeyError:
        raise KeyError(f"unknown bound id {bound_id!r}") from None


# --- POVMs and the Landau-Pollak-type bound -------------------------------

@dataclass(frozen=True, eq=False)
class Povm:
    """Positive operators summing to the identity."""

    elements: tuple[np.ndarray, ...]

    def __post_init__(self):
        els = tuple(np.asarray(e, dtype=complex) for e in self.elements)
        if not els:
            raise InvalidState("a POVM needs at least one element")
        d = els[0].shape[0]
        for e in els:
            if e.shape != (d, d):
                raise DimensionMismatch(f"POVM element of shape {e.shape}, expected {(d, d)}")
            w = np.linalg.eigvalsh(0.5 * (e + e.conj().T))
            if np.max(np.abs(e - e.conj().T)) > 1e-10 or w[0] < -1e-10:
                raise InvalidState("POVM element is not positive semidefinite")
        if np.max(np.abs(sum(els) - np.eye(d))) > 1e-9:
            raise InvalidState("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", els)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    @classmethod
    def from_basis(cls, vectors: np.ndarray) -> "Povm":
        v = np.asarray(vectors, dtype=complex)
        return cls(tuple(np.outer(v[:, i], v[:, i].conj()) for i in range(v.shape[1])))


def mub_povms(d_or_set, M: int | None = None) -> list[Povm]:
    """Rank-1 projective measurements of the first M bases of a MUB set."""
    if isinstance(d_or_set, MubSet):
        mubs = d_or_set if M is None else d_or_set.truncated(M)
    else:
        from .mub import mub_set

        mubs = mub_set(int(d_or_set), M)
    return [Povm.from_basis(b.vectors) for b in mubs]


def mim6_cross_norms(povms: Sequence[Povm]) -> np.ndarray:
    """Table T[s, t, i, j] = ||sqrt(A_i^(s)) sqrt(A_j^(t))||_inf^2.

    Only the s != t entries are meaningful; the diagonal blocks are zero.
    """
    if len({p.dim for p in povms}) != 1:
        raise DimensionMismatch("POVMs act on different dimensions")
    roots = [[apply_spectral_function(a, "sqrt") for a in p.elements] for p in povms]
    n = max(len(p) for p in povms)
    m = len(povms)
    table = np.zeros((m, m, n, n))
    for s in range(m):
        for t in range(s + 1, m):
            for i, ra in enumerate(roots[s]):
                for j, rb in enumerate(roots[t]):
                    v = spectral_norm(ra @ rb) ** 2
                    table[s, t, i, j] = table[t, s, j, i] = v
    return table


def mim6_rhs(povms: Sequence[Povm], indices: Sequence[int], cross_norms: np.ndarray | None = None) -> float:
    """1 + sqrt(sum over ordered pairs s != t of ||sqrt A_j(s) sqrt A_j(t)||_inf^2).

    ``cross_norms`` may carry a precomputed :func:`mim6_cross_norms` table.
    """
    m = len(povms)
    if len(indices) != m:
        raise BadIndex(f"need one index per POVM ({m}), got {len(indices)}")
    for t, (p, j) in enumerate(zip(povms, indices)):
        if not 0 <= j < len(p):
            raise BadIndex(f"index {j} invalid for POVM {t} with {len(p)} outcomes")
    table = mim6_cross_norms(povms) if cross_norms is None else cross_norms
    idx = np.asarray(indices)
    s, t = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    off = s != t
    total = table[s[off], t[off], idx[s[off]], idx[t[off]]].sum()
    return float(1.0 + np.sqrt(total))


def mim6_rhs_batch(cross_norms: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """:func:`mim6_rhs` for many index choices; ``indices`` has shape (N, M)."""
    n, m = indices.shape
    s, t = np.nonzero(~np.eye(m, dtype=bool))
    vals = cross_norms[s[None, :], t[None, :], indices[:, s], indices[:, t]]
    return 1.0 + np.sqrt(vals.sum(axis=1))


# --- inequality records -----------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    """One evaluated inequality.

    ``slack`` is lhs - rhs for lower bounds and rhs - lhs for upper bounds,
    so the bound holds when the slack is nonnegative up to the tolerance.
    """

    bound_id: str
    d: int
    M: int
    lhs: float
    rhs: float
    slack: float
    holds: bool
    purity: float = float("nan")
    entropy: float = float("nan")
    state_label: str = ""
    inconclusive: bool = False
    extra: dict = field(default_factory=dict, compare=False)


def _check(bound_id, lhs, rhs, slack, tol, context, state_label):
    if not (np.isfinite(lhs) and np.isfinite(rhs)):
        raise ValueError(f"{bound_id}: non-finite lhs/rhs ({lhs}, {rhs})")
    ctx = context
    return BoundReport(
        bound_id=bound_id,
        d=ctx.d if ctx else 0,
        M=ctx.M if ctx else 0,
        lhs=float(lhs),
        rhs=float(rhs),
        slack=float(slack),
        holds=bool(slack >= -tol),
        purity=ctx.purity if ctx else float("nan"),
        entropy=ctx.entropy if ctx else float("nan"),
        state_label=state_label,
    )


def check_lower_bound(bound_id: str, lhs: float, rhs: float, tol: float = DEFAULT_TOL,
                      context: MubBoundParams | None = None, state_label: str = "") -> BoundReport:
    return _check(bound_id, lhs, rhs, lhs - rhs, tol, context, state_label)


def check_upper_bound(bound_id: str, lhs: float, rhs: float, tol: float = DEFAULT_TOL,
                      context: MubBoundParams | None = None, state_label: str = "") -> BoundReport:
    return _check(bound_id, lhs, rhs, rhs - lhs, tol, context, state_label)


def check_bound(bound_id: str, lhs: float, rhs: float, tol: float = DEFAULT_TOL,
                context: MubBoundParams | None = None, state_label: str = "") -> BoundReport:
    """Dispatch to the lower- or upper-bound check by identifier."""
    fn = check_lower_bound if bound_kind(bound_id) == "lower" else check_upper_bound
    return fn(bound_id, lhs, rhs, tol, context, state_label)
