"""Mutually unbiased bases, coherence quantifiers and bound verification."""

from .bounds import BOUND_IDS, BoundReport, MubBoundParams, Povm, check_bound, evaluate, mim6_rhs, mub_povms
from .errors import MubcohError
from .harness import SweepConfig, compare_bounds, run_sweep, table1_intervals
from .measures import (
    fidelity,
    geometric_coherence_bounds,
    geometric_coherence_numeric,
    geometric_coherence_pure,
    index_of_coincidence,
    min_entropy,
    probabilities,
    rel_entropy_coherence,
    relative_entropy,
    shannon_entropy,
)
from .mub import Basis, MubSet, construct_mub, parse_mub_file, serialize_mub, verify_mub
from .states import DensityMatrix, PureState, sample_density, sample_pure, sample_unitary

__all__ = [
    "Basis",
    "BOUND_IDS",
    "BoundReport",
    "check_bound",
    "compare_bounds",
    "construct_mub",
    "DensityMatrix",
    "evaluate",
    "fidelity",
    "geometric_coherence_bounds",
    "geometric_coherence_numeric",
    "geometric_coherence_pure",
    "index_of_coincidence",
    "mim6_rhs",
    "min_entropy",
    "mub_povms",
    "MubBoundParams",
    "MubcohError",
    "MubSet",
    "parse_mub_file",
    "Povm",
    "probabilities",
    "PureState",
    "rel_entropy_coherence",
    "relative_entropy",
    "run_sweep",
    "sample_density",
    "sample_pure",
    "sample_unitary",
    "serialize_mub",
    "shannon_entropy",
    "SweepConfig",
    "table1_intervals",
    "verify_mub",
]

__version__ = "0.1.0"
