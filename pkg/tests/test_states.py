import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_unitary
from mubcoh.errors import BadDimension, BadRank, InvalidState, ParseError
from mubcoh.mub import Basis
from mubcoh.measures import probabilities
from mubcoh.states import (
    DensityMatrix, PureState, derive_seed, parse_state_file, purity, sample_density, sample_pure,
    sample_unitary, serialize_state, von_neumann_entropy,
)


def test_density_validation():
    with pytest.raises(InvalidState):
        DensityMatrix(np.diag([0.7, 0.4]))
    with pytest.raises(InvalidState):
        DensityMatrix(np.diag([1.2, -0.2]))
    with pytest.raises(InvalidState):
        DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))


def test_pure_state_needs_unit_norm():
    with pytest.raises(InvalidState):
        PureState(np.array([1.0, 1.0]))
    assert PureState.normalized([1.0, 1.0]).dim == 2


def test_purity_examples():
    assert purity(PureState.normalized([1, 2j, 3])) == pytest.approx(1.0, abs=1e-12)
    assert purity(DensityMatrix.maximally_mixed(4)) == pytest.approx(0.25, abs=1e-15)
    assert purity(DensityMatrix(np.diag([0.75, 0.25]))) == pytest.approx(5 / 8, abs=1e-15)


def test_entropy_examples():
    assert von_neumann_entropy(PureState.normalized([1, 1j])) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(DensityMatrix.maximally_mixed(5)) == pytest.approx(math.log(5), abs=1e-12)
    assert von_neumann_entropy(DensityMatrix(np.diag([0.75, 0.25]))) == pytest.approx(0.5623, abs=1e-4)


def test_sample_pure_deterministic_and_normalized():
    a, b = sample_pure(4, 12345), sample_pure(4, 12345)
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert abs(np.linalg.norm(a.amplitudes) - 1) < 1e-12
    assert not np.array_equal(a.amplitudes, sample_pure(4, 12346).amplitudes)


def test_sample_pure_haar_first_probability():
    basis = Basis.computational(3)
    p0 = [probabilities(basis, sample_pure(3, derive_seed(7, t)))[0] for t in range(100_000)]
    assert abs(np.mean(p0) - 1 / 3) < 3e-3


def test_sample_pure_rejects_bad_dimension():
    with pytest.raises(BadDimension):
        sample_pure(1, 0)


def test_rank_one_density_is_pure():
    assert purity(sample_density(4, 1, 3)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("rank", [1, 2, 3, 5])
def test_rank_bound(rank):
    w = sample_density(5, rank, 99).eigenvalues()
    assert np.sum(w > 1e-10) <= rank


def test_sample_density_deterministic():
    assert np.array_equal(sample_density(3, 2, 8).matrix, sample_density(3, 2, 8).matrix)


def test_sample_density_rejects_bad_rank():
    with pytest.raises(BadRank):
        sample_density(3, 4, 0)
    with pytest.raises(BadRank):
        sample_density(3, 0, 0)


def test_sample_unitary():
    u = sample_unitary(5, 11)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(5), atol=1e-10)
    assert abs(abs(np.linalg.det(u)) - 1) < 1e-9
    assert np.array_equal(u, sample_unitary(5, 11))


def test_derive_seed_distinguishes_coordinates():
    seeds = {derive_seed(0, d, m, e, t) for d in (2, 3) for m in (2, 3) for e in ("pure", "mixed") for t in range(5)}
    assert len(seeds) == 40
    assert derive_seed(1, 2, "pure") == derive_seed(1, 2, "pure")
    assert 0 <= derive_seed(2**64 - 1, 5) < 2**64


def test_state_file_round_trip():
    rho = sample_density(3, 2, 4)
    back = parse_state_file(serialize_state(rho))
    np.testing.assert_array_equal(back.matrix, rho.matrix)
    psi = sample_pure(3, 4)
    back = parse_state_file(serialize_state(psi))
    np.testing.assert_array_equal(back.amplitudes, psi.amplitudes)


@pytest.mark.parametrize("content", [
    b"not json",
    b'{"kind": "mixed", "d": 2}',
    b'{"kind": "pure", "d": 2, "vector": [[1, 0]]}',
    b'{"kind": "density", "d": 2, "matrix": [[[1, 0], [0, 0]]]}',
])
def test_state_file_rejects_malformed(content):
    with pytest.raises(ParseError):
        parse_state_file(content)


@settings(max_examples=40, deadline=None)
@given(d=st.integers(2, 6), seed=st.integers(0, 2**63))
def test_entropy_unitarily_invariant(d, seed):
    rho = sample_density(d, d, seed)
    u = random_unitary(d, np.random.default_rng(seed % 2**32))
    assert abs(von_neumann_entropy(rho.rotated(u)) - von_neumann_entropy(rho)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(d=st.integers(2, 7), rank_frac=st.floats(0, 1), seed=st.integers(0, 2**63))
def test_sampled_density_invariants(d, rank_frac, seed):
    rank = 1 + int(rank_frac * (d - 1))
    rho = sample_density(d, rank, seed)
    pur = purity(rho)
    assert 1 / d - 1e-10 <= pur <= 1 + 1e-10
    assert rho.eigenvalues().min() >= -1e-10
    assert abs(np.trace(rho.matrix).real - 1) < 1e-12
