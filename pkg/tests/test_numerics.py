import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian, random_unitary
from mubcoh.errors import DegenerateDimension, DomainError, NotHermitian
from mubcoh.numerics import (
    apply_spectral_function, hermitian_eig, norms, singular_values, spectral_norm, trace_norm,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_identity_spectrum():
    s = hermitian_eig(np.eye(3))
    np.testing.assert_allclose(s.eigenvalues, [1, 1, 1])


def test_pauli_x_eigenpairs():
    s = hermitian_eig(PAULI_X)
    np.testing.assert_allclose(s.eigenvalues, [-1, 1], atol=1e-15)
    v = s.eigenvectors
    # eigenvector for -1 is (1,-1)/sqrt2 and for +1 is (1,1)/sqrt2, up to phase
    assert abs(abs(np.vdot(v[:, 0], np.array([1, -1]) / np.sqrt(2))) - 1) < 1e-12
    assert abs(abs(np.vdot(v[:, 1], np.array([1, 1]) / np.sqrt(2))) - 1) < 1e-12


def test_reconstruction_random_5x5(rng):
    a = random_hermitian(5, rng)
    s = hermitian_eig(a)
    np.testing.assert_allclose(s.reconstruct(), a, atol=1e-10)


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


def test_small_asymmetry_is_symmetrized():
    a = np.array([[1.0, 0.5 + 1e-11], [0.5, 2.0]])
    s = hermitian_eig(a)
    assert np.all(np.isreal(s.eigenvalues))


def test_rejects_empty_and_non_square():
    with pytest.raises(DegenerateDimension):
        hermitian_eig(np.zeros((0, 0)))
    with pytest.raises(ValueError):
        hermitian_eig(np.zeros((2, 3)))


def test_sqrt_of_diagonal():
    out = apply_spectral_function(np.diag([4.0, 9.0]), "sqrt")
    np.testing.assert_allclose(out, np.diag([2.0, 3.0]), atol=1e-14)


def test_log_of_half_identity():
    out = apply_spectral_function(np.eye(2) / 2, "log")
    np.testing.assert_allclose(out, -np.log(2) * np.eye(2), atol=1e-14)


def test_identity_function_returns_input(rng):
    a = random_hermitian(4, rng)
    np.testing.assert_allclose(apply_spectral_function(a, lambda w: w), a, atol=1e-10)


def test_sqrt_of_negative_raises():
    with pytest.raises(DomainError):
        apply_spectral_function(np.diag([1.0, -0.5]), "sqrt")


def test_sqrt_clamps_roundoff_negatives():
    out = apply_spectral_function(np.diag([1.0, -1e-14]), "sqrt")
    np.testing.assert_allclose(out, np.diag([1.0, 0.0]))


def test_log_maps_null_space_to_zero():
    out = apply_spectral_function(np.diag([1.0, 0.0]), "log")
    np.testing.assert_allclose(out, np.zeros((2, 2)))


@pytest.mark.parametrize("x, expected", [
    (PAULI_X, (2.0, 1.0)),
    (np.zeros((3, 3)), (0.0, 0.0)),
    (np.diag([1.0, 0.0]), (1.0, 1.0)),
])
def test_norm_examples(x, expected):
    np.testing.assert_allclose(norms(x), expected, atol=1e-14)


def test_singular_values_match_svd(rng):
    x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    np.testing.assert_allclose(singular_values(x), np.sort(np.linalg.svd(x, compute_uv=False)), rtol=1e-10)


def test_rank_deficient_singular_values_are_exact_zeros():
    v = np.array([1.0, 1j, 0.5])
    sv = singular_values(np.outer(v, v.conj()))
    assert np.count_nonzero(sv) == 1


@settings(max_examples=50, deadline=None)
@given(d=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_eigenvalues_sorted_and_sum_to_trace(d, seed):
    a = random_hermitian(d, np.random.default_rng(seed))
    w = hermitian_eig(a).eigenvalues
    assert np.all(np.diff(w) >= 0)
    assert abs(w.sum() - np.trace(a).real) < 1e-10


@settings(max_examples=50, deadline=None)
@given(d=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_norm_ordering(d, seed):
    r = np.random.default_rng(seed)
    x = r.normal(size=(d, d)) + 1j * r.normal(size=(d, d))
    tn, sn = norms(x)
    assert tn >= sn - 1e-12 >= -1e-12
    assert tn <= d * sn + 1e-12
    assert trace_norm(x) == tn and spectral_norm(x) == sn


@settings(max_examples=50, deadline=None)
@given(d=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_norms_unitarily_invariant(d, seed):
    r = np.random.default_rng(seed)
    x = r.normal(size=(d, d)) + 1j * r.normal(size=(d, d))
    u, w = random_unitary(d, r), random_unitary(d, r)
    np.testing.assert_allclose(norms(u @ x @ w), norms(x), atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(d=st.integers(1, 5), seed=st.integers(0, 2**32 - 1),
       cf=st.lists(st.floats(-2, 2), min_size=1, max_size=3),
       cg=st.lists(st.floats(-2, 2), min_size=1, max_size=3))
def test_spectral_functions_compose(d, seed, cf, cg):
    a = random_hermitian(d, np.random.default_rng(seed))
    f = np.polynomial.Polynomial(cf)
    g = np.polynomial.Polynomial(cg)
    once = apply_spectral_function(a, lambda w: f(g(w)))
    twice = apply_spectral_function(apply_spectral_function(a, g), f)
    scale = max(1.0, np.max(np.abs(once)))
    np.testing.assert_allclose(twice, once, atol=1e-9 * scale)
