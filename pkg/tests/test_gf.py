import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mubcoh.gf import FieldElement, galois_field, is_irreducible, is_prime, prime_power, smallest_irreducible

FIELDS = [3, 5, 7, 9, 25, 27, 49, 125]


def test_prime_power_detection():
    assert prime_power(9) == (3, 2)
    assert prime_power(2) == (2, 1)
    assert prime_power(6) is None
    assert prime_power(1) is None
    assert [n for n in range(2, 30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_smallest_irreducible_known_polynomials():
    # coefficients low to high; x^2 + 1 is the first irreducible quadratic over Z_3
    assert smallest_irreducible(3, 2) == (1, 0, 1)
    assert smallest_irreducible(5, 2) == (2, 0, 1)
    assert smallest_irreducible(3, 3) == (1, 2, 0, 1)
    assert smallest_irreducible(7, 2) == (1, 0, 1)


def test_smallest_irreducible_is_minimal():
    p, n = 5, 2
    m = smallest_irreducible(p, n)
    for c in itertools.product(range(p), repeat=n):
        cand = tuple(reversed(c)) + (1,)
        if cand == m:
            break
        assert not is_irreducible(cand, p)


@pytest.mark.parametrize("q", FIELDS)
def test_field_axioms(q):
    f = galois_field(q)
    for a in range(q):
        assert f.add(a, 0) == a and f.mul(a, 1) == a
        assert f.add(a, f.neg[a]) == 0
        if a:
            assert any(f.mul(a, b) == 1 for b in range(1, q))
        assert 0 <= f.trace(a) < f.p


@pytest.mark.parametrize("q", [9, 25, 27])
def test_trace_is_additive_and_onto(q):
    f = galois_field(q)
    for a, b in itertools.product(range(q), repeat=2):
        assert f.trace(f.add(a, b)) == (f.trace(a) + f.trace(b)) % f.p
    assert {f.trace(a) for a in range(q)} == set(range(f.p))


def test_frobenius_fixes_prime_subfield():
    f = galois_field(27)
    for k in range(3):
        assert f.pow(k, 3) == k


@given(q=st.sampled_from(FIELDS), data=st.data())
def test_field_element_distributive(q, data):
    a, b, c = (FieldElement(galois_field(q), data.draw(st.integers(0, q - 1))) for _ in range(3))
    assert a * (b + c) == a * b + a * c
    assert (a - b) + b == a
    assert (a ** (q - 1)).index in (0, 1)


def test_field_element_rejects_foreign_operand():
    a = FieldElement(galois_field(9), 2)
    with pytest.raises(ValueError):
        a + FieldElement(galois_field(3), 1)
    with pytest.raises(TypeError):
        a * "x"
