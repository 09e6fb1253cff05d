import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grrforge.finfield import GF, FieldError, arith, field_new, is_irreducible, least_irreducible

BINARY_DEGREES = range(1, 9)  # q = 2 .. 256


def schoolbook_mul(a, b, red):
    """Independent oracle: shift-and-add product, then long division by red."""
    prod = 0
    for i in range(b.bit_length()):
        if (b >> i) & 1:
            prod ^= a << i
    deg = red.bit_length() - 1
    for shift in range(prod.bit_length() - 1, deg - 1, -1):
        if (prod >> shift) & 1:
            prod ^= red << (shift - deg)
    return prod


@pytest.mark.parametrize("f,poly", [(3, 0b1011), (4, 0b10011), (8, 0b100011011)])
def test_reduction_polynomials(f, poly):
    assert field_new("binary", f).reduction == poly


def test_reduction_is_least_irreducible():
    for f in range(2, 10):
        red = least_irreducible(f)
        assert is_irreducible(red)
        assert not any(is_irreducible(c) for c in range(1 << f, red))


def test_gf8_example():
    F = GF(8)
    assert F.mul(2, 4) == 3
    assert F.add(5, 3) == 6


def test_prime_field_example():
    assert GF(7).pow(3, 6) == 1
    assert arith(GF(7), "pow", 3, 6) == 1


@pytest.mark.parametrize("f", BINARY_DEGREES)
def test_binary_multiplication_matches_schoolbook(f):
    F = field_new("binary", f)
    q = F.q
    a, b = np.meshgrid(np.arange(q), np.arange(q), indexing="ij")
    table = F.mul_np(a, b)
    oracle = np.array([[schoolbook_mul(x, y, F.reduction) for y in range(q)] for x in range(q)])
    assert np.array_equal(table, oracle)
    assert F.mul(q - 1, q - 2) == oracle[q - 1, q - 2]


@pytest.mark.parametrize("f", BINARY_DEGREES)
def test_binary_field_axioms(f):
    F = field_new("binary", f)
    q = F.q
    a, b = np.meshgrid(np.arange(q), np.arange(q), indexing="ij")
    M = F.mul_np(a, b)
    assert np.array_equal(M, M.T)
    assert np.array_equal(M[1], np.arange(q))
    assert np.all(M[0] == 0)
    # every nonzero row is a permutation of the nonzero elements
    assert all(sorted(M[x, 1:]) == list(range(1, q)) for x in range(1, q))
    for x in range(1, q):
        assert F.mul(x, F.inv(x)) == 1
    # associativity and distributivity on all triples for small q, a sample otherwise
    rng = np.random.default_rng(f)
    triples = itertools.product(range(q), repeat=3) if q <= 16 else rng.integers(q, size=(3000, 3))
    for x, y, z in triples:
        x, y, z = int(x), int(y), int(z)
        assert F.mul(F.mul(x, y), z) == F.mul(x, F.mul(y, z))
        assert F.mul(x, y ^ z) == F.mul(x, y) ^ F.mul(x, z)


@pytest.mark.parametrize("q", [2, 4, 8, 16, 32, 64, 128, 256, 3, 5, 7, 11, 13])
def test_generator_has_full_order(q):
    F = GF(q)
    assert F.mult_order(F.generator) == q - 1
    powers = {F.pow(F.generator, k) for k in range(q - 1)}
    assert powers == set(range(1, q))


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 31])
def test_prime_field_axioms(p):
    F = GF(p)
    for a in range(p):
        for b in range(p):
            assert F.mul(a, b) == a * b % p
            assert F.add(a, b) == (a + b) % p
        if a:
            assert F.mul(a, F.inv(a)) == 1


def test_inverse_of_zero_raises():
    with pytest.raises(FieldError):
        GF(8).inv(0)
    with pytest.raises(FieldError):
        GF(7).inv(0)


@pytest.mark.parametrize("bad", [("binary", 0), ("binary", 17), ("prime", 9), ("prime", 2), ("ternary", 3)])
def test_invalid_fields_rejected(bad):
    with pytest.raises(FieldError):
        field_new(*bad)


def test_out_of_range_element_rejected():
    with pytest.raises(FieldError):
        GF(4).mul(4, 1)


def test_trace_is_additive_and_onto():
    for f in range(1, 7):
        F = field_new("binary", f)
        traces = [F.trace(a) for a in range(F.q)]
        assert set(traces) == {0, 1}
        assert traces.count(1) == F.q // 2
        for a in range(F.q):
            for b in range(F.q):
                assert F.trace(a ^ b) == traces[a] ^ traces[b]


def test_roots_of_unity():
    F = GF(16)
    assert sorted(F.roots_of_unity(5)) == sorted(x for x in range(1, 16) if F.pow(x, 5) == 1)
    assert len(F.roots_of_unity(5)) == 5
    assert F.roots_of_unity(2) == [1]


@settings(max_examples=200, deadline=None)
@given(f=st.integers(1, 12), data=st.data())
def test_field_laws_property(f, data):
    F = field_new("binary", f)
    a, b, c = (data.draw(st.integers(0, F.q - 1)) for _ in range(3))
    assert F.mul(a, b) == schoolbook_mul(a, b, F.reduction) if f > 1 else F.mul(a, b) == a & b
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.pow(a, F.q) == a
    if a:
        assert F.mul(a, F.inv(a)) == 1
        assert F.div(F.mul(a, b), a) == b
    assert F.frobenius(F.mul(a, b)) == F.mul(F.frobenius(a), F.frobenius(b))
