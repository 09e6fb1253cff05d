import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grrforge import census, matgrp, smallgrp
from grrforge.smallgrp import CacheError, EnumerationRefused

COUNTS = [
    ("SL", 2, 2, 6, 3),
    ("SL", 2, 4, 60, 15),
    ("SL", 3, 2, 168, 21),
    ("SL", 4, 2, 20160, 315),
    ("Sp", 4, 2, 720, 75),
    ("SL", 2, 7, 336, 1),
    ("PSL", 2, 7, 168, 21),
    ("PSL", 2, 11, 660, 55),
    ("SL", 3, 4, 60480, 315),
    ("PSL", 3, 4, 20160, 315),
    ("GL", 3, 4, 181440, 315),
    ("Sp", 4, 3, 51840, 91),
    ("OmegaPlus", 4, 2, 36, 15),
    ("OmegaPlus", 4, 4, 3600, 255),
    ("OmegaPlus", 6, 2, 20160, 315),
    ("OmegaPlus", 4, 8, 254016, 4095),
    ("OmegaMinus", 4, 2, 60, 15),
    ("OmegaMinus", 4, 4, 4080, 255),
    ("OmegaMinus", 6, 2, 25920, 315),
    ("OmegaMinus", 4, 8, 262080, 4095),
]


@pytest.mark.parametrize("family,n,q,order,i2", COUNTS)
def test_enumeration_counts_and_involutions(family, n, q, order, i2, table):
    t = table(family, n, q)
    assert len(t) == order == matgrp.group_order(t.spec)
    assert t.i2 == i2
    assert np.all(np.diff(t.keys) > 0)


@pytest.mark.slow
@pytest.mark.parametrize("family,n,q,order,i2", [("Sp", 4, 4, 979200, 4335), ("Sp", 6, 2, 1451520, 5103)])
def test_larger_enumerations(family, n, q, order, i2):
    t = smallgrp.enumerate_group(matgrp.make_spec(family, n, q))
    assert len(t) == order and t.i2 == i2


def test_enumeration_refuses_above_cap():
    with pytest.raises(EnumerationRefused):
        smallgrp.enumerate_group(matgrp.make_spec("PSL", 4, 4))
    with pytest.raises(EnumerationRefused):
        smallgrp.enumerate_group(matgrp.make_spec("SL", 3, 2), cap=100)


def test_involution_count_against_direct_squaring(table):
    t = table("SL", 3, 2)
    E = t.elements()
    sq = matgrp.mul(t.spec, E, E)
    is_one = (sq == np.eye(3, dtype=np.int64)).all(axis=(1, 2))
    brute = set(np.flatnonzero(is_one)) - {t.identity_index}
    assert set(t.involutions.tolist()) == brute


def test_element_orders_against_scalar_computation(table):
    t = table("SL", 3, 2)
    scalar = [matgrp.element_order(t.spec, t.element(i)) for i in range(len(t))]
    assert t.orders.tolist() == scalar
    values, counts = np.unique(t.orders, return_counts=True)
    assert dict(zip(values.tolist(), counts.tolist())) == {1: 1, 2: 21, 3: 56, 4: 42, 7: 48}


def oracle_subgroup(spec, gens):
    """Closure by repeated multiplication of python tuples."""
    key = lambda m: tuple(matgrp.canonical(spec, m).ravel())  # noqa: E731
    seen = {key(matgrp.identity(spec))}
    frontier = [matgrp.identity(spec)]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = matgrp.mul(spec, a, g)
                if key(b) not in seen:
                    seen.add(key(b))
                    nxt.append(b)
        frontier = nxt
    return len(seen)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 167), st.integers(0, 167), st.integers(0, 167))
def test_generation_is_symmetric_and_conjugation_invariant(i, j, k):
    t = smallgrp.enumerate_group(matgrp.make_spec("SL", 3, 2))
    x, y, c = t.element(i), t.element(j), t.element(k)
    gen = smallgrp.generates(t, x, y)
    assert gen == smallgrp.generates(t, y, x)
    cinv = matgrp.inverse(t.spec, c)
    conj = lambda g: matgrp.mul(t.spec, matgrp.mul(t.spec, cinv, g), c)  # noqa: E731
    assert gen == smallgrp.generates(t, conj(x), conj(y))
    assert smallgrp.subgroup_size(t, x, y) == oracle_subgroup(t.spec, [x, y])


def test_generates_rejects_foreign_elements(table):
    t = table("SL", 3, 2)
    with pytest.raises(matgrp.GroupError):
        smallgrp.generates(t, np.eye(3, dtype=int), np.zeros((3, 3), dtype=int))


def test_multiplication_permutations(table):
    t = table("PSL", 2, 7)
    g = t.element(17)
    right, left = t.right_mult_perm(g), t.left_mult_perm(g)
    assert sorted(right) == list(range(len(t)))
    for i in (0, 5, 99):
        assert right[i] == t.index_of(matgrp.mul(t.spec, t.element(i), g))
        assert left[i] == t.index_of(matgrp.mul(t.spec, g, t.element(i)))
    inv = t.inverse_index(17)
    assert right[inv] == t.identity_index


def test_sample_involution_is_uniform(table):
    t = table("SL", 2, 2)
    rng = np.random.default_rng(42)
    draws = [t.index_of(smallgrp.sample_involution(t, rng)) for _ in range(30000)]
    _, counts = np.unique(draws, return_counts=True)
    assert len(counts) == 3
    assert np.all(np.abs(counts / len(draws) - 1 / 3) < 0.02)


def test_sample_involution_needs_involutions(table):
    t = smallgrp.enumerate_group(matgrp.make_spec("perm", 3, generators=[[1, 2, 0]]))
    with pytest.raises(matgrp.GroupError):
        smallgrp.sample_involution(t, np.random.default_rng(0))


@pytest.mark.parametrize("n,q,l,expected", [(3, 2, 1, 8), (4, 2, 1, 192), (4, 2, 2, 96), (3, 4, 1, 576)])
def test_gl_centralizers(n, q, l, expected, table):
    t = table("GL", n, q)
    j = matgrp.suzuki_involution(n, l, t.spec.field)
    assert smallgrp.centralizer_order(t, j) == expected == census.gl_centralizer_order(n, l, q)


def test_matrix_centralizer_agrees_with_table(table):
    t = table("SL", 4, 2)
    j = matgrp.suzuki_involution(4, 2, t.spec.field)
    C = smallgrp.matrix_centralizer(t.spec, j)
    assert len(C) == smallgrp.centralizer_order(t, j) == 96
    assert smallgrp.matrix_centralizer_involutions(t.spec, j) == smallgrp.centralizer_involution_count(t, j) == 27


def test_matrix_centralizer_sl44():
    spec = matgrp.make_spec("SL", 4, 4)
    j = matgrp.suzuki_involution(4, 2, spec.field)
    C = smallgrp.matrix_centralizer(spec, j)
    assert len(C) == 15360
    assert all(matgrp.in_group(spec, g) for g in C[:50])
    assert smallgrp.matrix_centralizer_involutions(spec, j) == 495


def test_cache_round_trip(tmp_path):
    spec = matgrp.make_spec("SL", 3, 2)
    t = smallgrp.enumerate_group(spec, cache_dir=tmp_path)
    path = tmp_path / smallgrp.cache_filename(spec)
    assert path.exists()
    again = smallgrp.load_table(path, spec)
    assert np.array_equal(again.keys, t.keys)
    assert np.array_equal(smallgrp.enumerate_group(spec, cache_dir=tmp_path).keys, t.keys)


def test_perm_cache_names_are_stable():
    spec = matgrp.make_spec("perm", 3, generators=[[1, 2, 0]])
    assert smallgrp.cache_filename(spec) == smallgrp.cache_filename(
        matgrp.make_spec("perm", 3, generators=[[1, 2, 0]]))


@pytest.mark.parametrize("damage", ["magic", "truncate", "shuffle", "descriptor"])
def test_corrupt_cache_is_rejected_and_rebuilt(tmp_path, damage):
    spec = matgrp.make_spec("SL", 3, 2)
    t = smallgrp.enumerate_group(spec, cache_dir=tmp_path)
    path = tmp_path / smallgrp.cache_filename(spec)
    data = bytearray(path.read_bytes())
    if damage == "magic":
        data[:5] = b"XXXXX"
    elif damage == "truncate":
        data = data[: len(data) - 12]
    elif damage == "shuffle":
        data[-8:], data[-16:-8] = data[-16:-8], data[-8:]
    path.write_bytes(bytes(data))
    target = matgrp.make_spec("GL", 3, 2) if damage == "descriptor" else spec
    if damage == "descriptor":
        path = path.rename(tmp_path / smallgrp.cache_filename(target))
    with pytest.raises(CacheError):
        smallgrp.load_table(path, target)
    rebuilt = smallgrp.enumerate_group(target, cache_dir=tmp_path)
    assert len(rebuilt) == 168
    assert smallgrp.load_table(path, target).keys.tolist() == rebuilt.keys.tolist()
    if target == spec:
        assert np.array_equal(rebuilt.keys, t.keys)


@pytest.mark.slow
def test_sp62_involutions_exceed_ledger_value_at_q2():
    # informational: q = 2 lies outside the ledger row's stated range
    t = smallgrp.enumerate_group(matgrp.make_spec("Sp", 6, 2))
    assert t.i2 == 5103 > census.ledger("PSp", 6).iG(2) == 4096
