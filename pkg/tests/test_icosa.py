import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from braidhash.errors import InvalidInputError
from braidhash.icosa import GoldenScalar, build_group
from braidhash.su2 import IDENTITY, distance

SQRT5 = math.sqrt(5)
golden = st.builds(GoldenScalar, st.integers(-40, 40), st.integers(-40, 40))


def test_element_count_and_census(group):
    assert len(group) == 60
    assert group.order_census() == {1: 1, 2: 15, 3: 20, 5: 24}


def test_identity_row_and_inverses(group):
    assert np.array_equal(group.table[0], np.arange(60))
    assert group.inverse_index(0) == 0
    assert group.compose(0, 7) == 7
    for i in range(60):
        assert group.compose(i, group.inverse_index(i)) == 0
        assert group.compose(group.inverse_index(i), i) == 0
    involutions = [i for i in range(1, 60) if group.inverse_index(i) == i]
    assert len(involutions) == 15


def test_latin_square(group):
    for k in range(60):
        assert sorted(group.table[k]) == list(range(60))
        assert sorted(group.table[:, k]) == list(range(60))


def test_associativity_all_triples(group):
    t = group.table
    i, j, k = np.meshgrid(np.arange(60), np.arange(60), np.arange(60), indexing="ij")
    assert np.array_equal(t[t[i, j], k], t[i, t[j, k]])


def test_homomorphism_up_to_phase(group):
    for i in range(60):
        for j in range(60):
            prod = group.element_su2(i) @ group.element_su2(j)
            assert distance(prod, group.element_su2(group.compose(i, j))) < 1e-12


def test_separation(group):
    assert np.allclose(group.element_su2(0), IDENTITY)
    to_id = [distance(IDENTITY, group.element_su2(i)) for i in range(1, 60)]
    # smallest rotation is 72 degrees; chord 2 sin(72deg / 4) in this metric
    assert min(to_id) == pytest.approx(2 * math.sin(math.radians(18)), abs=1e-12)
    pair = min(distance(group.element_su2(i), group.element_su2(j)) for i in range(60) for j in range(i))
    assert pair >= 0.61


def test_canonical_representatives(group):
    for e in group.elements:
        first = next(c for c in e.quat if not c.is_zero())
        assert first.sign() > 0
        assert sum(float(c) ** 2 for c in e.quat) == pytest.approx(1.0, abs=1e-15)
    rest = [e.quat for e in group.elements[1:]]
    assert rest == sorted(rest)


def test_rebuild_is_identical(group):
    build_group.cache_clear()
    again = build_group()
    assert again.group_hash == group.group_hash
    assert np.array_equal(again.table, group.table)


def test_group_hash_frozen(group):
    assert group.group_hash == "494d30cd2ea67643"


def test_index_errors(group):
    with pytest.raises(InvalidInputError):
        group.compose(60, 0)
    with pytest.raises(InvalidInputError):
        group.inverse_index(-1)


@given(golden, golden)
def test_golden_scalar_matches_floats(x, y):
    assert float(x + y) == pytest.approx(float(x) + float(y), abs=1e-9)
    a16, b16 = x.times16(y)
    assert (a16 + b16 * SQRT5) / 16 == pytest.approx(float(x) * float(y), abs=1e-9)
    assert (x < y) == (float(x) < float(y) - 1e-12) or abs(float(x) - float(y)) < 1e-12
    assert x.sign() == int(np.sign(round(float(x), 12)))


def test_off_lattice_product_rejected():
    with pytest.raises(ArithmeticError):
        GoldenScalar.from_sixteenths(1, 0)
