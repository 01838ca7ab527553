import itertools

import numpy as np
import pytest

from hyperconf.core import SampleSpace, from_maximal_sets
from hyperconf.errors import InputError, SpaceMismatchError
from hyperconf.heyting import (
    construct, enumerate_hyperconfusions, event, full, generated_sublattice, hyperconfusion_tables,
    implication, implication_by_enumeration, is_ordinary, join, meet, negation, null, oi, sing,
)

from helpers import TWO_BITS, two_edge_path, first_bit, random_hyp, second_bit


def labels(x):
    return x.maxs_labels()


def test_meet_of_bits_is_sing():
    assert meet(first_bit(), second_bit()) == sing(TWO_BITS)
    x = first_bit()
    assert meet(x, full(TWO_BITS)) == x
    assert meet(x, null(TWO_BITS)) == null(TWO_BITS)


def test_join_examples():
    j = join(first_bit(), second_bit())
    assert sorted(map(tuple, labels(j))) == sorted(
        [("00", "01"), ("10", "11"), ("00", "10"), ("01", "11")])
    assert join(first_bit(), null(TWO_BITS)) == first_bit()
    s = SampleSpace.of_size(4)
    assert labels(join(event(s, ["1", "2"]), event(s, ["3"]))) == [["3"], ["1", "2"]]


def test_implication_examples():
    m = implication(first_bit(), second_bit())
    assert sorted(map(tuple, labels(m))) == [("00", "10"), ("00", "11"), ("01", "10"), ("01", "11")]
    x = first_bit()
    assert implication(x, x) == full(TWO_BITS)
    assert implication(full(TWO_BITS), second_bit()) == second_bit()


def test_xor_from_butterfly():
    x, y = first_bit(), second_bit()
    m = meet(implication(x, y), implication(y, x))
    xor = oi(TWO_BITS, lambda w: int(w[0]) ^ int(w[1]))
    assert m == xor
    assert labels(xor) == [["01", "10"], ["00", "11"]]


def test_negation():
    x = two_edge_path()
    s = x.space
    assert negation(x) == event(s, ["4"])
    assert negation(negation(x)) == event(s, ["1", "2", "3"])
    assert negation(full(s)) == null(s)


def test_constructors():
    s = SampleSpace(("0", "1"))
    assert construct(s, "full").maxs == (s.full,)
    assert construct(s, "null").maxs == (0,)
    assert labels(construct(s, "sing")) == [["0"], ["1"]]
    assert construct(s, "event", []).maxs == (0,)
    assert construct(s, "oi", {"0": "a", "1": "a"}) == full(s)
    with pytest.raises(InputError):
        oi(s, {"0": 1})
    with pytest.raises(InputError):
        construct(s, "nope")


def test_is_ordinary():
    assert is_ordinary(oi(TWO_BITS, [1, 2, 1, 3]))
    assert not is_ordinary(join(first_bit(), second_bit()))
    assert is_ordinary(null(TWO_BITS))


def test_generated_sublattice_examples():
    assert len(generated_sublattice(two_edge_path())) == 9
    assert len(generated_sublattice(full(TWO_BITS))) == 2
    bit = sing(SampleSpace(("0", "1")))
    assert len(generated_sublattice(bit)) == 3


def test_space_mismatch():
    with pytest.raises(SpaceMismatchError):
        meet(first_bit(), sing(SampleSpace.of_size(4)))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_counts_and_tables_match_operations(n):
    tab = hyperconfusion_tables(n)
    assert len(tab) == {1: 2, 2: 5, 3: 19, 4: 167}[n]
    els = tab.elements
    # tables are built from whole families; the operations work on maxs only
    pairs = itertools.product(range(len(els)), repeat=2)
    if n == 4:
        pairs = list(pairs)[::7]
    for i, j in pairs:
        x, y = els[i], els[j]
        assert meet(x, y) == els[tab.meet[i, j]]
        assert join(x, y) == els[tab.join[i, j]]
        assert implication(x, y) == els[tab.imp[i, j]]


def test_implication_matches_enumeration(rng):
    for _ in range(300):
        n = int(rng.integers(1, 8))
        s = SampleSpace.of_size(n)
        x, y = random_hyp(rng, n, s), random_hyp(rng, n, s)
        assert implication(x, y) == implication_by_enumeration(x, y)


@pytest.mark.parametrize("n", [2, 3])
def test_heyting_laws_exhaustive(n):
    tab = hyperconfusion_tables(n)
    k = len(tab)
    leq = tab.meet == np.arange(k)[:, None]
    idx = np.arange(k)
    M, J, I = tab.meet, tab.join, tab.imp
    assert (M == M.T).all() and (J == J.T).all()
    assert (M[idx, idx] == idx).all() and (J[idx, idx] == idx).all()
    assert (M[M[:, :, None], idx[None, None, :]] == M[idx[:, None, None], M[None, :, :]]).all()
    assert (J[J[:, :, None], idx[None, None, :]] == J[idx[:, None, None], J[None, :, :]]).all()
    assert (M[idx[:, None], J] == idx[:, None]).all()
    # distributivity z∧(x∨y) = (z∧x)∨(z∧y)
    assert (M[idx[:, None, None], J[None, :, :]] == J[M[:, :, None], M[:, None, :]]).all()
    # adjunction z∧x ≤ y  <=>  z ≤ x→y
    assert (leq[M[:, :, None], idx[None, None, :]] == leq[idx[:, None, None], I[None, :, :]]).all()


def test_negation_laws_exhaustive():
    for n in (1, 2, 3):
        for x in enumerate_hyperconfusions(n):
            nx = negation(x)
            assert negation(negation(nx)) == nx
            is_event = len(x.maxs) == 1
            assert (negation(negation(x)) == x) == is_event


def test_currying_and_butterfly_identity(rng):
    for _ in range(200):
        n = int(rng.integers(1, 6))
        s = SampleSpace.of_size(n)
        x, y, m = (random_hyp(rng, n, s) for _ in range(3))
        assert implication(meet(x, m), y) == implication(m, implication(x, y))
        assert meet(implication(x, y), implication(y, x)) == implication(join(x, y), meet(x, y))


def test_generated_at_most_nine_for_n4():
    worst = 0
    for x in enumerate_hyperconfusions(4):
        worst = max(worst, len(generated_sublattice(x)))
    assert worst == 9


def test_large_implication_is_fast():
    # 25 outcomes are beyond subset enumeration; the cylinder method handles them
    k = 5
    s = SampleSpace(tuple(f"{a}{b}" for a in range(k) for b in range(k)))
    x = oi(s, lambda w: w[0])
    y = oi(s, lambda w: w[1])
    m = meet(implication(x, y), implication(y, x))
    assert len(m.maxs) == 120
