import math

import pytest

from hyperconf.core import SampleSpace
from hyperconf.entropy import ProbSpace, min_entropy, shannon_entropy
from hyperconf.errors import InputError, SizeLimitError
from hyperconf.heyting import full, join, meet, null, oi, sing
from hyperconf.product import (
    embed, iid_embeddings, independence_test, product, product_pmf, product_space,
)

from helpers import TWO_BITS, first_bit, random_hyp, random_pmf, triangle, uniform

BIT = SampleSpace(("0", "1"))


def test_embedding_gives_first_bit():
    x = embed([sing(BIT), sing(BIT)], 1)
    assert x.space.labels == ("0:0", "0:1", "1:0", "1:1")
    assert x.maxs_labels() == [["0:0", "0:1"], ["1:0", "1:1"]]


def test_embedding_null_and_full():
    assert embed([null(BIT), sing(BIT)], 1).is_null()
    assert embed([full(BIT), sing(BIT)], 1).is_full()


def test_product_examples():
    assert product([sing(BIT), sing(BIT)]) == sing(product_space([BIT, BIT]))
    x = triangle()
    assert product([x, full(BIT)]) == embed([x, full(BIT)], 1)
    assert len(product([x, x]).maxs) == 9


def test_product_is_meet_of_embeddings(rng):
    for _ in range(20):
        a = SampleSpace(("a", "b", "c"))
        b = SampleSpace(("x", "y"))
        xs = [random_hyp(rng, 3, a), random_hyp(rng, 2, b)]
        assert product(xs) == meet(embed(xs, 1), embed(xs, 2))


def test_errors():
    with pytest.raises(InputError):
        embed([sing(BIT)], 2)
    with pytest.raises(InputError):
        product_space([SampleSpace(("a:b", "c"))])
    big = SampleSpace.of_size(9)
    with pytest.raises(SizeLimitError):
        product([sing(big), sing(big)])


def test_independence_examples():
    x, y = iid_embeddings(sing(BIT), 2)
    p = uniform(x.space)
    assert independence_test(x, y, p)
    o = oi(BIT, [0, 1])
    assert not independence_test(o, o, uniform(BIT))
    assert independence_test(full(TWO_BITS), first_bit(), uniform(TWO_BITS))


def test_additivity_under_independence(rng):
    for _ in range(15):
        a = SampleSpace(("a", "b", "c"))
        b = SampleSpace(("x", "y", "z"))
        x, y = random_hyp(rng, 3, a, full_support=True), random_hyp(rng, 3, b, full_support=True)
        pa, pb = random_pmf(rng, a), random_pmf(rng, b)
        p = product_pmf([pa, pb])
        ex, ey = embed([x, y], 1), embed([x, y], 2)
        assert independence_test(ex, ey, p)
        assert shannon_entropy(meet(ex, ey), p) == pytest.approx(
            shannon_entropy(x, pa) + shannon_entropy(y, pb), abs=1e-6)


def test_union_of_iid_trend():
    p1 = ProbSpace(BIT, (0.9, 0.1))
    x = sing(BIT)
    floor = min_entropy(x, p1)
    values = []
    for n in (1, 2, 3):
        embs = iid_embeddings(x, n)
        u = embs[0]
        for e in embs[1:]:
            u = join(u, e)
        values.append(shannon_entropy(u, product_pmf([p1] * n)))
    assert all(v >= floor - 1e-6 for v in values)
    assert values[2] <= values[0] + 1e-9
