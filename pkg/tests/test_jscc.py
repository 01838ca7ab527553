import itertools
import math

import numpy as np
import pytest

from hyperconf.core import Hyperconfusion, SampleSpace, from_maximal_sets, maximal_sets
from hyperconf.entropy import ProbSpace, capacity, shannon_entropy
from hyperconf.errors import InputError, SizeLimitError, SpaceMismatchError
from hyperconf.heyting import full, join, null, oi, sing
from hyperconf.jscc import (
    ChannelSpec, SetValuedMap, channel_instance, check_code, confuses_onto, confusion_ratio_bound,
    image_hyperconfusion, is_hyper_expanding, is_hyperconfusable, measure_expanding_by_flow,
    measure_expanding_by_subsets, preimage_hyperconfusion,
)
from hyperconf.product import product

from helpers import c5, random_hyp, random_pmf, triangle, uniform


def identity_map(s):
    return SetValuedMap(s, s, tuple(1 << i for i in range(s.size)))


def test_image_examples(rng):
    s = SampleSpace.of_size(4)
    x = random_hyp(rng, 4, s)
    assert image_hyperconfusion(identity_map(s), x) == x
    empty = SetValuedMap(s, SampleSpace(("a", "b")), (0, 0, 0, 0))
    assert image_hyperconfusion(empty, x).is_null()
    # the preimage of sing under a function is the function's ordinary information
    g = SampleSpace(("a", "b", "c"))
    f = ["a", "c", "a", "b"]
    beta = SetValuedMap(s, g, tuple(1 << g.index(v) for v in f))
    assert preimage_hyperconfusion(beta, sing(g)) == oi(s, f)


def test_image_space_mismatch():
    s = SampleSpace.of_size(3)
    with pytest.raises(SpaceMismatchError):
        image_hyperconfusion(identity_map(s), sing(SampleSpace.of_size(4)))
    with pytest.raises(InputError):
        SetValuedMap(s, s, (1, 2))


def test_hyperconfusable_examples(rng):
    x = c5()
    two = SampleSpace(("a", "b"))
    beta = SetValuedMap.from_labels(x.space, two, {"1": ["a"], "2": [], "3": ["b"], "4": [], "5": []})
    assert is_hyperconfusable(beta, x, sing(two))
    s = SampleSpace.of_size(3)
    assert not is_hyperconfusable(identity_map(s), sing(s), null(s))
    any_map = SetValuedMap(s, two, tuple(int(v) for v in rng.integers(0, 4, size=3)))
    assert is_hyperconfusable(any_map, random_hyp(rng, 3, s), full(two))


def test_hyper_expanding_examples():
    s = SampleSpace.of_size(3)
    p = ProbSpace(s, (0.2, 0.3, 0.5))
    assert is_hyper_expanding(identity_map(s), p, p, sing(s), join(sing(s), full(s)))
    one = SampleSpace(("z",))
    const = SetValuedMap(s, one, (1, 1, 1))
    assert is_hyper_expanding(const, p, uniform(one), sing(s), full(one))
    q = ProbSpace(s, (0.5, 0.3, 0.2))
    assert not is_hyper_expanding(identity_map(s), p, q, sing(s), sing(s))


def _random_expanding(rng, n, m):
    src, tgt = SampleSpace.of_size(n), SampleSpace(tuple(f"g{j}" for j in range(m)))
    images = tuple(int(v) for v in rng.integers(1, 1 << m, size=n))
    beta = SetValuedMap(src, tgt, images)
    p = random_pmf(rng, src)
    q = np.zeros(m)
    for w, img in enumerate(images):
        idx = [j for j in range(m) if (img >> j) & 1]
        q[idx] += p.pmf[w] * rng.dirichlet(np.ones(len(idx)))
    qs = ProbSpace.normalized(tgt, q)
    x = random_hyp(rng, n, src, full_support=True)
    y = join(image_hyperconfusion(beta, x), random_hyp(rng, m, tgt))
    return beta, p, qs, x, y


def test_subset_and_flow_checks_agree(rng):
    agree_false = 0
    for _ in range(100):
        n, m = int(rng.integers(1, 8)), int(rng.integers(1, 6))
        beta, p, q, _, _ = _random_expanding(rng, n, m)
        if rng.random() < 0.5:
            q = random_pmf(rng, beta.target)
        a, b = measure_expanding_by_subsets(beta, p, q), measure_expanding_by_flow(beta, p, q)
        assert a == b
        agree_false += not a
    assert agree_false > 0


def test_entropy_monotone_under_hyper_expanding_maps(rng):
    checked = 0
    while checked < 50:
        n, m = int(rng.integers(1, 7)), int(rng.integers(1, 6))
        beta, p, q, x, y = _random_expanding(rng, n, m)
        if not is_hyper_expanding(beta, p, q, x, y):
            continue
        assert shannon_entropy(x, p) >= shannon_entropy(y, q) - 1e-6
        checked += 1


def _onto_brute(x, y):
    gamma = y.space
    for images in itertools.product(range(1 << gamma.size), repeat=x.space.size):
        beta = SetValuedMap(x.space, gamma, images)
        if beta.is_surjective() and is_hyperconfusable(beta, x, y):
            return True
    return False


def test_confuses_onto_examples():
    x = c5()
    two, three = SampleSpace(("a", "b")), SampleSpace(("a", "b", "c"))
    beta = confuses_onto(x, sing(two))
    assert beta is not None and beta.is_surjective() and is_hyperconfusable(beta, x, sing(two))
    assert check_code(beta, x, sing(two))
    assert confuses_onto(x, sing(three)) is None
    s = SampleSpace.of_size(3)
    beta = confuses_onto(sing(s), full(two))
    assert beta is not None and check_code(beta, sing(s), full(two))


def test_confuses_onto_matches_brute_force(rng):
    for _ in range(60):
        n, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        src, tgt = SampleSpace.of_size(n), SampleSpace(tuple(f"g{j}" for j in range(m)))
        x, y = random_hyp(rng, n, src), random_hyp(rng, m, tgt)
        beta = confuses_onto(x, y)
        assert (beta is not None) == _onto_brute(x, y)
        if beta is not None:
            assert beta.is_surjective() and is_hyperconfusable(beta, x, y)
            assert check_code(beta, x, y)


def test_confuses_onto_cap():
    with pytest.raises(SizeLimitError):
        confuses_onto(sing(SampleSpace.of_size(9)), sing(SampleSpace.of_size(8)))


def test_channel_instances():
    ins = ("1", "2", "3", "4", "5")
    src = ProbSpace.uniform(SampleSpace(("u", "v")))
    noiseless = ChannelSpec(ins, ins, np.eye(5).tolist())
    x, y = channel_instance(noiseless, [("u", "u"), ("v", "v")], src)
    assert x == sing(x.space) and y == sing(y.space)
    typewriter = ChannelSpec(ins, ins, [[0.5 if j in (i, (i + 1) % 5) else 0.0 for j in range(5)]
                                        for i in range(5)])
    x, _ = channel_instance(typewriter, [("u", "u"), ("v", "v")], src)
    assert x == c5()
    # list decoding with lists of size 2 over 4 messages
    msgs = SampleSpace(("a", "b", "c", "d"))
    lists = list(itertools.combinations(msgs.labels, 2))
    allowed = [(u, list(l)) for l in lists for u in l]
    _, y = channel_instance(noiseless, allowed, ProbSpace.uniform(msgs))
    assert y == Hyperconfusion(msgs, maximal_sets(msgs.subset(l) for l in lists))


def test_channel_validation():
    with pytest.raises(InputError):
        ChannelSpec(("a",), ("x", "y"), [[0.5, 0.6]])
    with pytest.raises(InputError):
        ChannelSpec(("a",), ("x", "y"), [[1.5, -0.5]])
    with pytest.raises(InputError):
        ChannelSpec(("a", "b"), ("x",), [[1.0]])
    ch = ChannelSpec(("a",), ("x",), [[1.0]])
    with pytest.raises(InputError):
        channel_instance(ch, [], ProbSpace(SampleSpace(("u", "v")), (1.0, 0.0)))


def test_ratio_examples():
    r = confusion_ratio_bound(sing(SampleSpace.of_size(4)), sing(SampleSpace.of_size(2)))
    assert r.upper == pytest.approx(2.0)
    assert (1, 2, True) in r.table and r.lower >= 2
    r = confusion_ratio_bound(c5(), sing(SampleSpace.of_size(2)))
    assert (1, 1, True) in r.table and r.lower >= 1
    assert r.upper == pytest.approx(capacity(c5()))
    assert r.upper == pytest.approx(math.log2(2.5))
    t = triangle()
    r = confusion_ratio_bound(t, t)
    assert r.upper >= 1 and (1, 1, True) in r.table
    assert r.lower <= r.upper + 1e-12


def test_capacity_tensorizes(rng):
    for _ in range(8):
        n = int(rng.integers(2, 4))
        x = random_hyp(rng, n, full_support=True)
        assert capacity(product([x, x])) == pytest.approx(2 * capacity(x), abs=2e-3)
