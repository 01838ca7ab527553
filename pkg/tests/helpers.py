"""Shared instance builders for the test suite."""
from __future__ import annotations

import numpy as np

from hyperconf.core import Hyperconfusion, SampleSpace, from_maximal_sets, maximal_sets
from hyperconf.entropy import ProbSpace

TWO_BITS = SampleSpace(("00", "01", "10", "11"))


def first_bit():
    return from_maximal_sets(TWO_BITS, [["00", "01"], ["10", "11"]])


def second_bit():
    return from_maximal_sets(TWO_BITS, [["00", "10"], ["01", "11"]])


def uniform(space):
    return ProbSpace.uniform(space)


def triangle():
    s = SampleSpace.of_size(3)
    return from_maximal_sets(s, [["1", "2"], ["2", "3"], ["1", "3"]])


def two_edge_path():
    s = SampleSpace.of_size(4)
    return from_maximal_sets(s, [["1", "2"], ["2", "3"]])


def c5():
    s = SampleSpace.of_size(5)
    return from_maximal_sets(s, [[str(i), str(i % 5 + 1)] for i in range(1, 6)])


def random_hyp(rng, n, space=None, full_support=False, max_sets=None):
    space = space or SampleSpace.of_size(n)
    k = int(rng.integers(1, (max_sets or 2 * n) + 1))
    sets = [int(rng.integers(0, 1 << n)) for _ in range(k)]
    if full_support:
        sets += [1 << i for i in range(n)]
    return Hyperconfusion(space, maximal_sets(sets))


def random_pmf(rng, space, zeros=False):
    w = rng.dirichlet(np.ones(space.size))
    if zeros and space.size > 1:
        w[rng.random(space.size) < 0.25] = 0.0
        if w.sum() == 0:
            w[0] = 1.0
    return ProbSpace.normalized(space, w)
