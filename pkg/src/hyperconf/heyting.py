"""Heyting algebra operations on hyperconfusions, plus constructors.

Implication uses the identity

    2^B -> Y  =  downward closure of {(C & B) | ~B : C in maxs(Y)}

so that X -> Y is the meet over B in maxs(X) of these "cylinders".  This avoids
walking all 2^n subsets; :func:`implication_by_enumeration` keeps the direct
definition around as a reference implementation.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .core import (
    Hyperconfusion, SampleSpace, _same_space, canonical_key, check_enumerable,
    from_maximal_sets, iter_bits, maximal_sets,
)
from .errors import InputError, SizeLimitError

# refuse to materialise more candidate sets than this in one meet
MAX_MEET_CANDIDATES = 50_000_000


def _pairwise_and(xs: Sequence[int], ys: Sequence[int]) -> Iterable[int]:
    if len(xs) * len(ys) > MAX_MEET_CANDIDATES:
        raise SizeLimitError(f"meet of {len(xs)} x {len(ys)} maximal sets is too large")
    if len(xs) * len(ys) < 4096:
        return {a & b for a in xs for b in ys}
    a = np.array(xs, dtype=np.uint64)
    b = np.array(ys, dtype=np.uint64)
    parts = []
    step = max(1, 4_000_000 // len(b))
    for lo in range(0, len(a), step):
        parts.append(np.unique((a[lo:lo + step, None] & b[None, :]).ravel()))
    return [int(v) for v in np.unique(np.concatenate(parts))]


def meet(x: Hyperconfusion, y: Hyperconfusion) -> Hyperconfusion:
    """X ∩ Y: knowing both pieces of information."""
    _same_space(x, y)
    if x.is_full() or x == y:
        return y
    if y.is_full():
        return x
    return Hyperconfusion(x.space, maximal_sets(_pairwise_and(x.maxs, y.maxs)))


def join(x: Hyperconfusion, y: Hyperconfusion) -> Hyperconfusion:
    """X ∪ Y: knowing one of the two, without being told which."""
    _same_space(x, y)
    return Hyperconfusion(x.space, maximal_sets(x.maxs + y.maxs))


def implication(x: Hyperconfusion, y: Hyperconfusion) -> Hyperconfusion:
    """X -> Y, the most ambiguous M with X ∩ M ⊆ Y."""
    _same_space(x, y)
    full = x.space.full
    result: tuple[int, ...] = (full,)
    # small cylinders first keeps the running meet small
    for b in sorted(x.maxs, key=lambda s: -s.bit_count()):
        if y.member(b):
            continue
        outside = full & ~b
        cyl = maximal_sets({(c & b) | outside for c in y.maxs})
        result = maximal_sets(_pairwise_and(result, cyl))
    return Hyperconfusion(x.space, result)


def implication_by_enumeration(x: Hyperconfusion, y: Hyperconfusion) -> Hyperconfusion:
    """Reference X -> Y: test every subset A against ∀B∈maxs(X): B∩A ∈ Y."""
    _same_space(x, y)
    n = x.space.size
    check_enumerable(n, "implication by enumeration")
    good = [a for a in range(1 << n) if all(y.member(b & a) for b in x.maxs)]
    return Hyperconfusion(x.space, maximal_sets(good))


def negation(x: Hyperconfusion) -> Hyperconfusion:
    """¬X = 2^(Ω minus supp X)."""
    return Hyperconfusion(x.space, (x.space.full & ~x.support,))


# -- constructors ------------------------------------------------------------

def full(space: SampleSpace) -> Hyperconfusion:
    return Hyperconfusion(space, (space.full,))


def null(space: SampleSpace) -> Hyperconfusion:
    return Hyperconfusion(space, (0,))


def sing(space: SampleSpace) -> Hyperconfusion:
    return Hyperconfusion(space, tuple(1 << i for i in range(space.size)))


def event(space: SampleSpace, e) -> Hyperconfusion:
    """2^E: no information inside E, omniscience outside."""
    bits = space.check_set(int(e)) if isinstance(e, (int, np.integer)) else space.subset(e)
    return Hyperconfusion(space, (bits,))


def oi(space: SampleSpace, f) -> Hyperconfusion:
    """Ordinary information of a function on outcomes.

    ``f`` may be a mapping label -> value, a sequence of values in outcome
    order, or a callable on labels.
    """
    if callable(f) and not isinstance(f, Mapping):
        values = [f(lab) for lab in space.labels]
    elif isinstance(f, Mapping):
        missing = [lab for lab in space.labels if lab not in f]
        if missing:
            raise InputError(f"function is undefined on outcomes {missing}")
        values = [f[lab] for lab in space.labels]
    else:
        values = list(f)
        if len(values) != space.size:
            raise InputError(f"function has {len(values)} values for {space.size} outcomes")
    fibers: dict = {}
    for i, v in enumerate(values):
        fibers[v] = fibers.get(v, 0) | (1 << i)
    return Hyperconfusion(space, maximal_sets(fibers.values()))


def construct(space: SampleSpace, kind: str, arg=None) -> Hyperconfusion:
    if kind == "full":
        return full(space)
    if kind == "null":
        return null(space)
    if kind == "sing":
        return sing(space)
    if kind == "event":
        return event(space, arg)
    if kind == "oi":
        return oi(space, arg)
    raise InputError(f"unknown constructor kind {kind!r}")


def is_ordinary(x: Hyperconfusion) -> bool:
    seen = 0
    for b in x.maxs:
        if seen & b:
            return False
        seen |= b
    return True


def generated_sublattice(x: Hyperconfusion, limit: int = 1000) -> list[Hyperconfusion]:
    """Closure of {X, ⊥, ⊤} under meet, join and implication."""
    elems = {x, null(x.space), full(x.space)}
    frontier = list(elems)
    while frontier:
        new = set()
        current = list(elems)
        for a in frontier:
            for b in current:
                for z in (meet(a, b), join(a, b), implication(a, b), implication(b, a)):
                    if z not in elems:
                        new.add(z)
        elems |= new
        if len(elems) > limit:
            raise SizeLimitError("generated sublattice exceeds limit")
        frontier = list(new)
    return sorted(elems, key=hyperconfusion_key)


def hyperconfusion_key(x: Hyperconfusion):
    return (len(x.maxs), [canonical_key(b) for b in x.maxs])


# -- all hyperconfusions over [n] ------------------------------------------

@lru_cache(maxsize=None)
def _downset_families(n: int) -> tuple[int, ...]:
    """All downward closed families over [n] as indicator masks over 2^n subsets.

    The empty family is included.  A family over [n] splits into the sets
    without the last element (D0) and those with it (D1, last element
    removed); it is downward closed iff both are and D1 ⊆ D0.
    """
    if n == 0:
        return (0, 1)
    smaller = _downset_families(n - 1)
    shift = 1 << (n - 1)
    out = [d0 | (d1 << shift) for d0 in smaller for d1 in smaller if d1 & ~d0 == 0]
    return tuple(sorted(out))


def family_to_maxs(family: int, n: int) -> tuple[int, ...]:
    return maximal_sets(iter_bits(family))


def family_of(x: Hyperconfusion) -> int:
    fam = 0
    for s in x.members():
        fam |= 1 << s
    return fam


def enumerate_hyperconfusions(n: int, space: SampleSpace | None = None) -> list[Hyperconfusion]:
    """Every hyperconfusion over [n] (labels 1..n), in canonical order.

    Canonical order is ascending by the indicator mask of the whole family
    (bit s set iff subset s is confusable).  Counts are 2, 5, 19, 167 for
    n = 1..4.
    """
    if n > 5:
        raise SizeLimitError("enumerating all hyperconfusions is capped at n <= 5")
    space = space or SampleSpace.of_size(n)
    return [Hyperconfusion(space, family_to_maxs(f, n)) for f in _downset_families(n) if f]


class HyperconfusionTables:
    """Hyps([n]) as index tables: elements plus meet/join/implication arrays.

    Computed on whole-family indicator masks, independently of the
    maximal-set algorithms above.
    """

    def __init__(self, n: int):
        if n > 4:
            raise SizeLimitError("operation tables are capped at n <= 4")
        self.n = n
        self.space = SampleSpace.of_size(n)
        fams = [f for f in _downset_families(n) if f]
        self.families = fams
        self.elements = [Hyperconfusion(self.space, family_to_maxs(f, n)) for f in fams]
        index = {f: i for i, f in enumerate(fams)}
        self.index = index
        k = len(fams)
        # down[a]: indicator of all subsets of a
        down = []
        for a in range(1 << n):
            m, sub = 0, a
            while True:
                m |= 1 << sub
                if sub == 0:
                    break
                sub = (sub - 1) & a
            down.append(m)
        self.meet = np.empty((k, k), dtype=np.int32)
        self.join = np.empty((k, k), dtype=np.int32)
        self.imp = np.empty((k, k), dtype=np.int32)
        for i, fx in enumerate(fams):
            for j, fy in enumerate(fams):
                self.meet[i, j] = index[fx & fy]
                self.join[i, j] = index[fx | fy]
                bad = fx & ~fy
                fz = 0
                for a in range(1 << n):
                    if down[a] & bad == 0:
                        fz |= 1 << a
                self.imp[i, j] = index[fz]
        self.bot = index[1]
        self.top = index[(1 << (1 << n)) - 1]

    def __len__(self):
        return len(self.families)

    def index_of(self, x: Hyperconfusion) -> int:
        return self.index[family_of(x)]


@lru_cache(maxsize=None)
def hyperconfusion_tables(n: int) -> HyperconfusionTables:
    return HyperconfusionTables(n)
