"""Sample spaces and hyperconfusions stored as canonical antichains of bitmasks.

A subset of the sample space is an ``int`` whose bit ``i`` marks outcome ``i``.
A hyperconfusion (downward closed family of subsets) is stored only through its
maximal sets, kept in canonical order: ascending by (cardinality, value).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import MalformedSetError, SizeLimitError, SpaceMismatchError, InputError

# Python ints have no width limit, but the vectorised antichain code uses uint64.
MAX_OUTCOMES = 64
# operations that walk all 2^n subsets
MAX_ENUMERATION_OUTCOMES = 22


def popcount(bits: int) -> int:
    return bits.bit_count()


def canonical_key(bits: int):
    return (bits.bit_count(), bits)


def iter_bits(bits: int) -> Iterator[int]:
    """Indices of the set bits, ascending."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def check_enumerable(n: int, what: str = "subset enumeration"):
    if n > MAX_ENUMERATION_OUTCOMES:
        raise SizeLimitError(f"{what} needs 2^{n} subsets; cap is n <= {MAX_ENUMERATION_OUTCOMES}")


@dataclass(frozen=True)
class SampleSpace:
    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise InputError("sample space needs at least one outcome")
        if len(set(labels)) != len(labels):
            raise InputError("outcome labels must be distinct")
        if len(labels) > MAX_OUTCOMES:
            raise SizeLimitError(f"{len(labels)} outcomes exceeds cap of {MAX_OUTCOMES}")

    @classmethod
    def of_size(cls, n: int, start: int = 1) -> "SampleSpace":
        """Space [n] with labels start, ..., start+n-1."""
        return cls(tuple(str(i) for i in range(start, start + n)))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << len(self.labels)) - 1

    @cached_property
    def _index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise MalformedSetError(f"unknown outcome label {label!r}") from None

    def subset(self, labels: Iterable) -> int:
        bits = 0
        for lab in labels:
            bits |= 1 << self.index(lab)
        return bits

    def labels_of(self, bits: int) -> list[str]:
        return [self.labels[i] for i in iter_bits(bits)]

    def check_set(self, bits: int) -> int:
        if bits < 0 or bits >> self.size:
            raise MalformedSetError(f"set {bits:#x} has bits outside the {self.size} outcomes")
        return bits


def maximal_sets(sets: Iterable[int]) -> tuple[int, ...]:
    """Canonical antichain of the maximal elements of ``sets``.

    An empty input gives ``(0,)``, the null hyperconfusion.
    """
    uniq = set(sets)
    if not uniq:
        return (0,)
    if len(uniq) == 1:
        return (uniq.pop(),)
    ordered = sorted(uniq, key=lambda s: (-s.bit_count(), s))
    if len(ordered) <= 200 or ordered[0] >> 64:
        kept: list[int] = []
        for s in ordered:
            # distinct sets of equal size never contain each other
            if not any((s | k) == k for k in kept):
                kept.append(s)
    else:
        kept = _maximal_sets_numpy(ordered)
    kept.sort(key=canonical_key)
    return tuple(kept)


def _maximal_sets_numpy(ordered: list[int]) -> list[int]:
    arr = np.array(ordered, dtype=np.uint64)
    sizes = np.array([s.bit_count() for s in ordered])
    kept = np.zeros(0, dtype=np.uint64)
    start = 0
    while start < len(arr):
        stop = start
        while stop < len(arr) and sizes[stop] == sizes[start]:
            stop += 1
        group = arr[start:stop]
        if kept.size:
            alive = np.ones(group.size, dtype=bool)
            step = max(1, 4_000_000 // kept.size)
            not_kept = ~kept
            for lo in range(0, group.size, step):
                chunk = group[lo:lo + step]
                hit = ((chunk[:, None] & not_kept[None, :]) == 0).any(axis=1)
                alive[lo:lo + step] = ~hit
            group = group[alive]
        kept = np.concatenate([kept, group])
        start = stop
    return [int(x) for x in kept]


class Ordering(enum.Enum):
    EQUAL = "equal"
    LESS = "less-ambiguous"
    MORE = "more-ambiguous"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class Hyperconfusion:
    """Downward closed family of subsets, held by its maximal sets.

    Build through :func:`from_maximal_sets` (or the constructors in
    ``heyting``); the raw constructor trusts that ``maxs`` is canonical.
    """
    space: SampleSpace
    maxs: tuple[int, ...] = field(default=(0,))

    # -- queries ----------------------------------------------------------
    def member(self, bits: int) -> bool:
        return any((bits | b) == b for b in self.maxs)

    @property
    def support(self) -> int:
        sup = 0
        for b in self.maxs:
            sup |= b
        return sup

    def is_null(self) -> bool:
        return self.maxs == (0,)

    def is_full(self) -> bool:
        return self.maxs == (self.space.full,)

    def subset_of(self, other: "Hyperconfusion") -> bool:
        _same_space(self, other)
        return all(other.member(b) for b in self.maxs)

    __le__ = subset_of

    def __ge__(self, other):
        return other.subset_of(self)

    def compare(self, other: "Hyperconfusion") -> Ordering:
        _same_space(self, other)
        if self.maxs == other.maxs:
            return Ordering.EQUAL
        le = self.subset_of(other)
        ge = other.subset_of(self)
        if le:
            return Ordering.LESS
        if ge:
            return Ordering.MORE
        return Ordering.INCOMPARABLE

    def members(self) -> list[int]:
        """Every confusable set (the whole downward closure), canonical order."""
        out = set()
        for b in self.maxs:
            sub = b
            while True:
                out.add(sub)
                if sub == 0:
                    break
                sub = (sub - 1) & b
        return sorted(out, key=canonical_key)

    def maxs_labels(self) -> list[list[str]]:
        return [self.space.labels_of(b) for b in self.maxs]

    def __repr__(self):
        sets = ", ".join("{" + ",".join(s) + "}" for s in self.maxs_labels())
        return f"Hyperconfusion(maxs=[{sets}])"

    # -- Heyting operators as Python operators ------------------------------
    def __and__(self, other):
        from .heyting import meet
        return meet(self, other)

    def __or__(self, other):
        from .heyting import join
        return join(self, other)

    def __rshift__(self, other):
        from .heyting import implication
        return implication(self, other)

    def __invert__(self):
        from .heyting import negation
        return negation(self)


def _same_space(x: Hyperconfusion, y: Hyperconfusion):
    if x.space != y.space:
        raise SpaceMismatchError("hyperconfusions live on different sample spaces")


def from_maximal_sets(space: SampleSpace, sets: Sequence) -> Hyperconfusion:
    """Hyperconfusion generated by ``sets`` (bitmasks or iterables of labels)."""
    bits = []
    for s in sets:
        if isinstance(s, (int, np.integer)) and not isinstance(s, bool):
            bits.append(space.check_set(int(s)))
        else:
            bits.append(space.subset(s))
    return Hyperconfusion(space, maximal_sets(bits))
