"""Exact conversion of hyperconfusions into ordinary informations.

All searches are subset dynamic programs over partitions of at most
``MAX_DP_ITEMS`` items, so results are exact optima rather than bounds.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

from .core import Hyperconfusion, canonical_key, iter_bits, maximal_sets
from .entropy import INF, ProbSpace, _check, _nonneg
from .errors import InputError, SizeLimitError
from .heyting import is_ordinary, join, null, sing

MAX_DP_ITEMS = 12
TIE_TOL = 1e-12


def _partition_entropy(blocks: Sequence[int], p: ProbSpace) -> float:
    h = 0.0
    for b in blocks:
        pb = p.prob(b)
        if pb > 0:
            h -= pb * math.log2(pb)
    return _nonneg(h)


def _best_partition(items: Sequence[int], feasible: Callable[[int], bool],
                    cost: Callable[[int], float]) -> list[int] | None:
    """Partition ``items`` into groups with feasible unions, minimising total cost.

    Ties (within TIE_TOL) go to the canonically least sorted list of unions.
    Returns the unions, or None when no feasible partition exists.
    """
    k = len(items)
    if k > MAX_DP_ITEMS:
        raise SizeLimitError(f"partition search over {k} items exceeds cap of {MAX_DP_ITEMS}")
    size = 1 << k
    union = [0] * size
    for mask in range(1, size):
        low = mask & -mask
        union[mask] = union[mask ^ low] | items[low.bit_length() - 1]
    ok = [False] * size
    price = [0.0] * size
    for mask in range(1, size):
        if feasible(union[mask]):
            ok[mask] = True
            price[mask] = cost(union[mask])
    best = [INF] * size
    choice = [0] * size
    best[0] = 0.0

    def blocks(mask):
        out = []
        while mask:
            out.append(union[choice[mask]])
            mask ^= choice[mask]
        return sorted(out, key=canonical_key)

    for mask in range(1, size):
        low = mask & -mask
        rest = mask ^ low
        sub = rest
        while True:
            group = sub | low
            if ok[group] and best[mask ^ group] < INF:
                val = price[group] + best[mask ^ group]
                if val < best[mask] - TIE_TOL:
                    best[mask], choice[mask] = val, group
                elif abs(val - best[mask]) <= TIE_TOL:
                    old = choice[mask]
                    choice[mask] = group
                    cand = blocks(mask)
                    choice[mask] = old
                    if [canonical_key(b) for b in cand] < [canonical_key(b) for b in blocks(mask)]:
                        best[mask], choice[mask] = min(val, best[mask]), group
            if sub == 0:
                break
            sub = (sub - 1) & rest
    full = size - 1
    if best[full] == INF:
        return None
    return blocks(full)


def _support_items(x: Hyperconfusion, p: ProbSpace):
    sup = p.support
    if sup & ~x.support:
        return None
    return [1 << i for i in iter_bits(sup)]


def optimal_ordinary_refinement(x: Hyperconfusion, p: ProbSpace) -> tuple[Hyperconfusion, float]:
    """Ordinary Y ⊆ X covering supp p with least entropy."""
    _check(x, p)
    items = _support_items(x, p)
    if items is None:
        return null(x.space), INF

    def cost(b):
        pb = p.prob(b)
        return -pb * math.log2(pb) if pb > 0 else 0.0

    blocks = _best_partition(items, x.member, cost)
    return Hyperconfusion(x.space, maximal_sets(blocks)), _partition_entropy(blocks, p)


def optimal_ordinary_refinement_h0(x: Hyperconfusion, p: ProbSpace) -> tuple[Hyperconfusion, float]:
    """Ordinary Y ⊆ X covering supp p with the fewest blocks; log2 of that count equals H0(X)."""
    _check(x, p)
    items = _support_items(x, p)
    if items is None:
        return null(x.space), INF
    blocks = _best_partition(items, x.member, lambda b: 1.0)
    return Hyperconfusion(x.space, maximal_sets(blocks)), (math.log2(len(blocks)) if len(blocks) > 1 else 0.0)


def optimal_ordinary_refinement_hinf(x: Hyperconfusion, p: ProbSpace) -> tuple[Hyperconfusion, float]:
    """Ordinary Y ⊆ X with H∞(Y) = H∞(X).

    One block is the most probable maximal set (first in canonical order on
    ties); the rest of supp X is split into singletons.  Outcomes outside
    supp X cannot be covered by any ordinary Y ⊆ X and are left out, which
    does not affect the min-entropy.
    """
    _check(x, p)
    top = max(x.maxs, key=lambda a: p.prob(a))  # max keeps the first maximiser
    ptop = p.prob(top)
    if ptop <= 0:
        return null(x.space), INF
    blocks = [top] + [1 << i for i in iter_bits(x.support & ~top)]
    y = Hyperconfusion(x.space, maximal_sets(blocks))
    return y, _nonneg(-math.log2(ptop))


def coarse_refinement(x: Hyperconfusion, y: Hyperconfusion, p: ProbSpace) -> tuple[Hyperconfusion, float]:
    """Ordinary X̂ with Y ⊆ X̂ ⊆ X of least entropy, merging whole blocks of Y ∪ sing(Ω)."""
    _check(x, p)
    if not is_ordinary(y):
        raise InputError("the lower bound must be an ordinary information")
    if not y.subset_of(x):
        raise InputError("the lower bound must be contained in the hyperconfusion")
    # singletons outside supp X fit in no block of X
    items = [b for b in join(y, sing(x.space)).maxs if b and x.member(b)]

    def cost(b):
        pb = p.prob(b)
        return -pb * math.log2(pb) if pb > 0 else 0.0

    blocks = _best_partition(items, x.member, cost)
    xhat = Hyperconfusion(x.space, maximal_sets(blocks))
    if p.support & ~xhat.support:
        return xhat, INF
    return xhat, _partition_entropy(blocks, p)


def refinement_gap_upper(h: float) -> float:
    """Upper end of the unconfusing interval: h + log2(h + 3.4) + 1."""
    return h + math.log2(h + 3.4) + 1.0
