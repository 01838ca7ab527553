"""Product spaces, embeddings of factor hyperconfusions, and independence."""
from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from .core import Hyperconfusion, SampleSpace, _same_space, iter_bits, maximal_sets, MAX_OUTCOMES
from .entropy import ProbSpace, _check
from .errors import InputError, SizeLimitError

SEPARATOR = ":"
MAX_INDEPENDENCE_MAXS = 16


def _factor_list(factors) -> list[Hyperconfusion]:
    out = []
    for f in factors:
        out.append(f[1] if isinstance(f, tuple) else f)
    if not out:
        raise InputError("need at least one factor")
    return out


def product_space(spaces: Sequence[SampleSpace]) -> SampleSpace:
    """Outcomes are tuples of factor outcomes, first factor varying slowest."""
    size = math.prod(s.size for s in spaces)
    if size > MAX_OUTCOMES:
        raise SizeLimitError(f"product space has {size} outcomes, cap is {MAX_OUTCOMES}")
    for s in spaces:
        bad = [lab for lab in s.labels if SEPARATOR in lab]
        if bad:
            raise InputError(f"factor labels may not contain {SEPARATOR!r}: {bad}")
    labels = [SEPARATOR.join(t) for t in itertools.product(*(s.labels for s in spaces))]
    return SampleSpace(tuple(labels))


def _coordinates(spaces: Sequence[SampleSpace]) -> list[tuple[int, ...]]:
    return list(itertools.product(*(range(s.size) for s in spaces)))


def _rectangle(coords, sets: Sequence[int]) -> int:
    bits = 0
    for k, c in enumerate(coords):
        if all((a >> ci) & 1 for a, ci in zip(sets, c)):
            bits |= 1 << k
    return bits


def embed(factors, i: int) -> Hyperconfusion:
    """Embedding of factor ``i`` (1-based): maxs Ω1 × ... × A × ... × Ωn."""
    xs = _factor_list(factors)
    if not 1 <= i <= len(xs):
        raise InputError(f"factor index {i} out of range 1..{len(xs)}")
    spaces = [x.space for x in xs]
    space = product_space(spaces)
    coords = _coordinates(spaces)
    sets = []
    for a in xs[i - 1].maxs:
        sides = [s.full for s in spaces]
        sides[i - 1] = a
        sets.append(_rectangle(coords, sides))
    return Hyperconfusion(space, maximal_sets(sets))


def product(factors) -> Hyperconfusion:
    """⨂ X_i, with maxs the rectangles ∏ A_i, A_i ∈ maxs(X_i)."""
    xs = _factor_list(factors)
    spaces = [x.space for x in xs]
    space = product_space(spaces)
    coords = _coordinates(spaces)
    sets = [_rectangle(coords, combo) for combo in itertools.product(*(x.maxs for x in xs))]
    return Hyperconfusion(space, maximal_sets(sets))


def product_pmf(ps: Sequence[ProbSpace]) -> ProbSpace:
    space = product_space([p.space for p in ps])
    probs = [math.prod(p.pmf[c] for p, c in zip(ps, coord))
             for coord in _coordinates([p.space for p in ps])]
    return ProbSpace.normalized(space, probs)


def iid_embeddings(x: Hyperconfusion, count: int) -> list[Hyperconfusion]:
    factors = [x] * count
    return [embed(factors, i) for i in range(1, count + 1)]


def _unions(sets: Sequence[int]) -> list[int]:
    out = {0}
    for a in sets:
        out |= {u | a for u in out}
    return sorted(out)


def independence_test(x: Hyperconfusion, y: Hyperconfusion, p: ProbSpace, tol: float = 1e-12) -> bool:
    """p(∪S ∩ ∪T) = p(∪S) p(∪T) for all S ⊆ maxs X, T ⊆ maxs Y."""
    _same_space(x, y)
    _check(x, p)
    if max(len(x.maxs), len(y.maxs)) > MAX_INDEPENDENCE_MAXS:
        raise SizeLimitError(f"independence test is capped at {MAX_INDEPENDENCE_MAXS} maximal sets per side")
    n = x.space.size
    ux, uy = _unions(x.maxs), _unions(y.maxs)
    if len(ux) * len(uy) > 50_000_000:
        raise SizeLimitError("too many distinct unions to compare")
    probs = p.array()
    ind_y = np.array([[(u >> i) & 1 for i in range(n)] for u in uy], dtype=float)
    py = ind_y @ probs
    step = max(1, 2_000_000 // len(uy))
    for lo in range(0, len(ux), step):
        ind_x = np.array([[(u >> i) & 1 for i in range(n)] for u in ux[lo:lo + step]], dtype=float)
        px = ind_x @ probs
        joint = (ind_x * probs) @ ind_y.T
        if np.abs(joint - np.outer(px, py)).max() > tol:
            return False
    return True
