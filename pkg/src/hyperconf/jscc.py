"""Zero-error joint source-channel coding through set-valued maps."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .core import Hyperconfusion, SampleSpace, canonical_key, iter_bits, maximal_sets
from .entropy import ProbSpace, capacity
from .errors import InputError, SizeLimitError, SpaceMismatchError
from .product import product

MAX_ONTO_PRODUCT = 64          # |Ω|·|Γ| cap for the backtracking search
MAX_EXPANDING_OUTCOMES = 20
EXPANDING_ENUM_OUTCOMES = 16   # above this the measure condition goes through an LP
FLOW_TOL = 1e-9


@dataclass(frozen=True)
class SetValuedMap:
    source: SampleSpace
    target: SampleSpace
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != self.source.size:
            raise InputError(f"{len(self.images)} images for {self.source.size} source outcomes")
        for b in self.images:
            self.target.check_set(b)

    @classmethod
    def from_labels(cls, source: SampleSpace, target: SampleSpace, mapping) -> "SetValuedMap":
        """``mapping``: source label -> iterable of target labels."""
        return cls(source, target, tuple(target.subset(mapping.get(lab, ())) for lab in source.labels))

    def image(self, bits: int) -> int:
        out = 0
        for i in iter_bits(bits):
            out |= self.images[i]
        return out

    def inverse(self) -> "SetValuedMap":
        inv = [0] * self.target.size
        for w, img in enumerate(self.images):
            for g in iter_bits(img):
                inv[g] |= 1 << w
        return SetValuedMap(self.target, self.source, tuple(inv))

    def is_surjective(self) -> bool:
        return self.image(self.source.full) == self.target.full


def image_hyperconfusion(beta: SetValuedMap, x: Hyperconfusion) -> Hyperconfusion:
    """β(X): downward closure of the images of the confusable sets."""
    if x.space != beta.source:
        raise SpaceMismatchError("hyperconfusion is not over the map's source space")
    return Hyperconfusion(beta.target, maximal_sets(beta.image(a) for a in x.maxs))


def preimage_hyperconfusion(beta: SetValuedMap, y: Hyperconfusion) -> Hyperconfusion:
    return image_hyperconfusion(beta.inverse(), y)


def is_hyperconfusable(beta: SetValuedMap, x: Hyperconfusion, y: Hyperconfusion) -> bool:
    """β(A) ∈ Y for every A ∈ X."""
    if x.space != beta.source or y.space != beta.target:
        raise SpaceMismatchError("spaces do not match the map")
    return all(y.member(beta.image(a)) for a in x.maxs)


def measure_expanding_by_subsets(beta: SetValuedMap, p: ProbSpace, q: ProbSpace) -> bool:
    """q(β(A)) ≥ p(A) for all A ⊆ Ω, by enumeration."""
    n = beta.source.size
    size = 1 << n
    pa = np.zeros(size)
    img = [0] * size
    pv = p.array()
    for a in range(1, size):
        low = a & -a
        i = low.bit_length() - 1
        pa[a] = pa[a ^ low] + pv[i]
        img[a] = img[a ^ low] | beta.images[i]
    qa = np.array([q.prob(b) for b in img])
    return bool(np.all(qa >= pa - FLOW_TOL))


def measure_expanding_by_flow(beta: SetValuedMap, p: ProbSpace, q: ProbSpace) -> bool:
    """Same condition as a transport feasibility LP: a coupling of p into q along β.

    By max-flow/min-cut the flow saturates p iff every A has q(β(A)) ≥ p(A).
    """
    edges = [(w, g) for w in range(beta.source.size) for g in iter_bits(beta.images[w])]
    if not edges:
        return p.prob(beta.source.full) <= FLOW_TOL
    n, m = beta.source.size, beta.target.size
    rows = np.zeros((n + m, len(edges)))
    for k, (w, g) in enumerate(edges):
        rows[w, k] = 1.0
        rows[n + g, k] = 1.0
    caps = np.concatenate([p.array(), q.array()])
    res = linprog(-np.ones(len(edges)), A_ub=rows, b_ub=caps, bounds=(0, None), method="highs")
    return bool(res.status == 0 and -res.fun >= 1.0 - FLOW_TOL)


def is_hyper_expanding(beta: SetValuedMap, p: ProbSpace, q: ProbSpace,
                       x: Hyperconfusion, y: Hyperconfusion) -> bool:
    """Hyperconfusable and q(β(A)) ≥ p(A) for every A ⊆ Ω."""
    if p.space != beta.source or q.space != beta.target:
        raise SpaceMismatchError("pmfs do not match the map's spaces")
    n = beta.source.size
    if n > MAX_EXPANDING_OUTCOMES:
        raise SizeLimitError(f"hyper-expanding check is capped at {MAX_EXPANDING_OUTCOMES} source outcomes")
    if not is_hyperconfusable(beta, x, y):
        return False
    if n <= EXPANDING_ENUM_OUTCOMES:
        return measure_expanding_by_subsets(beta, p, q)
    return measure_expanding_by_flow(beta, p, q)


# -- confuses onto -------------------------------------------------------------

MAX_CANDIDATE_IMAGES = 200_000


def confuses_onto(x: Hyperconfusion, y: Hyperconfusion) -> SetValuedMap | None:
    """First surjective hyperconfusable β: Ω → 2^Γ found by backtracking, or None.

    Outcomes are assigned in index order.  An outcome inside supp X may only
    take images that are members of Y, tried largest first (then by value);
    outcomes outside supp X lie in no confusable set and get all of Γ.
    """
    n, m = x.space.size, y.space.size
    if n * m > MAX_ONTO_PRODUCT:
        raise SizeLimitError(f"|Ω|·|Γ| = {n * m} exceeds the search cap of {MAX_ONTO_PRODUCT}")
    total = sum(1 << b.bit_count() for b in y.maxs)
    if total > MAX_CANDIDATE_IMAGES:
        raise SizeLimitError("target hyperconfusion has too many confusable sets to search")
    inside = sorted(y.members(), key=lambda b: (-b.bit_count(), b))
    full_target = y.space.full
    sup = x.support
    cands = [inside if (sup >> w) & 1 else [full_target] for w in range(n)]
    reach = [0] * (n + 1)
    for w in range(n - 1, -1, -1):
        r = 0
        for c in cands[w]:
            r |= c
        reach[w] = reach[w + 1] | r
    owners = [[k for k, a in enumerate(x.maxs) if (a >> w) & 1] for w in range(n)]
    partial = [0] * len(x.maxs)
    chosen = [0] * n

    def search(w: int, covered: int) -> bool:
        if full_target & ~(covered | reach[w]):
            return False
        if w == n:
            return covered == full_target
        for c in cands[w]:
            saved = []
            ok = True
            for k in owners[w]:
                new = partial[k] | c
                if new != partial[k] and not y.member(new):
                    ok = False
                    break
                saved.append((k, partial[k]))
                partial[k] = new
            if ok:
                chosen[w] = c
                if search(w + 1, covered | c):
                    return True
            for k, old in saved:
                partial[k] = old
        return False

    if search(0, 0):
        return SetValuedMap(x.space, y.space, tuple(chosen))
    return None


def code_from_witness(beta: SetValuedMap) -> dict[int, int]:
    """Encoder γ -> some ω with γ ∈ β(ω) (the first such ω)."""
    enc = {}
    for w, img in enumerate(beta.images):
        for g in iter_bits(img):
            enc.setdefault(g, w)
    return enc


def check_code(beta: SetValuedMap, x: Hyperconfusion, y: Hyperconfusion) -> bool:
    """The encoder/decoder pair from a witness decodes correctly.

    For every message γ and every confusable A ∋ f(γ), the decoder output
    g(A) = β(A) contains γ and is confusable in Y.
    """
    enc = code_from_witness(beta)
    if set(enc) != set(range(beta.target.size)):
        return False
    members = x.members()
    for g, w in enc.items():
        for a in members:
            if (a >> w) & 1:
                out = beta.image(a)
                if not (out >> g) & 1 or not y.member(out):
                    return False
    return True


# -- channels ------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelSpec:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    matrix: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(str(v) for v in self.inputs))
        object.__setattr__(self, "outputs", tuple(str(v) for v in self.outputs))
        mat = tuple(tuple(float(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", mat)
        if len(mat) != len(self.inputs):
            raise InputError("channel matrix needs one row per input")
        for row in mat:
            if len(row) != len(self.outputs):
                raise InputError("channel matrix rows need one entry per output")
            if any(not math.isfinite(v) or v < 0 for v in row):
                raise InputError("transition probabilities must be nonnegative")
            if abs(math.fsum(row) - 1.0) > 1e-12:
                raise InputError("channel matrix rows must sum to 1")


def channel_instance(ch: ChannelSpec, allowed: Iterable[Sequence], source: ProbSpace
                     ) -> tuple[Hyperconfusion, Hyperconfusion]:
    """(X over channel inputs, Y over source outcomes) for zero-error coding.

    X: inputs that can produce a common output are confusable.
    Y: source outcomes sharing an allowed reconstruction are confusable.
    """
    if source.support != source.space.full:
        raise InputError("source pmf must have full support")
    xin = SampleSpace(ch.inputs)
    sets = []
    for j in range(len(ch.outputs)):
        sets.append(sum(1 << i for i in range(len(ch.inputs)) if ch.matrix[i][j] > 0))
    x = Hyperconfusion(xin, maximal_sets(sets))
    groups: dict = {}
    for pair in allowed:
        if len(pair) != 2:
            raise InputError("allowed pairs need exactly two entries")
        u, rec = pair
        key = tuple(rec) if isinstance(rec, list) else rec
        groups[key] = groups.get(key, 0) | (1 << source.space.index(u))
    y = Hyperconfusion(source.space, maximal_sets(groups.values()))
    return x, y


def power(x: Hyperconfusion, k: int) -> Hyperconfusion:
    return x if k == 1 else product([x] * k)


@dataclass
class RatioReport:
    upper: float
    lower: float
    table: list[tuple[int, int, bool]]


def confusion_ratio_bound(x: Hyperconfusion, y: Hyperconfusion) -> RatioReport:
    """Capacity ratio C(X)/C(Y) as an upper bound, and exact onto-checks for small (n, m)."""
    cx, cy = capacity(x), capacity(y)
    upper = math.inf if cy == 0 else cx / cy
    a, b = x.space.size, y.space.size
    table = []
    n = 1
    while a ** n * b <= MAX_ONTO_PRODUCT:
        xn = power(x, n)
        m = 1
        while a ** n * b ** m <= MAX_ONTO_PRODUCT:
            ok = confuses_onto(xn, power(y, m)) is not None
            table.append((n, m, ok))
            m += 1
        n += 1
    lower = max((m / n for n, m, ok in table if ok), default=0.0)
    return RatioReport(upper, lower, table)
