"""Probability spaces and entropies of hyperconfusions (all in bits)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .core import Hyperconfusion, SampleSpace, _same_space, iter_bits, maximal_sets
from .errors import InputError, SpaceMismatchError, UndefinedValueError, ZeroProbabilityError
from .heyting import meet, sing, join

INF = math.inf
PMF_TOL = 1e-12


@dataclass(frozen=True)
class ProbSpace:
    space: SampleSpace
    pmf: tuple[float, ...]

    def __post_init__(self):
        pmf = tuple(float(x) for x in self.pmf)
        object.__setattr__(self, "pmf", pmf)
        if len(pmf) != self.space.size:
            raise InputError(f"pmf has {len(pmf)} entries for {self.space.size} outcomes")
        if any(not math.isfinite(x) or x < 0 for x in pmf):
            raise InputError("probabilities must be finite and nonnegative")
        if abs(math.fsum(pmf) - 1.0) > PMF_TOL:
            raise InputError(f"probabilities sum to {math.fsum(pmf)!r}, not 1")

    @classmethod
    def uniform(cls, space: SampleSpace) -> "ProbSpace":
        return cls(space, (1.0 / space.size,) * space.size)

    @classmethod
    def normalized(cls, space: SampleSpace, weights) -> "ProbSpace":
        w = np.asarray(weights, dtype=float)
        return cls(space, tuple(w / w.sum()))

    @property
    def support(self) -> int:
        bits = 0
        for i, x in enumerate(self.pmf):
            if x > 0:
                bits |= 1 << i
        return bits

    def prob(self, bits: int) -> float:
        return math.fsum(self.pmf[i] for i in iter_bits(bits))

    def array(self) -> np.ndarray:
        return np.array(self.pmf)


def _nonneg(v: float) -> float:
    """Clip rounding noise below zero (and -0.0) to 0.0."""
    return v if v > 0 else 0.0


def _check(x: Hyperconfusion, p: ProbSpace):
    if x.space != p.space:
        raise SpaceMismatchError("hyperconfusion and pmf live on different sample spaces")


def _restricted_instance(x: Hyperconfusion, p: ProbSpace):
    """Incidence matrix (maxs restricted to supp p) x (support outcomes), and p on the support.

    Returns None when supp(p) is not inside supp(X).
    """
    sup = p.support
    if sup & ~x.support:
        return None
    idx = list(iter_bits(sup))
    sets = [s for s in maximal_sets(a & sup for a in x.maxs) if s]
    inc = np.array([[(a >> i) & 1 for i in idx] for a in sets], dtype=float)
    probs = np.array([p.pmf[i] for i in idx])
    return inc, probs


# -- Blahut-Arimoto ------------------------------------------------------------

@dataclass
class BAResult:
    value: float          # achieved objective, an upper bound on H
    lower_bound: float    # certified lower bound
    iterations: int
    weights: np.ndarray   # distribution over the (restricted) maximal sets

    @property
    def gap(self) -> float:
        return self.value - self.lower_bound

    @property
    def converged(self) -> bool:
        return self.gap <= 1e-6


def hypergraph_entropy(incidence: np.ndarray, probs: np.ndarray, tol: float = 1e-9,
                       max_iter: int = 10_000, init: np.ndarray | None = None) -> BAResult:
    """Blahut-Arimoto for min_q Σ_z p(z) log2 1/v(z), v(z) = Σ_{a∋z} q(a).

    ``incidence`` is (sets x outcomes) 0/1, every outcome with p > 0 covered.
    The update q(a) <- q(a) Σ_{z∈a} p(z)/v(z) is the alternating
    minimisation over p(a|z) ∝ 1{z∈a} q(a) and q(a) = Σ_z p(z) p(a|z).
    The bound H >= obj - log2 max_a Σ_{z∈a} p(z)/v(z) certifies the result.
    """
    m = incidence.shape[0]
    keep = probs > 0
    inc = incidence[:, keep]
    pz = probs[keep]
    if init is None:
        # p(a|z) uniform over the sets containing z
        deg = inc.sum(axis=0)
        q = inc @ (pz / deg)
    else:
        # a warm start must stay strictly positive or the updates freeze
        q = np.asarray(init, dtype=float)
        q = q / q.sum() + 1e-6 / m
    q = q / q.sum()
    value = lower = INF
    it = 0
    for it in range(1, max_iter + 1):
        v = q @ inc
        ratio = inc @ (pz / v)
        value = float(-(pz * np.log2(v)).sum())
        lower = value - math.log2(ratio.max())
        if value - lower <= tol:
            break
        q = q * ratio
        q /= q.sum()
        if it % PRUNE_EVERY == 0:
            q = _pruned(q, ratio, inc, pz, value)
    return BAResult(_nonneg(value), _nonneg(lower), it, q)


PRUNE_EVERY = 50


def _pruned(q, ratio, inc, pz, value):
    """Active-set step: zero the sets that the optimum clearly avoids.

    Multiplicative updates only shrink such weights geometrically slowly
    when the optimum sits on a face of the simplex.  Zeroed sets whose
    ratio later exceeds 1 are put back.  The step is kept only if it does
    not raise the objective; the certificate still uses all sets.
    """
    cand = np.where(ratio < 1 - 1e-4, 0.0, q)
    cand[(q == 0) & (ratio > 1 + 1e-9)] = 1e-3 * q.max()
    total = cand.sum()
    if total <= 0:
        return q
    cand /= total
    v = cand @ inc
    if np.any(v <= 0):
        return q
    return cand if float(-(pz * np.log2(v)).sum()) <= value else q


def blahut_arimoto(x: Hyperconfusion, p: ProbSpace, tol: float = 1e-9,
                   max_iter: int = 10_000) -> BAResult:
    _check(x, p)
    inst = _restricted_instance(x, p)
    if inst is None:
        return BAResult(INF, INF, 0, np.zeros(0))
    inc, probs = inst
    if inc.shape[0] == 1:
        return BAResult(0.0, 0.0, 0, np.ones(1))
    return hypergraph_entropy(inc, probs, tol, max_iter)


def shannon_entropy(x: Hyperconfusion, p: ProbSpace, tol: float = 1e-9,
                    max_iter: int = 10_000) -> float:
    """H(X): min I(Z;A) over couplings with Z ∈ A ∈ X; +inf iff supp p ⊄ supp X."""
    return blahut_arimoto(x, p, tol, max_iter).value


def convex_corner_entropy(x: Hyperconfusion, p: ProbSpace, tol: float = 1e-10,
                          max_iter: int = 100_000) -> float:
    """min over v in conv{1_A} of Σ p log2 1/v by pairwise Frank-Wolfe.

    Works on vertex weights with exact line search, independently of the
    Blahut-Arimoto updates; used as their oracle.  Stops when the
    Frank-Wolfe gap (in nats) drops below ``tol``.
    """
    _check(x, p)
    inst = _restricted_instance(x, p)
    if inst is None:
        return INF
    inc, probs = inst
    m = inc.shape[0]
    if m == 1:
        return 0.0
    w = np.full(m, 1.0 / m)
    v = w @ inc
    for _ in range(max_iter):
        score = inc @ (probs / v)  # minus the gradient along each vertex
        toward = int(score.argmax())
        if score[toward] - 1.0 <= tol:
            break
        active = np.flatnonzero(w > 0)
        away = int(active[score[active].argmin()])
        d = inc[toward] - inc[away]
        gmax = w[away]
        gamma = _line_search(probs, v, d, gmax)
        w[toward] += gamma
        w[away] -= gamma
        if w[away] < 1e-300:
            w[away] = 0.0
        v = w @ inc
    return _nonneg(float(-(probs * np.log2(v)).sum()))


def _line_search(probs, v, d, gmax) -> float:
    """Minimiser over [0, gmax] of -Σ p log(v + γ d) (convex in γ)."""
    def slope(g):
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = probs * d / (v + g * d)
        # a coordinate hitting zero makes the objective blow up
        return np.inf if not np.all(np.isfinite(terms)) else -float(terms.sum())
    if slope(gmax) <= 0:
        return gmax
    lo, hi = 0.0, gmax
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-16 * gmax:
            break
    return lo


def min_entropy(x: Hyperconfusion, p: ProbSpace) -> float:
    """H∞(X) = -log2 max_{A ∈ maxs X} p(A)."""
    _check(x, p)
    best = max(p.prob(a) for a in x.maxs)
    return INF if best <= 0 else _nonneg(-math.log2(best))


# -- covers ------------------------------------------------------------------

def min_set_cover(sets: Sequence[int], universe: int) -> int | None:
    """Fewest sets covering ``universe`` (branch and bound), None if impossible."""
    sets = [s & universe for s in sets]
    sets = [s for s in maximal_sets(sets) if s]
    covered = 0
    for s in sets:
        covered |= s
    if universe & ~covered:
        return None
    if universe == 0:
        return 0
    # greedy upper bound
    best = 0
    left = universe
    while left:
        s = max(sets, key=lambda t: (t & left).bit_count())
        left &= ~s
        best += 1
    biggest = max(s.bit_count() for s in sets)
    containing = {}
    for i in iter_bits(universe):
        containing[i] = [s for s in sets if (s >> i) & 1]

    def search(left: int, used: int):
        nonlocal best
        if not left:
            best = min(best, used)
            return
        if used + -(-left.bit_count() // biggest) >= best:
            return
        pivot = min(iter_bits(left), key=lambda i: len(containing[i]))
        for s in sorted(containing[pivot], key=lambda t: -(t & left).bit_count()):
            search(left & ~s, used + 1)

    search(universe, 0)
    return best


def integral_max_entropy(x: Hyperconfusion, p: ProbSpace) -> float:
    """H0(X) = log2 of the fewest confusable sets covering supp p."""
    _check(x, p)
    count = min_set_cover(x.maxs, p.support)
    return INF if count is None else math.log2(count) if count > 1 else 0.0


@dataclass
class FractionalCover:
    value: Fraction | float            # optimal total weight
    weights: list                      # weight per set
    packing: list                      # optimal dual (fractional packing) per outcome
    exact: bool


EXACT_LP_MAX_SETS = 64


def fractional_cover(sets: Sequence[int], outcomes: Sequence[int]) -> FractionalCover | None:
    """min Σ μ(A) s.t. Σ_{A∋ω} μ(A) >= 1 for ω in ``outcomes``; None if infeasible.

    Exact rational simplex on the dual packing LP when there are at most
    ``EXACT_LP_MAX_SETS`` sets, HiGHS in floating point otherwise.
    """
    outcomes = list(outcomes)
    for i in outcomes:
        if not any((s >> i) & 1 for s in sets):
            return None
    inc = [[(s >> i) & 1 for i in outcomes] for s in sets]
    if len(sets) <= EXACT_LP_MAX_SETS:
        return _packing_simplex(inc)
    a = np.array(inc, dtype=float)
    res = linprog(np.ones(len(sets)), A_ub=-a.T, b_ub=-np.ones(len(outcomes)),
                  bounds=(0, None), method="highs")
    pack = list(-res.ineqlin.marginals) if res.ineqlin is not None else []
    return FractionalCover(float(res.fun), list(res.x), pack, False)


def _packing_simplex(inc: list[list[int]]) -> FractionalCover:
    """Maximise Σ y s.t. inc @ y <= 1, y >= 0 with Bland's rule in exact arithmetic.

    The optimal value equals the fractional cover number; the cover weights
    are read off the slack columns of the final objective row.
    """
    m = len(inc)
    s = len(inc[0]) if m else 0
    width = s + m
    rows = []
    for i in range(m):
        row = [Fraction(v) for v in inc[i]] + [Fraction(int(i == j)) for j in range(m)] + [Fraction(1)]
        rows.append(row)
    obj = [Fraction(-1)] * s + [Fraction(0)] * m + [Fraction(0)]
    basis = [s + i for i in range(m)]
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            a = rows[i][enter]
            if a > 0:
                ratio = rows[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:  # cannot happen: every outcome is in some set
            raise ArithmeticError("packing LP unbounded")
        piv = rows[leave][enter]
        prow = [v / piv for v in rows[leave]]
        rows[leave] = prow
        for i in range(m):
            if i != leave and rows[i][enter] != 0:
                f = rows[i][enter]
                rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [a - f * b for a, b in zip(obj, prow)]
        basis[leave] = enter
    packing = [Fraction(0)] * s
    for i, b in enumerate(basis):
        if b < s:
            packing[b] = rows[i][-1]
    weights = obj[s:s + m]
    return FractionalCover(obj[-1], weights, packing, True)


def fractional_max_entropy(x: Hyperconfusion, p: ProbSpace) -> float:
    """Hε(X) = log2 of the optimal fractional cover of supp p by maximal sets."""
    _check(x, p)
    sup = p.support
    sets = [s for s in maximal_sets(a & sup for a in x.maxs) if s]
    cover = fractional_cover(sets, list(iter_bits(sup)))
    if cover is None:
        return INF
    return _nonneg(_log2(cover.value))


def _log2(v) -> float:
    if isinstance(v, Fraction):
        return math.log2(v.numerator) - math.log2(v.denominator)
    return math.log2(v)


# -- conditioning and mutual information ----------------------------------------

def restrict(x: Hyperconfusion, p: ProbSpace, e: int) -> tuple[Hyperconfusion, ProbSpace]:
    """X restricted to the event E, over the conditional space (E, p(.|E))."""
    _check(x, p)
    pe = p.prob(e)
    if pe <= 0:
        raise ZeroProbabilityError("cannot condition on an event of probability zero")
    idx = list(iter_bits(e))
    sub = SampleSpace(tuple(x.space.labels[i] for i in idx))
    pos = {i: k for k, i in enumerate(idx)}

    def reindex(bits):
        out = 0
        for i in iter_bits(bits & e):
            out |= 1 << pos[i]
        return out

    xr = Hyperconfusion(sub, maximal_sets(reindex(a) for a in x.maxs))
    pr = ProbSpace(sub, tuple(p.pmf[i] / pe for i in idx))
    return xr, _renormalized(pr)


def _renormalized(p: ProbSpace) -> ProbSpace:
    # division can leave the sum a few ulps away from 1
    total = math.fsum(p.pmf)
    if total == 1.0:
        return p
    return ProbSpace(p.space, tuple(v / total for v in p.pmf))


def conditional_entropy(x: Hyperconfusion, y: Hyperconfusion, p: ProbSpace) -> float:
    """H(X|Y) = p(E) (H(X∩Y | E) - H(Y | E)) with E = supp Y."""
    _same_space(x, y)
    _check(x, p)
    e = y.support
    pe = p.prob(e)
    if pe <= 0:
        return 0.0
    xy, pr = restrict(meet(x, y), p, e)
    yr, _ = restrict(y, p, e)
    h_xy = shannon_entropy(xy, pr)
    if h_xy == INF:
        return INF
    return pe * (h_xy - shannon_entropy(yr, pr))


def mutual_information(x: Hyperconfusion, y: Hyperconfusion, p: ProbSpace,
                       given: Hyperconfusion | None = None) -> float:
    """I(X;Y) = H(X) + H(Y) - H(X∩Y), or the same with entropies conditioned on ``given``.

    The conditional form can be negative.
    """
    _same_space(x, y)
    if given is None:
        hx, hy, hxy = shannon_entropy(x, p), shannon_entropy(y, p), shannon_entropy(meet(x, y), p)
    else:
        hx = conditional_entropy(x, given, p)
        hy = conditional_entropy(y, given, p)
        hxy = conditional_entropy(meet(x, y), given, p)
    if INF in (hx, hy):
        raise UndefinedValueError("mutual information is inf - inf here")
    return hx + hy - hxy


# -- capacity ------------------------------------------------------------------

@dataclass
class CapacityResult:
    value: float
    distribution: ProbSpace | None
    cover_number: Fraction | float | None


def capacity_details(x: Hyperconfusion) -> CapacityResult:
    """max_p H(X) through LP duality.

    H(X,p) is concave in p and equals min over the convex corner, so by the
    minimax theorem the maximum is log2 of the fractional cover number of Ω.
    Normalising an optimal fractional packing gives a maximising p.
    """
    space = x.space
    if x.support != space.full:
        return CapacityResult(INF, None, None)
    sets = list(x.maxs)
    cover = fractional_cover(sets, range(space.size))
    total = sum(cover.packing)
    dist = ProbSpace.normalized(space, [float(v / total) for v in cover.packing])
    return CapacityResult(_nonneg(_log2(cover.value)), dist, cover.value)


def capacity(x: Hyperconfusion) -> float:
    return capacity_details(x).value


def capacity_by_ascent(x: Hyperconfusion, restarts: int = 4, iters: int = 400,
                       seed: int = 0) -> tuple[float, ProbSpace | None]:
    """Best-found max_p H(X) by exponentiated supergradient ascent.

    The supergradient at p is log2 1/v*(ω) with v* the optimal corner point.
    """
    space = x.space
    if x.support != space.full:
        return INF, None
    inc = np.array([[(a >> i) & 1 for i in range(space.size)] for a in x.maxs], dtype=float)
    rng = np.random.default_rng(seed)
    best, best_p = -1.0, None
    for r in range(restarts):
        p = np.full(space.size, 1.0 / space.size) if r == 0 else rng.dirichlet(np.ones(space.size))
        q = None
        for k in range(iters):
            res = hypergraph_entropy(inc, p, tol=1e-11, init=q)
            q = res.weights
            if res.value > best:
                best, best_p = res.value, p.copy()
            g = -np.log2(np.maximum(q @ inc, 1e-300))
            p = p * np.exp2(g * 2.0 / math.sqrt(k + 1))
            p = np.maximum(p, 1e-15)
            p /= p.sum()
    return best, ProbSpace.normalized(space, best_p)


# -- coarse entropy --------------------------------------------------------------

@dataclass
class CoarseResult:
    value: float          # best feasible (primal) value found
    upper: float          # dual bound: the true value lies in [value - ba gap, upper]
    iterations: int
    coupling: np.ndarray | None = None
    alphabet: tuple[int, ...] = ()


def coarse_entropy_details(x: Hyperconfusion, y: Hyperconfusion, p: ProbSpace,
                           tol: float = 1e-7, max_iter: int = 3000) -> CoarseResult:
    """H(X↘Y): max over feasible p_B on Ỹ = Y ∪ sing(Ω) of min I(B;A), B ⊆ A ∈ X.

    Outcomes of probability zero are removed first.  The outer concave
    maximisation over couplings p(b|z), z ∈ b, runs Frank-Wolfe; its
    linear-oracle value is the dual bound Σ_z p(z) max_{b∋z} log2 1/v(b),
    which certifies the result when it meets the primal value.
    """
    _same_space(x, y)
    _check(x, p)
    sup = p.support
    if sup != x.space.full:
        xr, pr = restrict(x, p, sup)
        yr, _ = restrict(y, p, sup)
        return coarse_entropy_details(xr, yr, pr, tol, max_iter)
    space = x.space
    y_tilde = join(y, sing(space))
    if not y_tilde.subset_of(x):
        return CoarseResult(INF, INF, 0)
    alphabet = tuple(sorted(set(y_tilde.maxs) | {1 << i for i in range(space.size)},
                            key=lambda b: (b.bit_count(), b)))
    nb = len(alphabet)
    n = space.size
    pz = p.array()
    allowed = np.array([[(b >> z) & 1 for b in alphabet] for z in range(n)], dtype=bool)
    # inner hyperconfusion over the alphabet: b's under a common A
    inner = np.array([[float(b & ~a == 0) for b in alphabet] for a in x.maxs])
    inner = inner[inner.sum(axis=1) > 0]
    singles = np.array([alphabet.index(1 << z) for z in range(n)])
    kappa = np.zeros((n, nb))
    kappa[np.arange(n), singles] = pz

    q = None
    best_val, best_upper, best_kappa = -1.0, INF, kappa.copy()
    it = 0
    for it in range(1, max_iter + 1):
        pb = kappa.sum(axis=0)
        res = hypergraph_entropy(inner, pb, tol=1e-10, init=q)
        q = res.weights
        if res.lower_bound > best_val:
            best_val, best_kappa = res.lower_bound, kappa.copy()
        gain = -np.log2(np.maximum(q @ inner, 1e-300))
        masked = np.where(allowed, gain[None, :], -np.inf)
        choice = masked.argmax(axis=1)
        upper = float((pz * masked[np.arange(n), choice]).sum())
        best_upper = min(best_upper, upper)
        if best_upper - best_val <= tol:
            break
        target = np.zeros_like(kappa)
        target[np.arange(n), choice] = pz
        step = 2.0 / (it + 2)
        kappa = (1 - step) * kappa + step * target
    return CoarseResult(_nonneg(best_val), _nonneg(best_upper), it, best_kappa, alphabet)


def coarse_entropy(x: Hyperconfusion, y: Hyperconfusion, p: ProbSpace) -> float:
    """Best-found H(X↘Y); see :func:`coarse_entropy_details` for the certificate."""
    return coarse_entropy_details(x, y, p).value
