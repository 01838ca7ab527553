"""Coding settings solved by evaluating their requirement formulae.

Each setting builds the most ambiguous message allowed by its requirement
and reports its entropy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import Hyperconfusion, SampleSpace, _same_space, canonical_key, iter_bits
from .entropy import (
    INF, CoarseResult, ProbSpace, coarse_entropy_details, integral_max_entropy, min_entropy,
    shannon_entropy, _check,
)
from .errors import InfeasibleRequirementError, InputError, NotExtractableError, SizeLimitError
from .formula import And, Atom, Bot, Formula, Imp, Or, Top, atoms, evaluate
from .heyting import event, full, implication, join, meet, null
from .unconfuse import MAX_DP_ITEMS, optimal_ordinary_refinement, optimal_ordinary_refinement_h0


def butterfly_requirement(x: str = "X", y: str = "Y", m: str = "M") -> Formula:
    """((X ∧ M) → Y) ∧ ((Y ∧ M) → X): each side recovers the other's bit."""
    X, Y, M = Atom(x), Atom(y), Atom(m)
    return And(Imp(And(X, M), Y), Imp(And(Y, M), X))


@dataclass
class ButterflyResult:
    message: Hyperconfusion
    h: float
    h0: float
    best_ordinary: Hyperconfusion | None = None
    best_ordinary_h: float | None = None
    best_ordinary_h0: float | None = None


def butterfly(x: Hyperconfusion, y: Hyperconfusion, p: ProbSpace) -> ButterflyResult:
    """M* = (X→Y) ∩ (Y→X) with its entropies and, within the DP cap, the best ordinary message."""
    _same_space(x, y)
    _check(x, p)
    m = meet(implication(x, y), implication(y, x))
    res = ButterflyResult(m, shannon_entropy(m, p), integral_max_entropy(m, p))
    if p.support.bit_count() <= MAX_DP_ITEMS:
        res.best_ordinary, res.best_ordinary_h = optimal_ordinary_refinement(m, p)
        res.best_ordinary_h0 = optimal_ordinary_refinement_h0(m, p)[1]
    return res


def disjunctive_butterfly(x: Hyperconfusion, y: Hyperconfusion, p: ProbSpace) -> tuple[Hyperconfusion, float]:
    """M* = (X→Y) ∪ (Y→X): some one side recovers the other."""
    _same_space(x, y)
    m = join(implication(x, y), implication(y, x))
    return m, shannon_entropy(m, p)


# -- index coding ---------------------------------------------------------------

@dataclass
class User:
    has: tuple[str, ...] = ()
    wants: tuple[str, ...] = ()
    event: int | None = None   # outcomes where the user is active; None means always


@dataclass
class IndexCodingSpec:
    sources: dict[str, Hyperconfusion]
    users: list[User]
    success: list[frozenset[int]]  # minimal sets of the upward closed success family (0-based users)

    def __post_init__(self):
        if not self.sources:
            raise InputError("index coding needs at least one source")
        spaces = {x.space for x in self.sources.values()}
        if len(spaces) != 1:
            raise InputError("all sources must share one sample space")
        names = set(self.sources)
        for u in self.users:
            unknown = (set(u.has) | set(u.wants)) - names
            if unknown:
                raise InputError(f"users refer to unknown sources {sorted(unknown)}")
        if not self.success:
            raise InputError("success family is empty")
        fam = [frozenset(s) for s in self.success]
        for s in fam:
            if not s or any(i < 0 or i >= len(self.users) for i in s):
                raise InputError(f"bad success set {sorted(s)}")
        if any(a < b for a in fam for b in fam):
            raise InputError("success sets must be minimal (an antichain)")
        self.success = fam

    @property
    def space(self) -> SampleSpace:
        return next(iter(self.sources.values())).space


MESSAGE_ATOM = "_message"


def index_requirement(spec: IndexCodingSpec) -> tuple[Formula, dict[str, Hyperconfusion]]:
    """The message formula ⋃_S ⋂_{i∈S} ((2^{F_i} ∩ X_{A_i}) → X_{B_i}) and its extra bindings."""
    extra: dict[str, Hyperconfusion] = {}
    space = spec.space

    def conj(names):
        out: Formula | None = None
        for nm in names:
            out = Atom(nm) if out is None else And(out, Atom(nm))
        return out

    per_user = []
    for i, u in enumerate(spec.users):
        ante = conj(u.has)
        if u.event is not None:
            name = f"_active{i + 1}"
            extra[name] = event(space, u.event)
            ante = Atom(name) if ante is None else And(Atom(name), ante)
        goal = conj(u.wants) or Top()
        per_user.append(Imp(ante, goal) if ante is not None else goal)
    body: Formula | None = None
    for s in sorted(spec.success, key=lambda s: sorted(s)):
        term: Formula | None = None
        for i in sorted(s):
            term = per_user[i] if term is None else And(term, per_user[i])
        body = term if body is None else Or(body, term)
    return body, extra


@dataclass
class IndexCodingResult:
    message: Hyperconfusion
    h: float
    formula: Formula
    environment: dict[str, Hyperconfusion]

    def requirement(self) -> Formula:
        """M → (message formula), which must evaluate to 2^Ω at M = M*."""
        return Imp(Atom(MESSAGE_ATOM), self.formula)


def index_code(spec: IndexCodingSpec, p: ProbSpace) -> IndexCodingResult:
    formula, extra = index_requirement(spec)
    env = dict(spec.sources)
    env.update(extra)
    m = evaluate(formula, env)
    return IndexCodingResult(m, shannon_entropy(m, p), formula, env)


# -- coding with error ----------------------------------------------------------

@dataclass
class TradeoffPoint:
    event: int
    message: Hyperconfusion
    h: float
    neg_log_success: float    # H∞(message → goal): -log2 of the best success probability


@dataclass
class TradeoffResult:
    frontier: list[TradeoffPoint]
    best: TradeoffPoint
    evaluated: int = 0


MAX_EVENT_OUTCOMES = 20


def error_tolerant_source_code(x: Hyperconfusion, p: ProbSpace, delta: float) -> TradeoffResult:
    """Messages 2^E → X over events with p(E) ≥ 1 - δ, and their (entropy, error) frontier."""
    _check(x, p)
    n = x.space.size
    if n > MAX_EVENT_OUTCOMES:
        raise SizeLimitError(f"event enumeration is capped at n <= {MAX_EVENT_OUTCOMES}")
    if not 0 <= delta <= 1:
        raise InputError("delta must lie in [0, 1]")
    points = []
    seen = set()
    for e in sorted(range(1 << n), key=lambda b: (-b.bit_count(), b)):
        if p.prob(e) < 1 - delta - 1e-12:
            continue
        m = implication(event(x.space, e), x)
        if m in seen:
            continue
        seen.add(m)
        nls = min_entropy(implication(m, x), p)
        points.append(TradeoffPoint(e, m, shannon_entropy(m, p), nls))
    best = min(points, key=lambda t: (t.h, t.neg_log_success))
    frontier = []
    for t in sorted(points, key=lambda t: (t.h, t.neg_log_success)):
        if frontier and t.neg_log_success >= frontier[-1].neg_log_success - 1e-9:
            continue
        frontier.append(t)
    return TradeoffResult(frontier, best, len(points))


# -- extracting messages from requirements --------------------------------------------

def _conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return _conjuncts(f.left) + _conjuncts(f.right)
    return [f]


def _conjoin(parts: Sequence[Formula]) -> Formula:
    out: Formula | None = None
    for g in parts:
        out = g if out is None else And(out, g)
    return out if out is not None else Top()


def _curry(f: Formula, m: str):
    """Split the requirement "f = ⊤" into "m ⊆ G" plus m-free side conditions.

    Walks And nodes and implication consequents, collecting m-free
    antecedent conjuncts; m itself may only appear as an antecedent conjunct.
    """
    components: list[Formula] = []
    side: list[Formula] = []

    def walk(g, ctx: list[Formula], has_m: bool):
        if m not in atoms(g):
            ante = _conjoin(ctx)
            target = Imp(ante, g) if ctx else g
            (components if has_m else side).append(target)
            return
        if isinstance(g, And):
            walk(g.left, ctx, has_m)
            walk(g.right, ctx, has_m)
            return
        if isinstance(g, Imp):
            new_ctx = list(ctx)
            found = has_m
            for leaf in _conjuncts(g.left):
                if leaf == Atom(m):
                    found = True
                elif m in atoms(leaf):
                    raise NotExtractableError(
                        f"{m} occurs inside {type(leaf).__name__} in an antecedent; only plain conjuncts can be curried out")
                else:
                    new_ctx.append(leaf)
            walk(g.right, new_ctx, found)
            return
        if isinstance(g, Or):
            raise NotExtractableError(f"{m} occurs under a disjunction; the optimum need not be unique")
        raise NotExtractableError(f"{m} occurs in a consequent position")

    walk(f, [], False)
    return _conjoin(components), side


def extract_optimal_message(f: Formula, m: str, env: Mapping[str, Hyperconfusion],
                            space: SampleSpace | None = None) -> Hyperconfusion:
    """Most ambiguous value of atom ``m`` making ``f`` evaluate to 2^Ω."""
    if m not in atoms(f):
        raise NotExtractableError(f"{m} does not occur in the requirement")
    g, side = _curry(f, m)
    rest = {k: v for k, v in env.items() if k != m}
    for cond in side:
        if not evaluate(cond, rest, space).is_full():
            raise InfeasibleRequirementError(f"requirement part {cond} fails whatever {m} is")
    return evaluate(g, rest, space)


def pareto_iterate(f: Formula, messages: Sequence[str], env: Mapping[str, Hyperconfusion],
                   max_rounds: int = 20, space: SampleSpace | None = None) -> dict[str, Hyperconfusion]:
    """Round-robin re-extraction of each message given the others, starting from ⊥ where unbound."""
    env = dict(env)
    spaces = {x.space for x in env.values()}
    if space is None:
        if len(spaces) != 1:
            raise InputError("cannot infer the sample space from the environment")
        space = spaces.pop()
    for m in messages:
        env.setdefault(m, null(space))
    for _ in range(max_rounds):
        changed = False
        for m in messages:
            new = extract_optimal_message(f, m, env, space)
            if new != env[m]:
                env[m] = new
                changed = True
        if not changed:
            break
    return env


# -- Slepian-Wolf --------------------------------------------------------------

@dataclass
class SlepianWolfResult:
    message: Hyperconfusion
    encoder_feasible: bool     # X ⊆ M*
    coarse: CoarseResult


def slepian_wolf(x: Hyperconfusion, y: Hyperconfusion, p: ProbSpace) -> SlepianWolfResult:
    """M* = Y → X; communication measured by the coarse entropy H(M* ↘ X)."""
    _same_space(x, y)
    m = implication(y, x)
    return SlepianWolfResult(m, x.subset_of(m), coarse_entropy_details(m, x, p))
