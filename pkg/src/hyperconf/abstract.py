"""Finite Heyting algebras given by operation tables, and their map into hyperconfusions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import Hyperconfusion, SampleSpace, maximal_sets
from .errors import InputError
from .heyting import HyperconfusionTables, hyperconfusion_tables, implication, join, meet


@dataclass
class FiniteHeyting:
    labels: tuple[str, ...]
    meet: np.ndarray
    join: np.ndarray
    imp: np.ndarray
    bot: int
    top: int

    def __post_init__(self):
        self.labels = tuple(str(v) for v in self.labels)
        k = len(self.labels)
        if k == 0:
            raise InputError("an algebra needs at least one element")
        for name in ("meet", "join", "imp"):
            tab = np.asarray(getattr(self, name), dtype=np.int64)
            if tab.shape != (k, k):
                raise InputError(f"{name} table must be {k}x{k}")
            if tab.min() < 0 or tab.max() >= k:
                raise InputError(f"{name} table has out-of-range entries")
            setattr(self, name, tab)
        for v in (self.bot, self.top):
            if not 0 <= v < k:
                raise InputError("bot/top must index an element")

    def __len__(self):
        return len(self.labels)

    def leq(self, a: int, b: int) -> bool:
        return int(self.meet[a, b]) == a

    def neg(self, a: int) -> int:
        return int(self.imp[a, self.bot])

    def order(self) -> np.ndarray:
        """order[a, b] is True iff a ≤ b."""
        return self.meet == np.arange(len(self))[:, None]


@dataclass
class Validation:
    ok: bool
    reason: str = ""
    witness: tuple = ()

    def __bool__(self):
        return self.ok


def validate(h: FiniteHeyting) -> Validation:
    """Check lattice axioms, bounds and the implication adjunction over all triples."""
    k = len(h)
    M, J, I = h.meet, h.join, h.imp
    idx = np.arange(k)
    for name, tab in (("meet", M), ("join", J)):
        bad = np.argwhere(tab != tab.T)
        if bad.size:
            return Validation(False, f"{name} is not commutative", tuple(int(v) for v in bad[0]))
        bad = np.flatnonzero(tab[idx, idx] != idx)
        if bad.size:
            return Validation(False, f"{name} is not idempotent", (int(bad[0]),))
        # (a∘b)∘c vs a∘(b∘c)
        left = tab[tab[:, :, None], idx[None, None, :]]
        right = tab[idx[:, None, None], tab[None, :, :]]
        bad = np.argwhere(left != right)
        if bad.size:
            return Validation(False, f"{name} is not associative", tuple(int(v) for v in bad[0]))
    bad = np.argwhere(M[idx[:, None], J] != idx[:, None])
    if bad.size:
        return Validation(False, "absorption a∧(a∨b)=a fails", tuple(int(v) for v in bad[0]))
    bad = np.argwhere(J[idx[:, None], M] != idx[:, None])
    if bad.size:
        return Validation(False, "absorption a∨(a∧b)=a fails", tuple(int(v) for v in bad[0]))
    bad = np.flatnonzero(M[h.bot] != h.bot)
    if bad.size:
        return Validation(False, "bot is not least", (int(bad[0]),))
    bad = np.flatnonzero(M[h.top] != idx)
    if bad.size:
        return Validation(False, "top is not greatest", (int(bad[0]),))
    leq = h.order()
    # meet(z,x) ≤ y  <=>  z ≤ imp(x,y), over (z, x, y)
    lhs = leq[M[:, :, None], idx[None, None, :]]
    rhs = leq[idx[:, None, None], I[None, :, :]]
    bad = np.argwhere(lhs != rhs)
    if bad.size:
        return Validation(False, "adjunction z∧x ≤ y iff z ≤ x→y fails", tuple(int(v) for v in bad[0]))
    return Validation(True)


# -- regularization ----------------------------------------------------------------

@dataclass
class Regularization:
    elements: list[int]           # the ¬¬-fixed points, ascending index
    atoms: list[int]              # minimal nonzero regular elements
    psi: dict[int, frozenset]     # regular element -> set of atoms below it
    boolean: bool
    complete_atomic: bool
    note: str = ""

    def boolean_join(self, h: FiniteHeyting, a: int, b: int) -> int:
        return h.neg(int(h.meet[h.neg(a), h.neg(b)]))


def regularization(h: FiniteHeyting) -> Regularization:
    regs = [x for x in range(len(h)) if h.neg(h.neg(x)) == x]
    rset = set(regs)
    nonzero = [x for x in regs if x != h.bot]
    atoms = [x for x in nonzero if not any(y != x and h.leq(y, x) for y in nonzero)]
    psi = {x: frozenset(a for a in atoms if h.leq(a, x)) for x in regs}
    note = ""

    def bjoin(a, b):
        return h.neg(int(h.meet[h.neg(a), h.neg(b)]))

    boolean = True
    for a, b in itertools.product(regs, repeat=2):
        if int(h.meet[a, b]) not in rset or bjoin(a, b) not in rset:
            boolean, note = False, f"not closed at ({h.labels[a]}, {h.labels[b]})"
            break
    if boolean:
        for a in regs:
            if int(h.meet[a, h.neg(a)]) != h.bot or bjoin(a, h.neg(a)) != h.top:
                boolean, note = False, f"{h.labels[a]} has no complement"
                break
    if boolean:
        for a, b, c in itertools.product(regs, repeat=3):
            if int(h.meet[a, bjoin(b, c)]) != bjoin(int(h.meet[a, b]), int(h.meet[a, c])):
                boolean, note = False, "regular elements are not distributive"
                break
    complete_atomic = boolean and len(regs) == 1 << len(atoms)
    if complete_atomic:
        for x in regs:
            acc = h.bot
            for a in psi[x]:
                acc = bjoin(acc, a)
            if acc != x:
                complete_atomic = False
                note = f"{h.labels[x]} is not the join of its atoms"
                break
    elif boolean:
        note = f"{len(regs)} regular elements but {len(atoms)} atoms"
    return Regularization(regs, atoms, psi, boolean, complete_atomic, note)


# -- pseudo-embedding --------------------------------------------------------------

def pseudo_embed(h: FiniteHeyting, reg: Regularization | None = None) -> dict[int, Hyperconfusion]:
    """ζ(x): union of 2^{ψ(z)} over regular z ≤ x, on the sample space of atoms."""
    reg = reg or regularization(h)
    if not reg.atoms:
        raise InputError("the regular elements have no atoms (trivial algebra)")
    space = SampleSpace(tuple(h.labels[a] for a in reg.atoms))
    pos = {a: i for i, a in enumerate(reg.atoms)}

    def bits(z):
        return sum(1 << pos[a] for a in reg.psi[z])

    out = {}
    for x in range(len(h)):
        sets = [bits(z) for z in reg.elements if h.leq(z, x)]
        out[x] = Hyperconfusion(space, maximal_sets(sets))
    return out


@dataclass
class Containments:
    meet_equal: bool = True       # ζ(x∧y) = ζ(x) ∩ ζ(y)
    monotone: bool = True         # x ≤ y ⇒ ζ(x) ⊆ ζ(y)
    imp_below: bool = True        # ζ(x→y) ⊆ ζ(x) → ζ(y)
    join_above: bool = True       # ζ(x∨y) ⊇ ζ(x) ∪ ζ(y)
    reflects_order: bool = True   # ζ(x) ⊆ ζ(y) ⇒ x ≤ y
    imp_equal: bool = True
    join_equal: bool = True
    first_failure: dict = field(default_factory=dict)

    def always_directions(self) -> bool:
        return self.meet_equal and self.monotone and self.imp_below and self.join_above

    def exact(self) -> bool:
        return self.always_directions() and self.reflects_order and self.imp_equal and self.join_equal


def check_containments(h: FiniteHeyting, zeta: dict[int, Hyperconfusion] | None = None) -> Containments:
    zeta = zeta or pseudo_embed(h)
    res = Containments()

    def fail(name, x, y):
        setattr(res, name, False)
        res.first_failure.setdefault(name, (h.labels[x], h.labels[y]))

    for x, y in itertools.product(range(len(h)), repeat=2):
        zx, zy = zeta[x], zeta[y]
        if zeta[int(h.meet[x, y])] != meet(zx, zy):
            fail("meet_equal", x, y)
        le = h.leq(x, y)
        if le and not zx.subset_of(zy):
            fail("monotone", x, y)
        if not le and zx.subset_of(zy):
            fail("reflects_order", x, y)
        zi, hi = zeta[int(h.imp[x, y])], implication(zx, zy)
        if not zi.subset_of(hi):
            fail("imp_below", x, y)
        if zi != hi:
            fail("imp_equal", x, y)
        zj, hj = zeta[int(h.join[x, y])], join(zx, zy)
        if not hj.subset_of(zj):
            fail("join_above", x, y)
        if zj != hj:
            fail("join_equal", x, y)
    return res


@dataclass
class StrictReport:
    strict: bool
    conditions: dict[str, bool]
    reasons: list[str]
    containments: Containments | None = None


def strictly_hyperconfusable(h: FiniteHeyting) -> StrictReport:
    """Regular part complete and atomic, join-dense, and made of join-prime elements.

    When all three hold, ζ is also checked to preserve order both ways,
    meet, join and implication exactly.
    """
    reg = regularization(h)
    reasons = []
    conds = {"complete_atomic": reg.complete_atomic}
    if not reg.complete_atomic:
        reasons.append("regular elements do not form a complete atomic Boolean algebra: " + reg.note)
    dense = True
    for x in range(len(h)):
        acc = h.bot
        for z in reg.elements:
            if h.leq(z, x):
                acc = int(h.join[acc, z])
        if acc != x:
            dense = False
            reasons.append(f"join-density fails: {h.labels[x]} is not a join of regular elements")
            break
    conds["join_dense"] = dense
    prime = True
    for z in reg.elements:
        for x, y in itertools.combinations(range(len(h)), 2):
            if h.leq(z, int(h.join[x, y])) and not h.leq(z, x) and not h.leq(z, y):
                prime = False
                reasons.append(f"join-primality fails: {h.labels[z]} ≤ {h.labels[x]} ∨ {h.labels[y]}"
                               f" but lies below neither")
                break
        if not prime:
            break
    conds["join_prime"] = prime
    strict = all(conds.values())
    cont = None
    if reg.atoms:
        cont = check_containments(h, pseudo_embed(h, reg))
        if strict and not cont.exact():
            reasons.append(f"pseudo-embedding is not exact: {cont.first_failure}")
            conds["embedding_exact"] = False
            strict = False
    return StrictReport(strict, conds, reasons, cont)


# -- fixtures ----------------------------------------------------------------------

def chain(k: int) -> FiniteHeyting:
    """⊥ = 0 < 1 < ... < k-1 = ⊤; implication a→b is ⊤ if a ≤ b else b."""
    idx = np.arange(k)
    meet_t = np.minimum.outer(idx, idx)
    join_t = np.maximum.outer(idx, idx)
    imp_t = np.where(idx[:, None] <= idx[None, :], k - 1, idx[None, :].repeat(k, 0))
    labels = ["bot"] + [f"c{i}" for i in range(1, k - 1)] + ["top"] if k > 1 else ["top"]
    return FiniteHeyting(tuple(labels), meet_t, join_t, imp_t, 0, k - 1)


def boolean_algebra(atoms: int) -> FiniteHeyting:
    """Power set of ``atoms`` points, elements as bitmasks."""
    k = 1 << atoms
    idx = np.arange(k)
    full = k - 1
    meet_t = idx[:, None] & idx[None, :]
    join_t = idx[:, None] | idx[None, :]
    imp_t = (full & ~idx[:, None]) | idx[None, :]
    labels = tuple("{" + ",".join(str(i + 1) for i in range(atoms) if (x >> i) & 1) + "}" for x in range(k))
    return FiniteHeyting(labels, meet_t, join_t, imp_t, 0, full)


def from_tables(tab: HyperconfusionTables) -> FiniteHeyting:
    labels = tuple(repr(x)[len("Hyperconfusion(maxs="):-1] for x in tab.elements)
    return FiniteHeyting(labels, tab.meet, tab.join, tab.imp, tab.bot, tab.top)


def hyps_algebra(n: int) -> FiniteHeyting:
    return from_tables(hyperconfusion_tables(n))


def fixture_algebras() -> dict[str, FiniteHeyting]:
    return {
        "chain2": chain(2),
        "chain3": chain(3),
        "boolean4": boolean_algebra(2),
        "hyps2": hyps_algebra(2),
        "hyps3": hyps_algebra(3),
    }
