"""Intuitionistic propositional formulae: parser, printer, evaluator, validity checks.

Grammar (loosest first)::

    imp   := disj ( "->" imp )?          right associative
    disj  := conj ( "|" conj )*
    conj  := unary ( "&" unary )*
    unary := "~" unary | primary          ~A is sugar for A -> F
    primary := IDENT | "T" | "F" | "(" imp ")"
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import Hyperconfusion, SampleSpace
from .errors import InputError, SpaceMismatchError, UnboundAtomError
from .heyting import full, hyperconfusion_tables, implication, join, meet, null, _downset_families, family_to_maxs


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __rshift__(self, other):
        return Imp(self, other)

    def __invert__(self):
        return Imp(self, Bot())

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


def Not(f: Formula) -> Formula:
    return Imp(f, Bot())


class FormulaSyntaxError(InputError):
    def __init__(self, offset: int, expected: set[str], found: str):
        self.offset = offset
        self.expected = frozenset(expected)
        self.found = found
        super().__init__(f"at byte {offset}: expected {' or '.join(sorted(self.expected))}, found {found}")


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(->)|([~&|()])|([A-Za-z_][A-Za-z0-9_]*))")
RESERVED = {"T", "F"}


def _tokenize(text: str):
    tokens = []
    pos = 0
    data = text
    while True:
        m = _TOKEN.match(data, pos)
        if not m:
            rest = data[pos:]
            if rest.strip() == "":
                break
            skip = len(rest) - len(rest.lstrip())
            start = pos + skip
            raise FormulaSyntaxError(len(data[:start].encode()), {"formula"}, repr(data[start]))
        kind = m.group(1) or m.group(2) or "ident"
        value = m.group(0).strip()
        start = m.start(1) if m.group(1) else m.start(2) if m.group(2) else m.start(3)
        tokens.append((kind, value, len(data[:start].encode())))
        pos = m.end()
    tokens.append(("end", "", len(data.encode())))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, value, off = self.peek()
        raise FormulaSyntaxError(off, expected, "end of input" if kind == "end" else repr(value))

    def parse(self) -> Formula:
        f = self.imp()
        if self.peek()[0] != "end":
            self.fail({"'->'", "'|'", "'&'", "end of input"})
        return f

    def imp(self):
        left = self.disj()
        if self.peek()[0] == "->":
            self.take()
            return Imp(left, self.imp())
        return left

    def disj(self):
        f = self.conj()
        while self.peek()[0] == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek()[0] == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self):
        if self.peek()[0] == "~":
            self.take()
            return Not(self.unary())
        return self.primary()

    def primary(self):
        kind, value, _ = self.peek()
        if kind == "ident":
            self.take()
            if value == "T":
                return Top()
            if value == "F":
                return Bot()
            return Atom(value)
        if kind == "(":
            self.take()
            f = self.imp()
            if self.peek()[0] != ")":
                self.fail({"')'"})
            self.take()
            return f
        self.fail({"identifier", "'T'", "'F'", "'~'", "'('"})


def parse(text: str) -> Formula:
    return _Parser(text).parse()


def to_text(f: Formula) -> str:
    """Fully parenthesised rendering that :func:`parse` reads back."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bot):
        return "F"
    op = {And: "&", Or: "|", Imp: "->"}[type(f)]
    return f"({to_text(f.left)} {op} {to_text(f.right)})"


def atoms(f: Formula) -> list[str]:
    found = set()

    def walk(g):
        if isinstance(g, Atom):
            found.add(g.name)
        elif isinstance(g, (And, Or, Imp)):
            walk(g.left)
            walk(g.right)

    walk(f)
    return sorted(found)


# -- evaluation --------------------------------------------------------------

def _env_space(env: Mapping[str, Hyperconfusion], space: SampleSpace | None):
    spaces = {x.space for x in env.values()}
    if space is not None:
        spaces.add(space)
    if len(spaces) > 1:
        raise SpaceMismatchError("environment bindings live on different sample spaces")
    if not spaces:
        raise InputError("cannot evaluate without a sample space")
    return spaces.pop()


def evaluate(f: Formula, env: Mapping[str, Hyperconfusion], space: SampleSpace | None = None) -> Hyperconfusion:
    """And -> meet, Or -> join, Imp -> implication, T -> 2^Ω, F -> {∅}."""
    missing = [a for a in atoms(f) if a not in env]
    if missing:
        raise UnboundAtomError(f"unbound atoms: {', '.join(missing)}")
    space = _env_space(env, space)
    top, bot = full(space), null(space)
    cache: dict = {}

    def ev(g):
        if g in cache:
            return cache[g]
        if isinstance(g, Atom):
            out = env[g.name]
        elif isinstance(g, Top):
            out = top
        elif isinstance(g, Bot):
            out = bot
        elif isinstance(g, And):
            out = meet(ev(g.left), ev(g.right))
        elif isinstance(g, Or):
            out = join(ev(g.left), ev(g.right))
        else:
            out = implication(ev(g.left), ev(g.right))
        cache[g] = out
        return out

    return ev(f)


def classical_check(f: Formula) -> bool:
    """Truth-table tautology check over {⊥, ⊤}."""
    names = atoms(f)
    k = len(names)
    if k > 20:
        raise InputError("classical check is capped at 20 atoms")
    rows = 1 << k
    ones = (1 << rows) - 1
    # bit r of column j is the value of atom j in row r
    cols = {}
    for j, name in enumerate(names):
        col = 0
        for r in range(rows):
            if (r >> j) & 1:
                col |= 1 << r
        cols[name] = col

    def ev(g):
        if isinstance(g, Atom):
            return cols[g.name]
        if isinstance(g, Top):
            return ones
        if isinstance(g, Bot):
            return 0
        a, b = ev(g.left), ev(g.right)
        if isinstance(g, And):
            return a & b
        if isinstance(g, Or):
            return a | b
        return (ones & ~a) | b

    return ev(f) == ones


# -- Medvedev validity ----------------------------------------------------------

MEDVEDEV_BUDGET = 10_000_000
# tables of all hyperconfusions exist up to this size; one more level is walked directly
TABLE_MAX_N = 4


@dataclass
class MedvedevVerdict:
    valid: bool                      # no countermodel found in the searched range
    checked_up_to: int               # largest n fully enumerated
    n_max: int
    countermodel: dict | None = None  # atom name -> Hyperconfusion over [n]
    countermodel_n: int | None = None
    partial: bool = False             # stopped early because of the budget
    note: str = ""

    def describe(self) -> str:
        if self.countermodel is not None:
            parts = [f"{k} = {sorted(map(sorted, v.maxs_labels()))}" for k, v in self.countermodel.items()]
            return f"countermodel at n={self.countermodel_n}: " + "; ".join(parts)
        if self.partial:
            return f"no countermodel up to n={self.checked_up_to} (partial: {self.note})"
        return f"valid up to n={self.checked_up_to}"


def _eval_tables(f: Formula, names: list[str], tab) -> np.ndarray:
    k = len(names)
    count = len(tab)
    grids = np.indices((count,) * k).reshape(k, -1) if k else np.zeros((0, 1), dtype=int)
    pos = {name: j for j, name in enumerate(names)}
    size = grids.shape[1]
    cache: dict = {}

    def ev(g):
        if g in cache:
            return cache[g]
        if isinstance(g, Atom):
            out = grids[pos[g.name]]
        elif isinstance(g, Top):
            out = np.full(size, tab.top)
        elif isinstance(g, Bot):
            out = np.full(size, tab.bot)
        else:
            a, b = ev(g.left), ev(g.right)
            table = tab.meet if isinstance(g, And) else tab.join if isinstance(g, Or) else tab.imp
            out = table[a, b]
        cache[g] = out
        return out

    return ev(f)


def _family_down_masks(n: int) -> list[int]:
    down = []
    for a in range(1 << n):
        m, sub = 0, a
        while True:
            m |= 1 << sub
            if sub == 0:
                break
            sub = (sub - 1) & a
        down.append(m)
    return down


def _eval_family(f: Formula, binding: Mapping[str, int], n: int, down: list[int]) -> int:
    """Evaluate on whole-family indicator masks over 2^[n]."""
    top = (1 << (1 << n)) - 1

    def ev(g):
        if isinstance(g, Atom):
            return binding[g.name]
        if isinstance(g, Top):
            return top
        if isinstance(g, Bot):
            return 1
        a, b = ev(g.left), ev(g.right)
        if isinstance(g, And):
            return a & b
        if isinstance(g, Or):
            return a | b
        bad = a & ~b
        out = 0
        for s, d in enumerate(down):
            if d & bad == 0:
                out |= 1 << s
        return out

    return ev(f)


def count_hyperconfusions(n: int) -> int:
    return len(_downset_families(n)) - 1


def medvedev_check(f: Formula, n_max: int, budget: int = MEDVEDEV_BUDGET) -> MedvedevVerdict:
    """Search all hyperconfusion assignments over [n], n = 1..n_max, for a countermodel.

    Order: n ascending, then assignments in lexicographic order of the atoms'
    (sorted by name) positions in the canonical hyperconfusion order.
    """
    names = atoms(f)
    k = len(names)
    checked = 0
    for n in range(1, n_max + 1):
        count = count_hyperconfusions(n) if n <= 5 else None
        if count is None or count ** k > budget:
            return MedvedevVerdict(True, checked, n_max, partial=True,
                                   note=f"n={n} needs more than {budget} assignments")
        if n <= TABLE_MAX_N:
            tab = hyperconfusion_tables(n)
            values = _eval_tables(f, names, tab)
            bad = np.flatnonzero(values != tab.top)
            if bad.size:
                combo = np.unravel_index(int(bad[0]), (len(tab),) * k) if k else ()
                model = {name: tab.elements[int(i)] for name, i in zip(names, combo)}
                return MedvedevVerdict(False, checked, n_max, model, n)
        else:
            fams = [fam for fam in _downset_families(n) if fam]
            down = _family_down_masks(n)
            top = (1 << (1 << n)) - 1
            space = SampleSpace.of_size(n)
            for combo in itertools.product(range(len(fams)), repeat=k):
                binding = {name: fams[i] for name, i in zip(names, combo)}
                if _eval_family(f, binding, n, down) != top:
                    model = {name: Hyperconfusion(space, family_to_maxs(fams[i], n))
                             for name, i in zip(names, combo)}
                    return MedvedevVerdict(False, checked, n_max, model, n)
        checked = n
    return MedvedevVerdict(True, checked, n_max)
