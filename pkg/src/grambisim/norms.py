"""Norms, seminorms, canonical norm-reducing data, and the grammar valuation.

The norm of a word is the length of the shortest terminal word driving it to
the empty word (infinite when none exists); the seminorm is the norm of the
maximal normed prefix.  Every normed nonterminal carries a canonical
norm-reducing step, the lexicographically least one, from which canonical
(semi)norm-reducing sequences and the `descend` dynamic are derived.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .grammar import ContractViolation, Grammar, Word


class _Infinity:
    """The infinite norm: compares above every integer and absorbs addition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __repr__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

Norm = "int | _Infinity"


@dataclass(frozen=True)
class NormTable:
    """Per-nonterminal norms plus the canonical norm-reducing step.

    `canonical_step[x]` is the (terminal, rhs) pair minimal in
    (terminal index, rhs index sequence) order among the norm-reducing
    productions of a normed `x`.
    """

    norm: dict
    canonical_step: dict = field(default_factory=dict)

    def is_normed(self, x: str) -> bool:
        return self.norm[x] is not INF

    def word_norm(self, w: Word):
        total = 0
        for x in w:
            n = self.norm[x]
            if n is INF:
                return INF
            total += n
        return total

    def word_normed(self, w: Word) -> bool:
        return self.word_norm(w) is not INF

    def seminorm(self, w: Word) -> int:
        """Norm of the maximal all-normed prefix of `w`."""
        total = 0
        for x in w:
            n = self.norm[x]
            if n is INF:
                break
            total += n
        return total


def compute_norms(g: Grammar) -> NormTable:
    """Shortest-completion norms via a Dijkstra-style relaxation.

    A production becomes relaxable once all right-hand-side symbols have
    final norms; its head is then offered 1 + the sum of those norms.
    Unreached nonterminals are unnormed.
    """
    heads = []
    rhss = []
    pending = []
    value = []
    watchers: dict[str, list[int]] = {x: [] for x in g.nonterminals}
    heap = []
    for x in g.nonterminals:
        for a, rhs in g.successors(x):
            i = len(heads)
            heads.append(x)
            rhss.append(rhs)
            pending.append(len(rhs))
            value.append(1)
            for s in rhs:
                watchers[s].append(i)
            if not rhs:
                heapq.heappush(heap, (1, g.nt_index[x], x))
    norm: dict = {}
    while heap:
        n, _, x = heapq.heappop(heap)
        if x in norm:
            continue
        norm[x] = n
        for i in watchers[x]:
            value[i] += n
            pending[i] -= 1
            if pending[i] == 0 and heads[i] not in norm:
                heapq.heappush(heap, (value[i], g.nt_index[heads[i]], heads[i]))
    for x in g.nonterminals:
        norm.setdefault(x, INF)
    canonical: dict = {}
    for x in g.nonterminals:
        target = norm[x]
        if target is INF:
            continue
        for a, rhs in g.successors(x):
            if all(norm[s] is not INF for s in rhs) and 1 + sum(norm[s] for s in rhs) == target:
                canonical[x] = (a, rhs)
                break
    return NormTable(norm, canonical)


def descend(table: NormTable, w: Word, k: int) -> Word:
    """The k-th word of the canonical seminorm-reducing sequence of `w`.

    Defined for 0 <= k <= seminorm(w) by: w at 0; strip a head whose whole
    norm fits in k; otherwise replace the head by its canonical step.
    """
    if not 0 <= k <= table.seminorm(w):
        raise ValueError(f"k={k} outside 0..{table.seminorm(w)} for {w}")
    w = tuple(w)
    while k:
        head, rest = w[0], w[1:]
        n = table.norm[head]
        if n is not INF and n <= k:
            k -= n
            w = rest
        else:
            _, alpha = table.canonical_step[head]
            k -= 1
            w = alpha + rest
    return w


def canonical_word(table: NormTable, x: str) -> tuple[str, ...]:
    """Terminal labels of the canonical norm-reducing sequence of `x` to the empty word."""
    if table.norm[x] is INF:
        raise ValueError(f"{x} is unnormed")
    out = []
    w: Word = (x,)
    while w:
        a, alpha = table.canonical_step[w[0]]
        out.append(a)
        w = alpha + w[1:]
    return tuple(out)


def valuation(table: NormTable, g: Grammar) -> int:
    """Maximum seminorm among production right-hand sides; 0 without productions."""
    return max(
        (table.seminorm(rhs) for alts in g.productions.values() for rhs in alts),
        default=0,
    )


def prune(table: NormTable, w: Word) -> Word:
    """Drop everything after the first unnormed symbol; bisimilarity-preserving."""
    for i, x in enumerate(w):
        if table.norm[x] is INF:
            return tuple(w[: i + 1])
    return tuple(w)


def order_key(g: Grammar, table: NormTable, x: str):
    """Total order on nonterminals: norms first (infinite greatest), and
    earlier-declared symbols rank higher on norm ties."""
    n = table.norm[x]
    if n is INF:
        return (1, 0, -g.nt_index[x])
    return (0, n, -g.nt_index[x])
