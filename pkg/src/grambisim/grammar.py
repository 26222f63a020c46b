"""Context-free grammars in Greibach normal form and their transition semantics.

A grammar rewrites words of nonterminals at the head: a production X -a-> gamma
induces the labelled transition X delta -a-> gamma delta for every word delta.
Words are plain tuples of interned symbol names; the grammar carries the
first-appearance index of every symbol, which fixes all canonical orderings.
"""

from __future__ import annotations

import re

Word = tuple[str, ...]

EMPTY: Word = ()

IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_']*")


class GrammarError(ValueError):
    """Malformed grammar text or an inconsistent production set."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class DeterminismError(GrammarError):
    """A `%simple` file declared two productions for the same (X, a)."""


class ContractViolation(ValueError):
    """An operation was invoked outside its stated precondition."""


class Grammar:
    """A GNF grammar over interned nonterminal/terminal names.

    `productions` maps (nonterminal, terminal) to the tuple of alternative
    right-hand sides (sorted by the index sequence of their symbols); a
    grammar is simple when every key has exactly one alternative.
    Instances are immutable after construction and safe to share.
    """

    def __init__(self, productions, nonterminals=(), terminals=()):
        self.nonterminals: list[str] = []
        self.terminals: list[str] = []
        self.nt_index: dict[str, int] = {}
        self.t_index: dict[str, int] = {}
        for x in nonterminals:
            self._add_nonterminal(x)
        for a in terminals:
            self._add_terminal(a)
        grouped: dict[tuple[str, str], list[Word]] = {}
        self._triples: list[tuple[str, str, Word]] = []
        for x, a, rhs in productions:
            rhs = tuple(rhs)
            self._add_nonterminal(x)
            self._add_terminal(a)
            for s in rhs:
                self._add_nonterminal(s)
            alts = grouped.setdefault((x, a), [])
            if rhs not in alts:
                alts.append(rhs)
                self._triples.append((x, a, rhs))
        self.productions: dict[tuple[str, str], tuple[Word, ...]] = {
            key: tuple(sorted(alts, key=self.rhs_key)) for key, alts in grouped.items()
        }
        self.is_simple = all(len(alts) == 1 for alts in self.productions.values())
        self._succ: dict[str, list[tuple[str, Word]]] = {x: [] for x in self.nonterminals}
        for x in self.nonterminals:
            for a in self.terminals:
                for rhs in self.productions.get((x, a), ()):
                    self._succ[x].append((a, rhs))
        self._enabled = {
            x: tuple(a for a, _ in self._succ[x]) for x in self.nonterminals
        }

    def _add_nonterminal(self, x):
        if x not in self.nt_index:
            self.nt_index[x] = len(self.nonterminals)
            self.nonterminals.append(x)

    def _add_terminal(self, a):
        if a not in self.t_index:
            self.t_index[a] = len(self.terminals)
            self.terminals.append(a)

    def rhs_key(self, rhs: Word):
        return tuple(self.nt_index[s] for s in rhs)

    @property
    def degree(self) -> int:
        """Maximum number of transitions of any nonterminal."""
        return max((len(v) for v in self._succ.values()), default=0)

    def successors(self, x: str) -> list[tuple[str, Word]]:
        """Productions of `x` as (terminal, rhs), in (terminal, rhs-lex) order."""
        return self._succ[x]

    def enabled(self, w: Word) -> tuple[str, ...]:
        """Terminals labelling some transition of `w` (empty for the empty word)."""
        if not w:
            return ()
        return self._enabled[w[0]]

    def transitions(self, w: Word) -> list[tuple[str, Word]]:
        """All transitions of `w`, ordered by terminal then right-hand side."""
        if not w:
            return []
        head, tail = w[0], tuple(w[1:])
        return [(a, rhs + tail) for a, rhs in self._succ[head]]

    def step(self, w: Word, a: str) -> Word | None:
        """The unique a-successor of `w`, or None. Requires a simple grammar."""
        if not self.is_simple:
            raise ContractViolation("unique successors require a simple grammar")
        if not w:
            return None
        alts = self.productions.get((w[0], a))
        if not alts:
            return None
        return alts[0] + tuple(w[1:])

    def run(self, w: Word, u) -> Word | None:
        """Follow the terminal word `u` from `w`; None if some step is undefined."""
        if not self.is_simple:
            raise ContractViolation("run is only defined on simple grammars")
        current = tuple(w)
        for a in u:
            if not current:
                return None
            alts = self.productions.get((current[0], a))
            if not alts:
                return None
            current = alts[0] + current[1:]
        return current

    def dead_nonterminals(self) -> list[str]:
        """Nonterminals with no productions, in declaration order."""
        return [x for x in self.nonterminals if not self._succ[x]]

    def check_word(self, w: Word):
        for s in w:
            if s not in self.nt_index:
                raise GrammarError(f"unknown nonterminal {s!r}")
        return tuple(w)

    def triples(self):
        """All productions as (x, a, rhs), in the order they were supplied."""
        return list(self._triples)


def parse_word(text: str) -> Word:
    """A whitespace-separated nonterminal list; `-` denotes the empty word."""
    text = text.strip()
    if text == "-" or not text:
        return ()
    symbols = text.split()
    for s in symbols:
        if not IDENT.fullmatch(s):
            raise GrammarError(f"invalid nonterminal name {s!r}")
    return tuple(symbols)


def format_word(w: Word) -> str:
    return " ".join(w) if w else "-"


def parse_grammar(text: str) -> Grammar:
    """Parse the line-oriented grammar format.

    Lines are `<NT> <terminal> -> <NT>*`; `#` starts a comment line; an
    optional `%simple` header asserts determinism and turns duplicate
    (nonterminal, terminal) keys into errors.  `%nonterminals ...` and
    `%terminals ...` headers preregister symbols, which pins their ordering
    and allows production-less (dead) nonterminals in files.
    """
    declared_simple = False
    triples = []
    pre_nts: list[str] = []
    pre_ts: list[str] = []
    seen: dict[tuple[str, str], int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip()
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped == "%simple":
            declared_simple = True
            continue
        if stripped.startswith("%nonterminals") or stripped.startswith("%terminals"):
            keyword, *names = stripped.split()
            for name in names:
                if not IDENT.fullmatch(name):
                    raise GrammarError(f"invalid identifier {name!r}", lineno, 1)
            (pre_nts if keyword == "%nonterminals" else pre_ts).extend(names)
            continue
        head = IDENT.match(line, len(line) - len(line.lstrip()))
        if not head:
            raise GrammarError("expected a nonterminal", lineno, _first_col(line))
        rest = line[head.end():]
        term = IDENT.match(rest, len(rest) - len(rest.lstrip()))
        if not term:
            raise GrammarError("expected a terminal", lineno, head.end() + 1)
        after = rest[term.end():].lstrip()
        arrow_col = len(line) - len(after)
        if not after.startswith("->"):
            raise GrammarError("expected '->'", lineno, arrow_col + 1)
        rhs_text = after[2:]
        rhs = []
        pos = 0
        while True:
            chunk = rhs_text[pos:].lstrip()
            if not chunk:
                break
            col = arrow_col + 2 + (len(rhs_text) - len(chunk))
            sym = IDENT.match(chunk)
            if not sym or sym.start() != 0:
                raise GrammarError(f"invalid symbol near {chunk.split()[0]!r}", lineno, col + 1)
            rhs.append(sym.group())
            pos = len(rhs_text) - len(chunk) + sym.end()
        key = (head.group(), term.group())
        if declared_simple and key in seen and tuple(rhs) not in [t[2] for t in triples if (t[0], t[1]) == key]:
            raise DeterminismError(
                f"second production for {key[0]} {key[1]} (first at line {seen[key]})",
                lineno, 1,
            )
        seen.setdefault(key, lineno)
        triples.append((head.group(), term.group(), tuple(rhs)))
    g = Grammar(triples, nonterminals=pre_nts, terminals=pre_ts)
    if declared_simple and not g.is_simple:
        raise DeterminismError("grammar declared %simple has duplicate productions")
    return g


def _first_col(line: str) -> int:
    return len(line) - len(line.lstrip()) + 1


def format_grammar(g: Grammar) -> str:
    """Serialize to the file format so that re-parsing replays exactly.

    Symbol orderings are pinned with header lines, which also keeps
    production-less nonterminals alive in fuzz reproducers.
    """
    lines = ["%simple"] if g.is_simple else []
    if g.nonterminals:
        lines.append("%nonterminals " + " ".join(g.nonterminals))
    if g.terminals:
        lines.append("%terminals " + " ".join(g.terminals))
    for x, a, rhs in g.triples():
        lines.append(f"{x} {a} -> {' '.join(rhs)}".rstrip())
    return "\n".join(lines) + "\n"


def eliminate_dead(g: Grammar, pairs):
    """Extend dead nonterminals with a fresh self-loop terminal.

    Returns the input unchanged when no nonterminal is dead.  Otherwise every
    dead symbol gains a d-self-loop and both words of every query pair are
    suffixed with the lowest-index dead symbol, which preserves bisimilarity
    answers.
    """
    dead = g.dead_nonterminals()
    if not dead:
        return g, [(tuple(l), tuple(r)) for l, r in pairs]
    fresh = "d"
    k = 0
    while fresh in g.t_index:
        # underscore prefix is unreachable from grammar files, so this cannot recur
        fresh = f"_dead{k or ''}"
        k += 1
    triples = g.triples()
    for x in dead:
        triples.append((x, fresh, (x,)))
    extended = Grammar(triples, nonterminals=g.nonterminals, terminals=g.terminals)
    bottom = dead[0]
    new_pairs = [(tuple(l) + (bottom,), tuple(r) + (bottom,)) for l, r in pairs]
    return extended, new_pairs
