"""Context-free session types: syntax, well-formedness, grammar conversion.

Pretypes are built from message exchange (?M, !M), internal and external
choice, skip, sequential composition, variables and recursion.  A pretype is
a type when it is closed, every recursion is contractive, and every variable
is bound.  Well-formed types convert into words over a shared simple grammar
whose size and valuation stay linear in the size of the type, so type
equivalence reduces to bisimilarity of the converted words.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .grammar import ContractViolation, Grammar, Word


@dataclass(frozen=True)
class In:
    msg: str


@dataclass(frozen=True)
class Out:
    msg: str


def _norm_branches(branches):
    out = tuple(sorted(((str(l), t) for l, t in branches), key=lambda it: it[0]))
    labels = [l for l, _ in out]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate choice label in {labels}")
    return out


@dataclass(frozen=True)
class IntChoice:
    branches: tuple

    def __post_init__(self):
        object.__setattr__(self, "branches", _norm_branches(self.branches))


@dataclass(frozen=True)
class ExtChoice:
    branches: tuple

    def __post_init__(self):
        object.__setattr__(self, "branches", _norm_branches(self.branches))


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Seq:
    first: "SessionType"
    second: "SessionType"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Rec:
    var: str
    body: "SessionType"


SessionType = In | Out | IntChoice | ExtChoice | Skip | Seq | Var | Rec

SKIP = Skip()


# ---------------------------------------------------------------------------
# surface syntax


_TOKEN = re.compile(
    r"\s*(?:(?P<punct>\+\{|&\{|[}{,:;.()])|(?P<msg>[?!])|(?P<ident>[A-Za-z][A-Za-z0-9_']*))"
)


class TypeSyntaxError(ValueError):
    def __init__(self, message, pos):
        super().__init__(f"at position {pos}: {message}")
        self.pos = pos


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise TypeSyntaxError(f"unexpected character {text[pos:].lstrip()[0]!r}", pos)
            break
        if m.group("punct"):
            tokens.append((m.group("punct"), m.start()))
        elif m.group("msg"):
            tokens.append((m.group("msg"), m.start()))
        else:
            tokens.append((m.group("ident"), m.start()))
        pos = m.end()
    tokens.append((None, len(text)))
    return tokens


def parse_type(text: str) -> SessionType:
    """Parse the surface syntax; `;` is right-associative and `rec x .`
    extends maximally to the right."""
    tokens = _tokenize(text)
    index = 0

    def peek():
        return tokens[index][0]

    def pos():
        return tokens[index][1]

    def take(expected=None):
        nonlocal index
        tok, at = tokens[index]
        if expected is not None and tok != expected:
            raise TypeSyntaxError(f"expected {expected!r}, found {tok!r}", at)
        index += 1
        return tok

    def ident():
        tok, at = tokens[index]
        if tok is None or not re.fullmatch(r"[A-Za-z][A-Za-z0-9_']*", tok or ""):
            raise TypeSyntaxError(f"expected an identifier, found {tok!r}", at)
        return take()

    def parse_seq():
        if peek() == "rec":
            take()
            name = ident()
            take(".")
            return Rec(name, parse_seq())
        left = parse_atom()
        if peek() == ";":
            take()
            return Seq(left, parse_seq())
        return left

    def parse_atom():
        tok = peek()
        if tok == "(":
            take()
            inner = parse_seq()
            take(")")
            return inner
        if tok in ("?", "!"):
            take()
            msg = ident()
            return In(msg) if tok == "?" else Out(msg)
        if tok in ("+{", "&{"):
            take()
            branches = []
            if peek() != "}":
                while True:
                    label = ident()
                    take(":")
                    branches.append((label, parse_seq()))
                    if peek() != ",":
                        break
                    take(",")
            take("}")
            cls = IntChoice if tok == "+{" else ExtChoice
            return cls(tuple(branches))
        if tok == "skip":
            take()
            return SKIP
        if tok is not None and re.fullmatch(r"[A-Za-z][A-Za-z0-9_']*", tok):
            return Var(take())
        raise TypeSyntaxError(f"unexpected token {tok!r}", pos())

    result = parse_seq()
    if peek() is not None:
        raise TypeSyntaxError(f"trailing input {peek()!r}", pos())
    return result


def format_type(t: SessionType) -> str:
    if isinstance(t, In):
        return f"?{t.msg}"
    if isinstance(t, Out):
        return f"!{t.msg}"
    if isinstance(t, (IntChoice, ExtChoice)):
        mark = "+" if isinstance(t, IntChoice) else "&"
        body = ", ".join(f"{l}: {format_type(u)}" for l, u in t.branches)
        return mark + "{" + body + "}"
    if isinstance(t, Skip):
        return "skip"
    if isinstance(t, Seq):
        left = format_type(t.first)
        if isinstance(t.first, (Seq, Rec)):
            left = f"({left})"
        return f"{left} ; {format_type(t.second)}"
    if isinstance(t, Var):
        return t.name
    return f"rec {t.var} . {format_type(t.body)}"


# ---------------------------------------------------------------------------
# predicates


def is_terminated(t: SessionType) -> bool:
    """A pretype that provides no communication at all."""
    if isinstance(t, Skip):
        return True
    if isinstance(t, Seq):
        return is_terminated(t.first) and is_terminated(t.second)
    if isinstance(t, Rec):
        return is_terminated(t.body)
    return False


def is_contractive(t: SessionType) -> bool:
    """Recursion always unfolds to a constructor; bare variables are not
    contractive, and a terminated left factor defers to the right one."""
    if isinstance(t, (In, Out, IntChoice, ExtChoice, Skip)):
        return True
    if isinstance(t, Seq):
        if is_terminated(t.first):
            return is_contractive(t.second)
        return is_contractive(t.first)
    if isinstance(t, Rec):
        return is_contractive(t.body)
    return False


def is_type(t: SessionType, ctx=frozenset()) -> bool:
    """Type formation under a set of bound variables."""
    if isinstance(t, (In, Out, Skip)):
        return True
    if isinstance(t, (IntChoice, ExtChoice)):
        return all(is_type(u, ctx) for _, u in t.branches)
    if isinstance(t, Seq):
        return is_type(t.first, ctx) and is_type(t.second, ctx)
    if isinstance(t, Var):
        return t.name in ctx
    if isinstance(t, Rec):
        return is_contractive(t) and is_type(t.body, ctx | {t.var})
    return False


def size(t: SessionType) -> int:
    """Number of abstract-syntax nodes."""
    if isinstance(t, (In, Out, Skip, Var)):
        return 1
    if isinstance(t, (IntChoice, ExtChoice)):
        return 1 + sum(size(u) for _, u in t.branches)
    if isinstance(t, Seq):
        return 1 + size(t.first) + size(t.second)
    return 1 + size(t.body)


def free_vars(t: SessionType) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Seq):
        return free_vars(t.first) | free_vars(t.second)
    if isinstance(t, (IntChoice, ExtChoice)):
        return frozenset().union(*(free_vars(u) for _, u in t.branches)) if t.branches else frozenset()
    if isinstance(t, Rec):
        return free_vars(t.body) - {t.var}
    return frozenset()


def substitute(t: SessionType, name: str, repl: SessionType) -> SessionType:
    """Capture-avoiding substitution t[name := repl]."""
    if isinstance(t, Var):
        return repl if t.name == name else t
    if isinstance(t, (In, Out, Skip)):
        return t
    if isinstance(t, Seq):
        return Seq(substitute(t.first, name, repl), substitute(t.second, name, repl))
    if isinstance(t, (IntChoice, ExtChoice)):
        return type(t)(tuple((l, substitute(u, name, repl)) for l, u in t.branches))
    if t.var == name:
        return t
    if t.var in free_vars(repl) and t.var != name:
        fresh = t.var
        taken = free_vars(repl) | free_vars(t.body) | {name}
        while fresh in taken:
            fresh += "'"
        body = substitute(t.body, t.var, Var(fresh))
        return Rec(fresh, substitute(body, name, repl))
    return Rec(t.var, substitute(t.body, name, repl))


def unfold(t: Rec) -> SessionType:
    return substitute(t.body, t.var, t)


# ---------------------------------------------------------------------------
# conversion to simple grammars


def _why_not_type(t: SessionType) -> str:
    loose = free_vars(t)
    if loose:
        return f"unbound variables {sorted(loose)}"

    def bad_rec(u):
        if isinstance(u, Rec):
            if not is_contractive(u):
                return u
            return bad_rec(u.body)
        if isinstance(u, Seq):
            return bad_rec(u.first) or bad_rec(u.second)
        if isinstance(u, (IntChoice, ExtChoice)):
            for _, b in u.branches:
                found = bad_rec(b)
                if found:
                    return found
        return None

    culprit = bad_rec(t)
    if culprit is not None:
        return f"non-contractive recursion {format_type(culprit)}"
    return "type formation fails"


def to_grammar(types) -> tuple[Grammar, list[Word]]:
    """Convert well-formed closed types into words over one shared simple grammar.

    Each converted type draws from its own pool of fresh nonterminals T0,
    T1, ..., numbered by a single counter, so the pools are disjoint.
    Choice labels become polarity-tagged terminals: internal and external
    choice on the same label stay distinguishable.
    """
    for t in types:
        if not is_type(t):
            raise ContractViolation(f"not a well-formed type: {_why_not_type(t)}")
    counter = iter(range(10**9))
    created: list[str] = []
    triples: list[tuple[str, str, Word]] = []
    productions_of: dict[str, list[tuple[str, Word]]] = {}

    def fresh() -> str:
        name = f"T{next(counter)}"
        created.append(name)
        productions_of[name] = []
        return name

    def emit(x, a, rhs):
        triples.append((x, a, rhs))
        productions_of[x].append((a, rhs))

    def convert(t, env) -> Word:
        if isinstance(t, In):
            x = fresh()
            emit(x, f"?{t.msg}", ())
            return (x,)
        if isinstance(t, Out):
            x = fresh()
            emit(x, f"!{t.msg}", ())
            return (x,)
        if isinstance(t, (IntChoice, ExtChoice)):
            mark = "+" if isinstance(t, IntChoice) else "&"
            x = fresh()
            for label, branch in t.branches:
                emit(x, f"{mark}{label}", convert(branch, env))
            return (x,)
        if isinstance(t, Skip):
            return ()
        if isinstance(t, Seq):
            return convert(t.first, env) + convert(t.second, env)
        if isinstance(t, Var):
            return (env[t.name],)
        if is_terminated(t):
            return ()
        x = fresh()
        inner = convert(t.body, {**env, t.var: x})
        # a non-terminated contractive body always converts to a nonempty word
        assert inner, "recursion body converted to the empty word"
        head, tail = inner[0], inner[1:]
        for a, rhs in productions_of[head]:
            emit(x, a, rhs + tail)
        return (x,)

    words = [convert(t, {}) for t in types]
    grammar = Grammar(triples, nonterminals=created)
    return grammar, words


def equivalent(t: SessionType, u: SessionType, validate: bool = False) -> bool:
    """Type equivalence, decided as bisimilarity of the converted words."""
    from .engine import decide_words

    grammar, words = to_grammar([t, u])
    decision, *_ = decide_words(grammar, words[0], words[1], validate=validate)
    return decision.bisimilar
