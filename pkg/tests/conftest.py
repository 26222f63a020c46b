import random
import string

import pytest
from hypothesis import strategies as st

from grambisim import Grammar, compute_norms, parse_grammar

# the 13-production worked example: X C and Y C differ only after the b b c
# experiment, where the unnormed cores C and D disagree
G1_TEXT = """%simple
X a ->
X b -> Z C
X c ->
Y a ->
Y b -> W C
Y c -> V
Z a ->
Z b -> X D
W a ->
W b -> Y D
V c ->
C c -> C
D d -> D
"""

# same grammar with D looping on c instead of d, which makes X C and Y C bisimilar
G2_TEXT = G1_TEXT.replace("D d -> D", "D c -> D")


@pytest.fixture(scope="session")
def g1():
    return parse_grammar(G1_TEXT)


@pytest.fixture(scope="session")
def g2():
    return parse_grammar(G2_TEXT)


@pytest.fixture(scope="session")
def t1(g1):
    return compute_norms(g1)


@pytest.fixture(scope="session")
def t2(g2):
    return compute_norms(g2)


def make_random_grammar(rng: random.Random, max_nts=4, max_ts=3, max_rhs=2, allow_dead=False):
    n = rng.randint(1, max_nts)
    t = rng.randint(1, max_ts)
    nts = list(string.ascii_uppercase[:n])
    ts = list(string.ascii_lowercase[:t])
    dead = set(rng.sample(nts, rng.randint(0, n - 1))) if allow_dead and n > 1 else set()
    triples = []
    for x in nts:
        if x in dead:
            continue
        got = False
        for a in ts:
            if rng.random() < 0.7:
                rhs = tuple(rng.choice(nts) for _ in range(rng.randint(0, max_rhs)))
                triples.append((x, a, rhs))
                got = True
        if not got:
            rhs = tuple(rng.choice(nts) for _ in range(rng.randint(0, max_rhs)))
            triples.append((x, rng.choice(ts), rhs))
    return Grammar(triples, nonterminals=nts, terminals=ts)


def make_random_word(rng: random.Random, g: Grammar, max_len=3):
    return tuple(rng.choice(g.nonterminals) for _ in range(rng.randint(0, max_len)))


@st.composite
def simple_grammars(draw, max_nts=4, max_ts=3, max_rhs=2, allow_dead=False):
    n = draw(st.integers(1, max_nts))
    t = draw(st.integers(1, max_ts))
    nts = list(string.ascii_uppercase[:n])
    ts = list(string.ascii_lowercase[:t])
    triples = []
    for x in nts:
        keep = draw(st.booleans()) if allow_dead else True
        if not keep:
            continue
        got = False
        for a in ts:
            if draw(st.booleans()):
                rhs = tuple(draw(st.lists(st.sampled_from(nts), max_size=max_rhs)))
                triples.append((x, a, rhs))
                got = True
        if not got and keep:
            rhs = tuple(draw(st.lists(st.sampled_from(nts), max_size=max_rhs)))
            triples.append((x, draw(st.sampled_from(ts)), rhs))
    return Grammar(triples, nonterminals=nts, terminals=ts)


@st.composite
def grammar_and_words(draw, max_word=3, **kw):
    g = draw(simple_grammars(**kw))
    left = tuple(draw(st.lists(st.sampled_from(g.nonterminals), max_size=max_word)))
    right = tuple(draw(st.lists(st.sampled_from(g.nonterminals), max_size=max_word)))
    return g, left, right
