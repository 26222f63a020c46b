import random

import pytest

from grambisim import ContractViolation, compute_norms, valuation
from grambisim.session import (
    ExtChoice,
    In,
    IntChoice,
    Out,
    Rec,
    Seq,
    Skip,
    TypeSyntaxError,
    Var,
    equivalent,
    format_type,
    free_vars,
    is_contractive,
    is_terminated,
    is_type,
    parse_type,
    size,
    substitute,
    to_grammar,
    unfold,
)

QUERY = "?int ; !bool"
PINGPONG = "rec x . ?int ; !bool ; x"
MATH = "rec x . &{add: ?int ; ?int ; !int ; x, isprime: ?int ; !bool ; x, quit: skip}"
TREE = "rec x . &{leaf: skip, node: x ; ?int ; x}"

EXAMPLES = [QUERY, PINGPONG, MATH, TREE]


def test_parse_query():
    assert parse_type(QUERY) == Seq(In("int"), Out("bool"))


def test_parse_skip():
    assert parse_type("skip") == Skip()


def test_parse_tree_type():
    t = parse_type(TREE)
    assert t == Rec("x", ExtChoice((("leaf", Skip()), ("node", Seq(Var("x"), Seq(In("int"), Var("x")))))))


def test_parse_rec_extends_right():
    t = parse_type("rec x . skip ; x")
    assert t == Rec("x", Seq(Skip(), Var("x")))


def test_parse_reports_position():
    with pytest.raises(TypeSyntaxError):
        parse_type("?int ;")
    with pytest.raises(TypeSyntaxError):
        parse_type("+{a: skip,}")


def test_parse_format_roundtrip():
    for text in EXAMPLES:
        t = parse_type(text)
        assert parse_type(format_type(t)) == t


def test_terminated_examples():
    assert is_terminated(Seq(Skip(), Skip()))
    assert not is_terminated(Seq(Skip(), In("int")))
    assert is_terminated(Rec("x", Seq(Skip(), Rec("y", Skip()))))
    assert not is_terminated(Var("x"))


def test_contractive_examples():
    assert is_contractive(Rec("x", Seq(In("int"), Var("x"))))
    assert not is_contractive(Rec("x", Seq(Skip(), Var("x"))))
    assert is_contractive(In("int"))
    assert not is_contractive(Rec("x", Var("x")))


def test_formation_examples():
    assert not is_type(Seq(In("int"), Rec("x", Rec("y", Var("x")))))
    assert is_type(parse_type(MATH))
    assert is_type(Var("x"), frozenset({"x"}))
    assert not is_type(Var("x"))
    for text in EXAMPLES:
        assert is_type(parse_type(text))


def test_size_examples():
    assert size(In("int")) == 1
    assert size(Skip()) == 1
    assert size(parse_type(QUERY)) == 3
    assert size(parse_type(TREE)) == 1 + 1 + 1 + (1 + 1 + (1 + 1 + 1))


def test_empty_choice_is_well_formed():
    bottom = IntChoice(())
    assert is_type(bottom)
    g, [w] = to_grammar([bottom])
    assert len(w) == 1
    assert g.successors(w[0]) == []


def test_word_of_skip_is_empty():
    g, [w] = to_grammar([parse_type("skip")])
    assert w == ()


def test_word_of_query():
    g, [w] = to_grammar([parse_type(QUERY)])
    assert len(w) == 2
    first, second = w
    assert g.successors(first) == [("?int", ())]
    assert g.successors(second) == [("!bool", ())]


def test_word_of_pingpong():
    from grambisim.oracle import trace_closure_check

    g, [w] = to_grammar([parse_type(PINGPONG)])
    assert len(w) == 1
    (label, rhs), = g.successors(w[0])
    assert label == "?int"
    assert len(rhs) == 2 and rhs[1] == w[0]
    assert g.successors(rhs[0]) == [("!bool", ())]
    # unfolding the loop once is indistinguishable from the loop itself
    g2, [w1, w2] = to_grammar([parse_type(PINGPONG), parse_type(f"?int ; !bool ; {PINGPONG}")])
    assert trace_closure_check(g2, w1, w2, 16).outcome == "yes"


def test_to_grammar_rejects_ill_formed():
    with pytest.raises(ContractViolation):
        to_grammar([Var("x")])
    with pytest.raises(ContractViolation):
        to_grammar([Rec("x", Var("x"))])


def test_conversion_is_deterministic():
    t = parse_type(MATH)
    g1, w1 = to_grammar([t, t])
    g2, w2 = to_grammar([t, t])
    assert w1 == w2
    assert g1.productions == g2.productions
    # the two copies use disjoint nonterminal pools
    assert not set(w1[0]) & set(w1[1])


def test_substitution_is_capture_avoiding():
    t = Rec("y", Seq(In("int"), Seq(Var("x"), Var("y"))))
    out = substitute(t, "x", Var("y"))
    assert isinstance(out, Rec)
    assert out.var != "y"
    assert "y" in free_vars(out)


def test_equivalent_reflexive():
    q = parse_type(QUERY)
    assert equivalent(q, q)


def test_equivalent_examples():
    assert equivalent(parse_type("skip ; ?int"), parse_type("?int"))
    assert not equivalent(parse_type("?int"), parse_type("!int"))
    assert not equivalent(parse_type("+{a: skip}"), parse_type("&{a: skip}"))
    assert equivalent(parse_type(TREE), parse_type("rec y . &{node: y ; ?int ; y, leaf: skip}"))
    assert not equivalent(parse_type(TREE), parse_type("rec x . &{leaf: skip, branch: x ; ?int ; x}"))


# -- random well-formed types ------------------------------------------------

MESSAGES = ["int", "bool"]
LABELS = ["a", "b", "c"]


def random_type(rng: random.Random, budget: int, bound=()):
    choices = ["in", "out", "skip", "seq", "choice", "rec"]
    if bound:
        choices.append("var")
    kind = rng.choice(choices if budget > 1 else ["in", "out", "skip"] + (["var"] if bound else []))
    if kind == "in":
        return In(rng.choice(MESSAGES))
    if kind == "out":
        return Out(rng.choice(MESSAGES))
    if kind == "skip":
        return Skip()
    if kind == "var":
        return Var(rng.choice(bound))
    if kind == "seq":
        return Seq(random_type(rng, budget // 2, bound), random_type(rng, budget // 2, bound))
    if kind == "choice":
        cls = IntChoice if rng.random() < 0.5 else ExtChoice
        k = rng.randint(1, min(3, budget))
        labels = rng.sample(LABELS, k)
        return cls(tuple((l, random_type(rng, budget // k, bound)) for l in labels))
    name = f"x{len(bound)}"
    return Rec(name, random_type(rng, budget - 1, bound + (name,)))


def well_formed_types(seed, count, budget=12):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        t = random_type(rng, budget)
        if is_type(t):
            out.append(t)
    return out


def test_conversion_bounds_hold_on_random_types():
    for t in well_formed_types(2024, 500):
        g, [w] = to_grammar([t])
        table = compute_norms(g)
        bound = size(t)
        assert len(g.nonterminals) <= bound
        assert g.degree <= bound
        assert table.seminorm(w) <= bound
        assert valuation(table, g) <= bound


def test_neutral_element_laws():
    for t in well_formed_types(7, 100, budget=8):
        assert equivalent(Seq(Skip(), t), t)
        assert equivalent(Seq(t, Skip()), t)


def test_associativity_law():
    types = well_formed_types(8, 300, budget=5)
    for t, u, v in zip(types[0::3], types[1::3], types[2::3]):
        assert equivalent(Seq(Seq(t, u), v), Seq(t, Seq(u, v)))


def test_distributivity_laws():
    types = well_formed_types(9, 200, budget=5)
    for t, u in zip(types[0::2], types[1::2]):
        for cls in (IntChoice, ExtChoice):
            lhs = Seq(cls((("l", t), ("r", t))), u)
            rhs = cls((("l", Seq(t, u)), ("r", Seq(t, u))))
            assert equivalent(lhs, rhs)


def test_unfolding_law():
    done = 0
    for t in well_formed_types(10, 600, budget=8):
        recs = [u for u in _subterms(t) if isinstance(u, Rec) and is_type(u)]
        for r in recs[:1]:
            assert equivalent(r, unfold(r))
            done += 1
    assert done >= 100


def _subterms(t):
    yield t
    if isinstance(t, Seq):
        yield from _subterms(t.first)
        yield from _subterms(t.second)
    elif isinstance(t, (IntChoice, ExtChoice)):
        for _, u in t.branches:
            yield from _subterms(u)
    elif isinstance(t, Rec):
        yield from _subterms(t.body)


def test_terminated_types_equal_skip():
    checked = 0
    for t in well_formed_types(11, 200, budget=6):
        if is_terminated(t):
            assert equivalent(t, Skip())
            checked += 1
    assert checked > 3


def test_equivalence_relation_spot_checks():
    types = well_formed_types(12, 60, budget=6)
    for t in types[:20]:
        assert equivalent(t, t)
    seen = []
    for t in types:
        for u in seen[:5]:
            assert equivalent(t, u) == equivalent(u, t)
        seen.append(t)
    related = [(t, u) for t in types[:12] for u in types[:12] if equivalent(t, u)]
    for t, u in related:
        for v, w in related:
            if u == v:
                assert equivalent(t, w)
