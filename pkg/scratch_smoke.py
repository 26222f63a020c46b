import json

import grambisim as gb
from grambisim.oracle import approximant_distinguish, trace_closure_check

G1 = """%simple
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

g = gb.parse_grammar(G1)
dec, g2, t2, pair = gb.decide_words(g, gb.parse_word("X C"), gb.parse_word("Y C"))
print("#phases", len(dec.phases))
print("PHASE 1:")
print(json.dumps(dec.phases[0], indent=0).replace("\n", ""))
print("FINAL:")
print(json.dumps(dec.root.to_dict(), indent=0).replace("\n", ""))

print("approx G1:", approximant_distinguish(g, ("X", "C"), ("Y", "C"), 10))
print("closure G1:", trace_closure_check(g, ("X", "C"), ("Y", "C"), 8))

G2 = G1.replace("D d -> D", "D c -> D")
gg = gb.parse_grammar(G2)
print("approx G2:", approximant_distinguish(gg, ("X", "C"), ("Y", "C"), 25))
print("closure G2:", trace_closure_check(gg, ("X", "C"), ("Y", "C"), 8))

# appendix congruence separations
ga = gb.Grammar([], nonterminals=["X", "Y", "Z", "W"])
ta = gb.compute_norms(ga)
b1 = gb.Basis([(("X",), ("Y", "W", "Y", "Z")), (("Z",), ("W", "X"))])
print("coind X ~ YZ:", gb.decide_coinductive(b1, ta, ("X",), ("Y", "Z")).congruent)
print("ind   X ~ YZ:", gb.decide_inductive(b1, ta, ("X",), ("Y", "Z")).congruent)
b2 = gb.Basis([(("X",), ("Y",)), (("Y",), ("Z",))])
print("coind X ~ Z:", gb.decide_coinductive(b2, ta, ("X",), ("Z",)).congruent)

# run examples
print("run X a:", gb.format_word(g.run(("X",), ("a",))))
print("run XC bbc:", gb.format_word(g.run(("X", "C"), ("b", "b", "c"))))
print("transitions XC:", [(a, gb.format_word(w)) for a, w in g.transitions(("X", "C"))])
t1 = gb.compute_norms(g)
print("prune ZCC:", gb.format_word(gb.prune(t1, ("Z", "C", "C"))))
print("canon X:", gb.canonical_word(t1, "X"), "canon Z:", gb.canonical_word(t1, "Z"), "canon V:", gb.canonical_word(t1, "V"))
print("descend XC 1:", gb.format_word(gb.descend(t1, ("X", "C"), 1)))
print("valuation G1:", gb.valuation(t1, g))
