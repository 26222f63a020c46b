"""Bisimilarity of simple grammars and context-free session type equivalence."""

from .congruence import (
    Basis,
    BudgetExceeded,
    CongruenceVerdict,
    check_basis_predicates,
    check_self_bisimulation,
    decide_coinductive,
    decide_inductive,
    parse_basis,
)
from .engine import Decision, decide, decide_words
from .grammar import (
    ContractViolation,
    Grammar,
    GrammarError,
    Word,
    eliminate_dead,
    format_grammar,
    format_word,
    parse_grammar,
    parse_word,
)
from .norms import (
    INF,
    NormTable,
    canonical_word,
    compute_norms,
    descend,
    prune,
    valuation,
)
from .oracle import OracleVerdict, approximant_distinguish, bisim_approx, trace_closure_check
from .session import equivalent, is_contractive, is_terminated, is_type, parse_type, to_grammar

__all__ = [
    "Basis",
    "BudgetExceeded",
    "CongruenceVerdict",
    "ContractViolation",
    "Decision",
    "Grammar",
    "GrammarError",
    "INF",
    "NormTable",
    "OracleVerdict",
    "Word",
    "approximant_distinguish",
    "bisim_approx",
    "canonical_word",
    "check_basis_predicates",
    "check_self_bisimulation",
    "compute_norms",
    "decide",
    "decide_coinductive",
    "decide_inductive",
    "decide_words",
    "descend",
    "eliminate_dead",
    "equivalent",
    "format_grammar",
    "format_word",
    "is_contractive",
    "is_terminated",
    "is_type",
    "parse_basis",
    "parse_grammar",
    "parse_type",
    "parse_word",
    "prune",
    "to_grammar",
    "valuation",
]
