"""Workbench for local universal first-order sentences over linear orders."""

from .logic import (
    Metrics, Sentence, Signature, compute_metrics, generate_Cn, term_complexity,
)
from .parser import ParseError, parse_formula, parse_sentence
from .printer import print_formula, print_sentence
from .structures import (
    ClosureTrace, FiniteStructure, closure, dump_structure, eval_sentence,
    generated_substructure, load_structure, make_structure,
)

__all__ = [
    "ClosureTrace", "FiniteStructure", "Metrics", "ParseError", "Sentence", "Signature",
    "closure", "compute_metrics", "dump_structure", "eval_sentence", "generate_Cn",
    "generated_substructure", "load_structure", "make_structure", "parse_formula",
    "parse_sentence", "print_formula", "print_sentence", "term_complexity",
]
