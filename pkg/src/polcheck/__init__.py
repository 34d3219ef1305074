"""Model checking for public observation logic over epistemic expectation models."""

from .automata import Dfa, Nfa, canonical, determinize, lang_equal, minimize, thompson
from .engines import Verdict, check, eval_brute, eval_brute_bounds, mc_full, mc_sfe, mc_word
from .errors import (FragmentMismatch, Inconclusive, KTooLarge, ModelError, ParseError, PolError,
                     UnknownAgent, UnknownProp, UnknownSymbol, UnknownWorld)
from .logic import classify, parse_formula, parse_obs, to_nnf
from .model import ExpectationModel, load_model, survives, update, update_letter, validate
from .obsexpr import Alphabet
from .satenc import check_via_sat

__all__ = [
    "Alphabet", "Dfa", "ExpectationModel", "FragmentMismatch", "Inconclusive", "KTooLarge",
    "ModelError", "Nfa", "ParseError", "PolError", "UnknownAgent", "UnknownProp", "UnknownSymbol",
    "UnknownWorld", "Verdict", "canonical", "check", "check_via_sat", "classify", "determinize",
    "eval_brute", "eval_brute_bounds", "lang_equal", "load_model", "mc_full", "mc_sfe", "mc_word",
    "minimize", "parse_formula", "parse_obs", "survives", "thompson", "to_nnf", "update",
    "update_letter", "validate",
]
