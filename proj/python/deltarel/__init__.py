"""Exact and sampled delta-relevance for Boolean formulas.

Probabilities come back as :class:`fractions.Fraction`; variable sets are
one-based, and assignments are bitstrings with x1 leftmost.
"""

import json
from fractions import Fraction

from . import _core
from ._core import ArityMismatch, CapExceeded, ParseError, arity, evaluate, render

__all__ = [
    "ArityMismatch",
    "CapExceeded",
    "ParseError",
    "agreement",
    "arity",
    "evaluate",
    "is_delta_relevant",
    "minimal_relevant_set",
    "probability",
    "relu_layers",
    "render",
    "run",
    "shapley_values",
]


def probability(formula, arity=0):
    return Fraction(_core.probability(formula, arity))


def agreement(formula, x, S, arity=0):
    return Fraction(_core.agreement(formula, x, sorted(S), arity))


def is_delta_relevant(formula, x, S, delta, arity=0):
    return _core.is_delta_relevant(formula, x, sorted(S), str(delta), arity)


def minimal_relevant_set(formula, x, delta, arity=0):
    witness, prob = _core.minimal_relevant_set(formula, x, str(delta), arity)
    return set(witness), Fraction(prob)


def shapley_values(formula, x, arity=0):
    return [Fraction(p) for p in _core.shapley_values(formula, x, arity)]


def relu_layers(formula, arity=0):
    return _core.relu_layers(formula, arity)


def run(*args):
    """Runs a CLI command; returns (exit_code, parsed JSON report)."""
    code, text = _core.run([str(a) for a in args])
    try:
        return code, json.loads(text)
    except json.JSONDecodeError:
        return code, text
