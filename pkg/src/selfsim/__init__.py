"""Exact computations for automaton groups acting on rooted trees and for the
lamplighter groups ``Z_k wr Z``."""
from __future__ import annotations

from .mealy import MealyMachine, StateWord, act, word_is_identity

__version__ = "0.1.0"

__all__ = ["MealyMachine", "StateWord", "act", "word_is_identity", "__version__"]
