"""Exact game-theoretic solutions of baccara chemin de fer.

Six models are covered: cards dealt with replacement (A) or from a
d-deck shoe (B), crossed with three levels of Banker information about
Player's hand (1 totals only, 2 Banker sees his own composition, 3 both
players see compositions).
"""

from .game_core import InfoModel, Model, Shoe, WithReplacement
from .solver import GameSolution, solve_model

__all__ = ["InfoModel", "Model", "Shoe", "WithReplacement", "GameSolution", "solve_model"]
__version__ = "0.1.0"
