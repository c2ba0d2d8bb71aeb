"""Refinement metrics and relations for concurrent stochastic games."""

from .corpus import builtin_game, random_game, run_suite
from .game import GameStructure, classify_structure, validate_structure
from .io import load_game, loads_game
from .kernel import (
    alt_bisim_pure,
    alt_sim_pure,
    classical_bisim_kernel,
    compare_relations,
    game_bisim_kernel,
    game_sim_kernel,
)
from .metrics import KINDS, iterate_metric, transship_distance
from .qmu import evaluate, parse_formula, synthesize_witness

__version__ = "0.1.0"

__all__ = [
    "GameStructure",
    "KINDS",
    "alt_bisim_pure",
    "alt_sim_pure",
    "builtin_game",
    "classical_bisim_kernel",
    "classify_structure",
    "compare_relations",
    "evaluate",
    "game_bisim_kernel",
    "game_sim_kernel",
    "iterate_metric",
    "load_game",
    "loads_game",
    "parse_formula",
    "random_game",
    "run_suite",
    "synthesize_witness",
    "transship_distance",
    "validate_structure",
]
