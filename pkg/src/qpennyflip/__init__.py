"""Quantum penny flip game with a coevolutionary genetic algorithm."""
from .evolve import GaConfig, Population, run_evolution
from .experiments import SCENARIOS, BatchResult, Category, run_batch, scenario
from .game import GameOutcome, GameProfile, play, play_trace
from .qmat import DensityMatrix, InvalidStateError, Unitary2
from .strategy import (ClassicalMixed, MixedTwoUnitary, PureQuantum, StrategyParams,
                       make_unitary, named_operator, unitary_matrix)
from .verify import certify_ne, check_oracle_agreement, cyclic_dominance_table, oracle_trace

__all__ = [
    "GaConfig", "Population", "run_evolution",
    "SCENARIOS", "BatchResult", "Category", "run_batch", "scenario",
    "GameOutcome", "GameProfile", "play", "play_trace",
    "DensityMatrix", "InvalidStateError", "Unitary2",
    "ClassicalMixed", "MixedTwoUnitary", "PureQuantum", "StrategyParams",
    "make_unitary", "named_operator", "unitary_matrix",
    "certify_ne", "check_oracle_agreement", "cyclic_dominance_table", "oracle_trace",
]
