"""Logit dynamics for potential games: exact chains, simulation and metastability."""
from .games import (
    Family,
    GameError,
    GameSpec,
    ising_game,
    or_game,
    potential,
    profile_index,
    index_profile,
    ring_game,
    two_player_coordination,
    utility,
)
from .chain import (
    LogitOperator,
    build_transition_matrix,
    gibbs_distribution,
    logit_kernel,
    logit_operator,
    stationary_distribution,
    tv_distance,
)
from .meta import MetastabilityCertificate, certify_amplified, certify_exact, pseudo_mix_time

__version__ = "0.1.0"
