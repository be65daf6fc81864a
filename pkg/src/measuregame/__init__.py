"""Martin's measure game on Cantor space, in exact rational arithmetic."""

from .borel_cantelli import (EventFamily, bc_convergence_strategy, bc_divergence_blocks,
                             bc_divergence_strategy, check_mutual_independence, choose_side,
                             liminf_surrogate, min_index_bound, rl_strategy)
from .certify import IIWitness, IWitness, extract_scaled_measure, extract_tree
from .fubini import fub1_transform, fub2_transform, fubini_check
from .game import MoveI, MoveII, Position, Resign, Strategy, referee, replay_trace, validate_move
from .measure import Bernoulli, Explicit, Fair, Product, bernoulli, fair
from .minimax import grid_minimax
from .rational import simplest_between
from .scaled import ScaledMeasure, prune_scaled_measure, validate_scaled_measure
from .sets import Clopen, ClosedTree, LimSup, OpenUnion
from .strategies import decide_by_measure, strategy_I_from_closed, strategy_II_from_open
from .transforms import intersect_strategies, rationalize_strategy, swap_strategy
from .unfolding import (PairTree, project_strategy_II, stabilize, unfold_strategy_I,
                        uniformize)

__all__ = [
    "Bernoulli", "Clopen", "ClosedTree", "EventFamily", "Explicit", "Fair", "IIWitness", "IWitness",
    "LimSup", "MoveI", "MoveII", "OpenUnion", "PairTree", "Position", "Product", "Resign",
    "ScaledMeasure", "Strategy", "bc_convergence_strategy", "bc_divergence_blocks",
    "bc_divergence_strategy", "bernoulli", "check_mutual_independence", "choose_side",
    "decide_by_measure", "extract_scaled_measure", "extract_tree", "fair", "fub1_transform",
    "fub2_transform", "fubini_check", "grid_minimax", "intersect_strategies", "liminf_surrogate",
    "min_index_bound", "project_strategy_II", "prune_scaled_measure", "rationalize_strategy",
    "referee", "replay_trace", "rl_strategy", "simplest_between", "stabilize",
    "strategy_I_from_closed", "strategy_II_from_open", "swap_strategy", "unfold_strategy_I",
    "uniformize", "validate_move", "validate_scaled_measure",
]
