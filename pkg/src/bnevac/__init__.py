"""Agent-based pedestrian evacuation with Shortest Route, Random Follow and
Bayesian Nash Equilibrium movement policies."""

from .behaviors import BNE, RF, SR, AgentState
from .engine import SimConfig, World, advance_tick, initialize, run_to_completion, snapshot
from .grid import GridSpec, PatchField
from .metrics import RunRecord
from .utilities import BnePredictionParams, comfort_utility, expected_comfort, speed_from_density

__version__ = "0.1.0"
