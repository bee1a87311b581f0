"""Lifted-state algebra, fan subsolutions and Young-measure audits for the
two-dimensional isentropic Euler system with p(rho) = rho^2."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import ConfigurationError, DomainError, RangeError
from .fan_construction import (FanPartition, FanSubsolution, admissible_c1_interval,
                               baseline_family, check_conditions, overlap_wedge,
                               perturbed_family, search_pairs, separation_holds)
from .lifted_algebra import (LiftedState, State, capital_matrix, det_factored, lift,
                             wave_cone_connected, wave_cone_member, wave_direction)

__all__ = [
    "BACKEND", "ConfigurationError", "DomainError", "RangeError",
    "FanPartition", "FanSubsolution", "admissible_c1_interval", "baseline_family",
    "check_conditions", "overlap_wedge", "perturbed_family", "search_pairs",
    "separation_holds", "LiftedState", "State", "capital_matrix", "det_factored",
    "lift", "wave_cone_connected", "wave_cone_member", "wave_direction",
]
