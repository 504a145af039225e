from .model import ShsModel, Transition
from .validate import validate, is_valid
from .solver import (AgeSolution, StationaryDist, SystemMatrices, assemble, check_stability,
                     solve_age, stationary, fixed_point_residual)
from .transient import Trajectory, transient
from .reference import KINDS, build_reference_model

__all__ = [
    "ShsModel", "Transition", "validate", "is_valid", "AgeSolution", "StationaryDist",
    "SystemMatrices", "assemble", "check_stability", "solve_age", "stationary",
    "fixed_point_residual", "Trajectory", "transient", "KINDS", "build_reference_model",
]
