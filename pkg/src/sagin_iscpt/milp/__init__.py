"""Mixed-integer linear models, exact branch-and-bound, MPS I/O."""

from .model import (BINARY, CONTINUOUS, Constraint, LpResult, MilpModel, MilpSolution,
                    ModelError, Status, Variable)
from .mps import MpsFormatError, NameCollision, export_mps, import_mps
from .solve import (DEFAULT_NODE_LIMIT, FEAS_TOL, INT_TOL, Infeasible, Unbounded,
                    solve_bnb, solve_lp_relaxation)

__all__ = [
    "BINARY", "CONTINUOUS", "Constraint", "LpResult", "MilpModel", "MilpSolution",
    "ModelError", "Status", "Variable", "MpsFormatError", "NameCollision", "export_mps",
    "import_mps", "DEFAULT_NODE_LIMIT", "FEAS_TOL", "INT_TOL", "Infeasible", "Unbounded",
    "solve_bnb", "solve_lp_relaxation",
]
