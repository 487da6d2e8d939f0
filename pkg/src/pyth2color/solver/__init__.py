from .engine import ModelError, SolveResult, SolveStats, Solver, Verdict, check_model, solve
from .external import ExternalSolverError, solve_external

__all__ = [
    "ExternalSolverError",
    "ModelError",
    "SolveResult",
    "SolveStats",
    "Solver",
    "Verdict",
    "check_model",
    "solve",
    "solve_external",
]
