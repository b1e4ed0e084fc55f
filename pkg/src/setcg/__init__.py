"""Nonlinear conjugate gradient methods for set optimization problems.

The objective is a finite family of smooth vector functions compared with
the lower set less order induced by a closed convex pointed cone.
"""
from .cg import BetaRule, CGParams, SolveResult, Status, solve
from .cone import ConeVariant, OrderingCone
from .linesearch import LineSearchParams, WolfeVariant, wolfe_search
from .minimal import enumerate_partition, minimal_elements
from .problem import SetValuedProblem, VectorFunction
from .problems import PROBLEM_NAMES, builtin_problem
from .subproblem import compute_direction, min_norm_point

__version__ = "0.1.0"

__all__ = [
    "BetaRule", "CGParams", "ConeVariant", "LineSearchParams", "OrderingCone",
    "PROBLEM_NAMES", "SetValuedProblem", "SolveResult", "Status", "VectorFunction",
    "WolfeVariant", "builtin_problem", "compute_direction", "enumerate_partition",
    "min_norm_point", "minimal_elements", "solve", "wolfe_search",
]
