"""Nonnegativity of finite element schemes for fractional-in-time diffusion.

The package builds the three spatial discretizations (standard Galerkin,
mass lumping, finite volume element) on triangular meshes, evaluates the
time-fractional solution operator through contour quadrature, and locates
the times / step sizes where the discrete solutions stop dipping negative.
"""

from .errors import FracposError, NumericalError, UsageError
from .fem import METHODS, build_fem_system, system_from_matrices
from .fullydiscrete import (
    fd_positivity_threshold,
    fd_solution_matrix,
    first_step_positivity_omega,
    step_solution,
)
from .kernel import FracOperator, cq_weights, mittag_leffler, u_lambda
from .mesh import (
    bundled_mesh,
    bundled_mesh_names,
    gen_crossed_rectangles,
    gen_equilateral_rhombus,
    gen_sliver_square,
    gen_uniform_square,
    load_triangle_format,
)
from .semidiscrete import positivity_threshold, solution_matrix

__version__ = "0.1.0"

__all__ = [
    "FracposError",
    "UsageError",
    "NumericalError",
    "FracOperator",
    "u_lambda",
    "mittag_leffler",
    "cq_weights",
    "METHODS",
    "build_fem_system",
    "system_from_matrices",
    "gen_uniform_square",
    "gen_crossed_rectangles",
    "gen_sliver_square",
    "gen_equilateral_rhombus",
    "load_triangle_format",
    "bundled_mesh",
    "bundled_mesh_names",
    "solution_matrix",
    "positivity_threshold",
    "fd_solution_matrix",
    "step_solution",
    "fd_positivity_threshold",
    "first_step_positivity_omega",
    "__version__",
]
