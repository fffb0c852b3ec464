"""Constructive Bezout solvers for slice regular functions on the quaternionic ball.

Modules: ``quat`` (quaternions), ``series`` (truncated power series),
``slice_regular`` (star calculus and splitting), ``wirtinger`` (expressions
with exact Wirtinger derivatives, polar grids), ``cauchy`` (solid Cauchy
transform), ``corona_disk`` / ``corona_ball`` (the solvers), ``sympoly``
(exact identity checks) and ``cli``.
"""
from .config import FitConfig, GridConfig, RunConfig, Tolerances
from .corona_ball import BallSolution, solve_ball, solve_one_generator, verify_ball_bezout
from .corona_disk import (
    CoronaViolation,
    DegenerateDelta,
    DiskCoronaProblem,
    HoloSolution,
    SmoothSolution,
    assemble_holomorphic,
    build_smooth_solution,
    c_delta_n,
    solve_disk,
    solve_n1_closed_form,
)
from .problems import BallCoronaProblem, gen_random_problem, load_problem, save_problem
from .quat import ImUnit, Quaternion
from .series import CSeries, QSeries
from .slice_regular import split, star_inverse, star_product, star_product_pointwise
from .sympoly import SymPoly, sp_expand_normalize
from .wirtinger import DiskGrid, GridFn

__version__ = "0.1.0"

__all__ = [
    "BallCoronaProblem",
    "BallSolution",
    "CSeries",
    "CoronaViolation",
    "DegenerateDelta",
    "DiskCoronaProblem",
    "DiskGrid",
    "FitConfig",
    "GridConfig",
    "GridFn",
    "HoloSolution",
    "ImUnit",
    "QSeries",
    "Quaternion",
    "RunConfig",
    "SmoothSolution",
    "SymPoly",
    "Tolerances",
    "assemble_holomorphic",
    "build_smooth_solution",
    "c_delta_n",
    "gen_random_problem",
    "load_problem",
    "save_problem",
    "solve_ball",
    "solve_disk",
    "solve_n1_closed_form",
    "solve_one_generator",
    "sp_expand_normalize",
    "split",
    "star_inverse",
    "star_product",
    "star_product_pointwise",
    "verify_ball_bezout",
]
