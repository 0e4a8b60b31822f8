"""
Radial mode solvers and the constructions built on them.
"""

from pyconic.solvers.base import (
    BaseRadialSolver,
    BoundaryBranchSpec,
    Branch,
    EndExponents,
    ModeSolution,
    SolverSettings,
)
from pyconic.solvers.constructions import (
    SchrodingerSolution,
    fit_power_law,
    green_harmonic,
    harmonic_coordinate_mode,
    negative_part_norm,
    sobolev_threshold,
    solve_mode,
    solve_schrodinger,
)
from pyconic.solvers.finite_difference import FiniteDifferenceSolver
from pyconic.solvers.shooting import ShootingSolver

__all__ = [
    "BaseRadialSolver",
    "BoundaryBranchSpec",
    "Branch",
    "EndExponents",
    "FiniteDifferenceSolver",
    "ModeSolution",
    "SchrodingerSolution",
    "ShootingSolver",
    "SolverSettings",
    "fit_power_law",
    "green_harmonic",
    "harmonic_coordinate_mode",
    "negative_part_norm",
    "sobolev_threshold",
    "solve_mode",
    "solve_schrodinger",
]
