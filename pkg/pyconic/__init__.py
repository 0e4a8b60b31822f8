from .analysis import BlowUpAnalysis
from .asymptotics import ExponentCatalog, WeightPair, critical_exponents, weighted_norm
from .cone_geometry import (
    RadialMetric,
    cone_metric,
    flat_metric,
    glued_metric,
    horn_metric,
    neg_schwarzschild_metric,
    schwarzschild_metric,
)
from .conformal import blow_up, conformal_metric, select_cut_slice
from .cross_section import SpectralData, sphere_spectrum
from .exceptions import ConfigError, FitError, InvariantViolation, SolverError
from .mass import adm_flux, adm_mass, mass_shift_experiment
from .solvers import (
    FiniteDifferenceSolver,
    ShootingSolver,
    SolverSettings,
    green_harmonic,
    harmonic_coordinate_mode,
    solve_mode,
    solve_schrodinger,
)

__version__ = "0.1.0"

__all__ = [
    "BlowUpAnalysis",
    "ConfigError",
    "ExponentCatalog",
    "FiniteDifferenceSolver",
    "FitError",
    "InvariantViolation",
    "RadialMetric",
    "ShootingSolver",
    "SolverError",
    "SolverSettings",
    "SpectralData",
    "WeightPair",
    "adm_flux",
    "adm_mass",
    "blow_up",
    "cone_metric",
    "conformal_metric",
    "critical_exponents",
    "flat_metric",
    "glued_metric",
    "green_harmonic",
    "harmonic_coordinate_mode",
    "horn_metric",
    "mass_shift_experiment",
    "neg_schwarzschild_metric",
    "schwarzschild_metric",
    "select_cut_slice",
    "solve_mode",
    "solve_schrodinger",
    "sphere_spectrum",
    "weighted_norm",
]
