"""
Harmonic and Schrodinger constructions built from single mode solves.
"""

import warnings
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.integrate import simpson

from pyconic.asymptotics import critical_exponents
from pyconic.cone_geometry import RadialMetric
from pyconic.cross_section import unit_sphere_volume
from pyconic.exceptions import ConfigError, SolverError
from pyconic.profiles.base import RadialFunction, as_profile
from pyconic.solvers.base import (
    BaseRadialSolver,
    Branch,
    BoundaryBranchSpec,
    ModeSolution,
    ProfileLike,
    SolverSettings,
    safe_fit,
)
from pyconic.solvers.finite_difference import FiniteDifferenceSolver
from pyconic.utils.fitting import PowerLawFit, fit_branch_coefficient, power_law_fit


def _solver(
    settings: Optional[SolverSettings], solver: Optional[BaseRadialSolver]
) -> BaseRadialSolver:
    if solver is not None:
        return solver
    return FiniteDifferenceSolver(settings=settings)


def solve_mode(
    m: RadialMetric,
    lam: float,
    rhs: ProfileLike = None,
    bc: Optional[BoundaryBranchSpec] = None,
    settings: Optional[SolverSettings] = None,
    solver: Optional[BaseRadialSolver] = None,
    potential: ProfileLike = None,
    j: Optional[int] = None,
) -> ModeSolution:
    """
    Solve Delta_g u - V u = rhs for one mode with the given branch conditions.

    Args:
        m: Background metric
        lam: Cross-section eigenvalue lambda >= 0
        rhs: Right-hand side (0 if None)
        bc: Boundary branches, (regular, decay) if None
        settings: Solver settings used when no solver is given
        solver: Solver instance, a FiniteDifferenceSolver if None
        potential: Potential V (0 if None)
        j: Mode index recorded in the solution

    Returns:
        ModeSolution: Solution with fitted end asymptotics

    Raises:
        CriticalWeightError: If the branches at an end coincide
        SolverError: On non-convergence or a too slowly decaying rhs
    """
    return _solver(settings, solver).solve(m, lam, rhs=rhs, bc=bc, potential=potential, j=j)


def fit_power_law(
    u: RadialFunction,
    window: Optional[Tuple[float, float]] = None,
    offset: float = 0.0,
) -> PowerLawFit:
    """
    Fit log|u - offset| against log r on a window of the samples.

    Args:
        u: Sampled radial function
        window: Inclusive (r_a, r_b) window, the whole grid if None
        offset: Constant subtracted before fitting

    Returns:
        PowerLawFit: Exponent, signed coefficient and residual

    Raises:
        FitError: If the window holds too few samples or u - offset changes sign
    """
    span = u.r[-1] - u.r[0]
    if window is not None and (
        window[0] < u.r[0] - 1e-12 * span or window[1] > u.r[-1] + 1e-12 * span
    ):
        raise ConfigError(
            f"fit window ({window[0]:g}, {window[1]:g}) leaves the grid "
            f"[{u.r[0]:g}, {u.r[-1]:g}]"
        )
    return power_law_fit(u.r, u.values, window=window, offset=offset)


def green_harmonic(
    m: RadialMetric,
    settings: Optional[SolverSettings] = None,
    solver: Optional[BaseRadialSolver] = None,
) -> Tuple[RadialFunction, float]:
    """
    Harmonic function u ~ r^(2-n) at the tip with u -> 1 + A rho^(2-n) at infinity.

    The correction w = u - 1 solves the radial Laplace equation with unit
    coefficient on the singular tip branch and the decaying branch at
    infinity; A is the coefficient of that branch fitted on the outermost
    decade.

    Args:
        m: Metric with a conical tip and an AF end
        settings: Solver settings
        solver: Solver instance

    Returns:
        Tuple[RadialFunction, float]: (u, A)
    """
    bc = BoundaryBranchSpec(Branch.GREEN, Branch.DECAY)
    sol = _solver(settings, solver).solve(m, 0.0, bc=bc, j=0)
    w = sol.solution
    x = w.r - m.tip
    window = (x[-1] / 10.0, x[-1])
    _, A, _ = fit_branch_coefficient(x, w.values, sol.infinity_branches.nu_minus, window)
    u = w.shift(1.0)
    if A <= 0:
        warnings.warn(f"green function coefficient A = {A:.6g} is not positive")
    if np.min(u.values) <= 1.0:
        warnings.warn(f"green function is not above 1 on the grid (min u = {np.min(u.values):.6g})")
    return u, float(A)


def harmonic_coordinate_mode(
    m: RadialMetric,
    settings: Optional[SolverSettings] = None,
    solver: Optional[BaseRadialSolver] = None,
) -> ModeSolution:
    """
    Radial part of a harmonic coordinate: the first nonconstant mode.

    Solved with the regular branch at the tip and unit coefficient on the
    growing branch at infinity. The fitted tip exponent is compared with
    nu_1^+, and the exponent of the remainder u - rho^{nu^+} at infinity
    is recorded in ``info["remainder_exponent"]``.

    Args:
        m: Metric with an AF (or conical) end
        settings: Solver settings
        solver: Solver instance

    Returns:
        ModeSolution: The mode j = 1
    """
    if m.spectral.j_max < 1:
        raise ConfigError("harmonic coordinates need the first nonzero eigenvalue", key="spectrum")
    lam1 = m.spectral.eigenvalue(1)
    bc = BoundaryBranchSpec(Branch.REGULAR, Branch.COORDINATE)
    sol = _solver(settings, solver).solve(m, lam1, bc=bc, j=1)

    x = sol.r - m.tip
    outer = x >= x[-1] / 10.0
    leading = x[outer] ** sol.infinity_branches.nu_plus
    remainder_exp, remainder_coef = safe_fit(x[outer], sol.values[outer] - leading, None)
    expected = critical_exponents(lam1, m.n)[0]
    sol.info.update(
        {
            "remainder_exponent": remainder_exp,
            "remainder_coefficient": remainder_coef,
            "expected_tip_exponent": expected,
            "tip_exponent_error": abs(sol.tip_exponent - expected) / max(abs(expected), 1e-300),
            "tip_limit": float(sol.values[0]),
        }
    )
    return sol


@dataclass
class SchrodingerSolution:
    """
    Positive solution of -Delta_g u + V u = 0 with u -> 1 at infinity.

    Attributes:
        u: The solution with derivatives
        A: Coefficient of rho^(2-n) in u - 1 at infinity
        B: Limit of u at the tip
        potential_nonnegative: Whether V >= 0 on the grid
        tip_limit_at_least_one: Whether B >= 1
        negative_part_norm: L^(n/2) norm of the negative part of V
        negative_part_threshold: Smallness bound the norm was checked against
        condition_estimate: Condition estimate of the discrete operator
        info: Fit diagnostics
    """

    u: RadialFunction
    A: float
    B: float
    potential_nonnegative: bool
    tip_limit_at_least_one: bool
    negative_part_norm: float
    negative_part_threshold: float
    condition_estimate: float
    info: Dict[str, Any] = field(default_factory=dict)

    def as_tuple(self) -> Tuple[RadialFunction, float, float]:
        return self.u, self.A, self.B


def sobolev_threshold(m: RadialMetric) -> float:
    """
    Default smallness bound for the negative part of a potential.

    The sharp Sobolev constant n(n-2)/4 |S^n|^(2/n) of R^n, scaled by
    (vol(N) / |S^(n-1)|)^(2/n) for a cone over N.
    """
    n = m.n
    euclidean = n * (n - 2) / 4.0 * unit_sphere_volume(n + 1) ** (2.0 / n)
    ratio = m.spectral.volume / unit_sphere_volume(n)
    return float(euclidean * ratio ** (2.0 / n))


def negative_part_norm(m: RadialMetric, r: np.ndarray, values: np.ndarray) -> float:
    """
    ||V_-||_{L^(n/2)(g)} by Simpson's rule on a log-spaced grid.

    Args:
        m: Background metric
        r: Log-spaced radii away from the tip
        values: Potential samples on r

    Returns:
        float: The norm of max(-V, 0)
    """
    n = m.n
    negative = np.maximum(-np.asarray(values, dtype=float), 0.0)
    if not np.any(negative):
        return 0.0
    x = m.offset(r)
    psi, _, _ = m.conformal_weight(r)
    dvol = psi ** (n / 2.0) * m.warp(r) ** (n - 1) * x * m.spectral.volume
    integral = simpson(negative ** (n / 2.0) * dvol, x=np.log(x))
    return float(integral ** (2.0 / n))


def solve_schrodinger(
    m: RadialMetric,
    potential: ProfileLike,
    settings: Optional[SolverSettings] = None,
    solver: Optional[BaseRadialSolver] = None,
) -> SchrodingerSolution:
    """
    Solve -Delta_g u + V u = 0 with u regular at the tip and u -> 1 at infinity.

    The correction v = u - 1 solves Delta_g v - V v = V. The negative part
    of V must stay below the smallness bound in L^(n/2) (settings
    negative_part_threshold, sobolev_threshold(m) by default); near
    singularity of the discrete operator is also reported as a SolverError.

    Args:
        m: Background metric
        potential: Radial potential supported in a compact annulus
        settings: Solver settings; the condition estimate is always enabled
        solver: Solver instance

    Returns:
        SchrodingerSolution: u with the constants A and B

    Raises:
        ConfigError: If the potential does not vanish near the tip and infinity
        SolverError: If ||V_-|| reaches the smallness bound, the operator is
            degenerate or u is not positive
    """
    pot = as_profile(potential)
    if solver is None:
        solver = FiniteDifferenceSolver(
            settings=replace(settings or SolverSettings(), check_conditioning=True)
        )
    x = solver.grid_offsets(m)
    r = m.tip + x
    values = np.zeros_like(r) if pot is None else pot(r)
    inner = x <= 10.0 * x[0]
    outer = x >= x[-1] / 10.0
    if np.any(values[inner] != 0) or np.any(values[outer] != 0):
        raise ConfigError(
            "potential must vanish on the innermost and outermost decades", key="potential"
        )
    threshold = solver.settings.negative_part_threshold
    if threshold is None:
        threshold = sobolev_threshold(m)
    neg_norm = negative_part_norm(m, r, values)
    if neg_norm >= threshold:
        raise SolverError(
            f"negative part of the potential is too large: ||V_-|| = {neg_norm:.6g} "
            f">= {threshold:.6g}"
        )

    sol = solver.solve(m, 0.0, rhs=pot, bc=BoundaryBranchSpec(), potential=pot, j=0)
    v = sol.solution
    u = v.shift(1.0)
    if np.min(u.values) <= 0:
        raise SolverError(f"Schrodinger solution is not positive (min u = {np.min(u.values):.3g})")

    x = v.r - m.tip
    lam1 = m.spectral.first_nonzero
    if lam1 is not None:
        head = BaseRadialSolver.mode_problem(m, lam1, x[:1])
        nu1 = BaseRadialSolver.end_exponents(head.c[0], head.d[0]).nu_plus
    else:
        nu1 = 1.0
    b_minus_one, _, inner_res = fit_branch_coefficient(
        x, v.values, nu1, (x[0], 10.0 * x[0]), intercept=True
    )
    _, A, outer_res = fit_branch_coefficient(
        x, v.values, sol.infinity_branches.nu_minus, (x[-1] / 10.0, x[-1])
    )
    B = 1.0 + b_minus_one
    return SchrodingerSolution(
        u=u,
        A=float(A),
        B=float(B),
        potential_nonnegative=bool(np.all(values >= 0)),
        tip_limit_at_least_one=bool(B >= 1.0 - 1e-12),
        negative_part_norm=neg_norm,
        negative_part_threshold=float(threshold),
        condition_estimate=float(sol.info.get("condition_estimate", float("nan"))),
        info={
            "tip_exponent_used": nu1,
            "tip_fit_residual": inner_res,
            "infinity_fit_residual": outer_res,
            "residual": sol.residual,
        },
    )
