"""
Shooting solver for the radial mode equation.

Used as an independent oracle for the finite-difference solver: two
initial-value integrations from the inner end are superposed to satisfy
the outer branch condition.
"""

from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from pyconic.cone_geometry import RadialMetric
from pyconic.exceptions import SolverError
from pyconic.profiles.base import BaseProfile, as_profile
from pyconic.solvers.base import (
    BaseRadialSolver,
    BoundaryBranchSpec,
    ModeSolution,
    ProfileLike,
    SolverSettings,
)


class ShootingSolver(BaseRadialSolver):
    """
    Integrate the mode equation in t = log(r - tip) with scipy's DOP853.

    Args:
        settings: Truncation settings (the grid density only sets output nodes)
        rtol: Relative tolerance of the integrator
        atol: Absolute tolerance of the integrator
        verbose: Whether to print progress information
    """

    def __init__(
        self,
        settings: Optional[SolverSettings] = None,
        rtol: float = 1e-12,
        atol: float = 1e-14,
        verbose: bool = False,
    ):
        super().__init__(settings=settings, verbose=verbose)
        self.rtol = rtol
        self.atol = atol

    def solve(
        self,
        metric: RadialMetric,
        eigenvalue: float,
        rhs: ProfileLike = None,
        bc: Optional[BoundaryBranchSpec] = None,
        potential: ProfileLike = None,
        j: Optional[int] = None,
    ) -> ModeSolution:
        bc = bc or BoundaryBranchSpec()
        rhs_p = as_profile(rhs)
        pot_p = as_profile(potential)
        x = self.grid_offsets(metric)
        problem = self.mode_problem(metric, eigenvalue, x, rhs_p, pot_p)
        tip = self.end_exponents(problem.c[0], problem.d[0])
        inf = self.end_exponents(problem.c[-1], problem.d[-1])
        left, right = self.robin_data(bc, x[0], tip, x[-1], inf)

        t = problem.t
        kind, nu, g = left
        if kind == "dirichlet":
            particular0, homogeneous0 = (g, 0.0), (0.0, 1.0)
        else:
            particular0, homogeneous0 = (0.0, g), (1.0, nu)

        p, p_t, nfev_p = self._integrate(metric, eigenvalue, t, particular0, rhs_p, pot_p)
        h, h_t, nfev_h = self._integrate(metric, eigenvalue, t, homogeneous0, None, pot_p)

        kind, nu, g = right
        if kind == "dirichlet":
            denom = h[-1]
            alpha = (g - p[-1]) / denom if denom != 0 else np.nan
        else:
            denom = h_t[-1] - nu * h[-1]
            alpha = (g - p_t[-1] + nu * p[-1]) / denom if denom != 0 else np.nan
        if not np.isfinite(alpha):
            raise SolverError("shooting failed: homogeneous solution satisfies both ends")
        u = p + alpha * h
        u_t = p_t + alpha * h_t

        if self.verbose:
            print(f"shooting lambda={eigenvalue:g}: {nfev_p + nfev_h} evaluations")
        info: Dict[str, Any] = {"nfev": nfev_p + nfev_h, "method": "DOP853"}
        return self.build_solution(problem, u, u_t, eigenvalue, bc, tip, inf, self.rtol, j, info)

    def _integrate(
        self,
        metric: RadialMetric,
        eigenvalue: float,
        t: np.ndarray,
        y0: Tuple[float, float],
        rhs: Optional[BaseProfile],
        potential: Optional[BaseProfile],
    ) -> Tuple[np.ndarray, np.ndarray, int]:
        def field(tt: float, y: np.ndarray) -> np.ndarray:
            x = np.array([np.exp(tt)])
            pb = self.mode_problem(metric, eigenvalue, x, rhs, potential)
            return np.array([y[1], pb.s[0] + pb.d[0] * y[0] - pb.c[0] * y[1]])

        sol = solve_ivp(
            field,
            (t[0], t[-1]),
            np.array(y0, dtype=float),
            method="DOP853",
            t_eval=t,
            rtol=self.rtol,
            atol=self.atol,
        )
        if not sol.success:
            raise SolverError(f"shooting integration failed: {sol.message}")
        return sol.y[0], sol.y[1], int(sol.nfev)
