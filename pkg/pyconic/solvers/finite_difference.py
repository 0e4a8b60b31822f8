"""
Finite-difference radial solver on a logarithmic grid.
"""

from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.linalg import solve_banded
from scipy.sparse import diags
from scipy.sparse.linalg import LinearOperator, onenormest, splu

from pyconic.cone_geometry import RadialMetric
from pyconic.exceptions import SolverError
from pyconic.profiles.base import as_profile
from pyconic.solvers.base import (
    BaseRadialSolver,
    BoundaryBranchSpec,
    EndExponents,
    ModeProblem,
    ModeSolution,
    ProfileLike,
    safe_fit,
)

Boundary = Tuple[str, float, float]


class FiniteDifferenceSolver(BaseRadialSolver):
    """
    Second-order finite differences in t = log(r - tip) with Richardson extrapolation.

    The selected asymptotic branch at each end is imposed through an
    inhomogeneous Robin condition eliminated with a ghost point. The system
    is solved at two resolutions and combined at the coarse nodes, which
    removes the O(h^2) error.

    Args:
        settings: Truncation and resolution settings
        verbose: Whether to print progress information
    """

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

        coarse = self.mode_problem(metric, eigenvalue, self.grid_offsets(metric), rhs_p, pot_p)
        tip = self.end_exponents(coarse.c[0], coarse.d[0])
        inf = self.end_exponents(coarse.c[-1], coarse.d[-1])
        left, right = self.robin_data(bc, coarse.x[0], tip, coarse.x[-1], inf)
        self._check_rhs_decay(coarse, bc, tip, inf)
        nu_ref = self.reference_exponent(bc, tip, coarse.x)

        if self.verbose:
            print(
                f"mode lambda={eigenvalue:g}: tip branches ({tip.nu_plus:.6g}, {tip.nu_minus:.6g}), "
                f"infinity branches ({inf.nu_plus:.6g}, {inf.nu_minus:.6g}), {coarse.x.size} nodes"
            )

        u_c, ut_c, res_c, cond_c = self._solve_problem(coarse, left, right, nu_ref)
        info: Dict[str, Any] = {"nodes": int(coarse.x.size), "nu_reference": nu_ref}
        if self.settings.richardson:
            fine_x = self.grid_offsets(metric, refine=2)
            if fine_x.size != 2 * coarse.x.size - 1:
                raise SolverError("fine grid does not nest the coarse grid")
            fine = self.mode_problem(metric, eigenvalue, fine_x, rhs_p, pot_p)
            u_f, ut_f, res_f, cond_f = self._solve_problem(fine, left, right, nu_ref)
            u = u_f[::2] + (u_f[::2] - u_c) / 3.0
            u_t = ut_f[::2] + (ut_f[::2] - ut_c) / 3.0
            residual = max(res_c, res_f)
            info["richardson_correction"] = float(
                np.max(np.abs(u_f[::2] - u_c)) / max(np.max(np.abs(u)), 1e-300)
            )
            cond = max(cond_c, cond_f)
        else:
            u, u_t, residual, cond = u_c, ut_c, res_c, cond_c
        info["condition_estimate"] = cond

        if residual > self.settings.tolerance:
            raise SolverError(
                f"discrete residual {residual:.3g} exceeds tolerance {self.settings.tolerance:g}"
            )
        if cond > self.settings.degeneracy_threshold:
            raise SolverError(
                f"operator is nearly singular (condition estimate {cond:.3g}); "
                "the homogeneous problem has a near-solution"
            )
        if not np.all(np.isfinite(u)):
            raise SolverError("radial solve produced non-finite values")

        return self.build_solution(coarse, u, u_t, eigenvalue, bc, tip, inf, residual, j, info)

    def _check_rhs_decay(
        self, problem: ModeProblem, bc: BoundaryBranchSpec, tip: EndExponents, inf: EndExponents
    ) -> None:
        """Reject forcing that grows into the branch excluded at a Robin end."""
        x, s = problem.x, problem.s
        if bc.infinity != "dirichlet":
            outer = x >= x[-1] / 10.0
            if np.all(s[outer] != 0):
                rate = safe_fit(x[outer], s[outer], None)[0]
                if np.isfinite(rate) and rate >= inf.nu_plus - 1e-9:
                    raise SolverError(
                        f"rhs decays too slowly at infinity (x^2 rhs ~ x^{rate:.3g}, "
                        f"excluded branch x^{inf.nu_plus:.3g})"
                    )
        if bc.tip != "dirichlet":
            inner = x <= x[0] * 10.0
            if np.all(s[inner] != 0):
                rate = safe_fit(x[inner], s[inner], None)[0]
                if np.isfinite(rate) and rate <= tip.nu_minus + 1e-9:
                    raise SolverError(
                        f"rhs is too singular at the tip (x^2 rhs ~ x^{rate:.3g}, "
                        f"excluded branch x^{tip.nu_minus:.3g})"
                    )

    def _solve_problem(
        self, problem: ModeProblem, left: Boundary, right: Boundary, nu_ref: float
    ) -> Tuple[np.ndarray, np.ndarray, float, float]:
        """Assemble, balance and solve the tridiagonal system; return u, u_t, residual, cond."""
        lower, diag, upper, b = _assemble(problem, left, right)
        h = problem.h
        size = diag.size

        # similarity scaling u = sigma v with sigma = exp(nu_ref (t - t_0))
        sigma = np.exp(nu_ref * h * np.arange(size))
        grow = np.exp(nu_ref * h)
        ab = np.zeros((3, size))
        ab[0, 1:] = upper[:-1] * grow
        ab[1] = diag
        ab[2, :-1] = lower[1:] / grow
        v = solve_banded((1, 1), ab, b / sigma)
        u = sigma * v

        cond = 0.0
        if self.settings.check_conditioning:
            cond = _condition_estimate(ab)

        full = diag * u
        full[1:] += lower[1:] * u[:-1]
        full[:-1] += upper[:-1] * u[1:]
        scale = np.abs(diag * u)
        scale[1:] += np.abs(lower[1:] * u[:-1])
        scale[:-1] += np.abs(upper[:-1] * u[1:])
        scale += np.abs(b)
        denom = np.where(scale > 0, scale, 1.0)
        residual = float(np.max(np.abs(full - b) / denom))

        u_t = np.empty_like(u)
        u_t[1:-1] = (u[2:] - u[:-2]) / (2.0 * h)
        u_t[0] = _end_slope(left, u, h, first=True)
        u_t[-1] = _end_slope(right, u, h, first=False)
        return u, u_t, residual, cond


def _assemble(
    problem: ModeProblem, left: Boundary, right: Boundary
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Rows of the h^2-scaled discrete equation, ghost points eliminated."""
    c, d, s, h = problem.c, problem.d, problem.s, problem.h
    h2 = h * h
    lower = 1.0 - 0.5 * h * c
    upper = 1.0 + 0.5 * h * c
    diag = -2.0 - h2 * d
    b = h2 * s

    kind, nu, g = left
    if kind == "dirichlet":
        diag[0], upper[0], b[0] = 1.0, 0.0, g
    else:
        upper[0] = 2.0
        diag[0] = -2.0 - 2.0 * nu * h + c[0] * nu * h2 - d[0] * h2
        b[0] = h2 * s[0] + 2.0 * g * h - c[0] * g * h2
    lower[0] = 0.0

    kind, nu, g = right
    if kind == "dirichlet":
        diag[-1], lower[-1], b[-1] = 1.0, 0.0, g
    else:
        lower[-1] = 2.0
        diag[-1] = -2.0 + 2.0 * nu * h + c[-1] * nu * h2 - d[-1] * h2
        b[-1] = h2 * s[-1] - 2.0 * g * h - c[-1] * g * h2
    upper[-1] = 0.0
    return lower, diag, upper, b


def _end_slope(boundary: Boundary, u: np.ndarray, h: float, first: bool) -> float:
    kind, nu, g = boundary
    if kind == "robin":
        return nu * (u[0] if first else u[-1]) + g
    if first:
        return (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
    return (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * h)


def _condition_estimate(ab: np.ndarray) -> float:
    """1-norm condition estimate of the banded matrix via a sparse LU."""
    size = ab.shape[1]
    matrix = diags(
        [ab[2, :-1], ab[1], ab[0, 1:]], offsets=[-1, 0, 1], shape=(size, size), format="csc"
    )
    lu = splu(matrix)
    inverse = LinearOperator(
        (size, size),
        matvec=lu.solve,
        rmatvec=lambda y: lu.solve(y, trans="T"),
        dtype=float,
    )
    norm = float(abs(matrix).sum(axis=0).max())
    return norm * float(onenormest(inverse))

