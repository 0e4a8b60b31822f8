"""
Base classes and data types for radial mode solvers.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from pyconic.cone_geometry import RadialMetric
from pyconic.exceptions import ConfigError, CriticalWeightError, FitError, SolverError
from pyconic.profiles.base import BaseProfile, RadialFunction
from pyconic.utils.fitting import power_law_fit

ProfileLike = Union[None, float, BaseProfile, RadialFunction]

CRITICAL_GAP = 1e-8


class Branch:
    """
    Boundary branch kinds at the tip and at infinity.
    """
    REGULAR = "regular"
    GREEN = "green"
    DECAY = "decay"
    NORMALIZED = "normalized"
    COORDINATE = "coordinate"
    DIRICHLET = "dirichlet"

    TIP = (REGULAR, GREEN, DIRICHLET)
    INFINITY = (DECAY, NORMALIZED, COORDINATE, DIRICHLET)

    def __new__(cls, value: Optional[str] = None, end: str = "tip") -> str:  # type: ignore[misc]
        """
        Validate a branch kind for one end.

        Args:
            value: Branch kind; None selects the default of the end
            end: "tip" or "infinity"

        Returns:
            str: Validated branch kind

        Raises:
            ConfigError: If the kind is not admissible at that end
        """
        allowed = cls.TIP if end == "tip" else cls.INFINITY
        if value is None:
            return allowed[0]
        if value in allowed:
            return value
        raise ConfigError(f"Invalid {end} branch: {value!r}; expected one of {list(allowed)}")


@dataclass(frozen=True)
class BoundaryBranchSpec:
    """
    Asymptotic branch selected at each end of a mode solve.

    Attributes:
        tip: regular (keep nu^+), green (unit coefficient on nu^-) or dirichlet
        infinity: decay, normalized (limit 1), coordinate (unit growing branch) or dirichlet
        tip_value: Dirichlet value at the inner truncation radius
        infinity_value: Dirichlet value at the outer truncation radius
    """

    tip: str = Branch.REGULAR
    infinity: str = Branch.DECAY
    tip_value: float = 0.0
    infinity_value: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "tip", Branch(self.tip, "tip"))
        object.__setattr__(self, "infinity", Branch(self.infinity, "infinity"))

    @classmethod
    def parse(cls, tip: str = "regular", infinity: str = "decay") -> "BoundaryBranchSpec":
        """
        Build a spec from strings such as "green" or "dirichlet:2.5".

        Args:
            tip: Tip branch string
            infinity: Infinity branch string

        Returns:
            BoundaryBranchSpec: Parsed spec
        """
        kinds, values = [], []
        for text, end in ((tip, "tip"), (infinity, "infinity")):
            kind, _, raw = str(text).partition(":")
            value = 0.0
            if kind == Branch.DIRICHLET:
                try:
                    value = float(raw)
                except ValueError as exc:
                    raise ConfigError(
                        f"dirichlet branch needs a value, got {text!r}", key=f"bc.{end}"
                    ) from exc
            elif raw:
                raise ConfigError(f"branch {kind!r} takes no value", key=f"bc.{end}")
            kinds.append(Branch(kind, end))
            values.append(value)
        return cls(kinds[0], kinds[1], values[0], values[1])

    def to_strings(self) -> Tuple[str, str]:
        tip = self.tip if self.tip != Branch.DIRICHLET else f"dirichlet:{self.tip_value!r}"
        inf = (
            self.infinity
            if self.infinity != Branch.DIRICHLET
            else f"dirichlet:{self.infinity_value!r}"
        )
        return tip, inf


@dataclass(frozen=True)
class SolverSettings:
    """
    Truncation and resolution of radial solves.

    Attributes:
        r_in: Inner truncation offset from the tip
        r_out: Outer truncation offset from the tip
        points_per_decade: Coarse grid density (the Richardson fine grid doubles it)
        richardson: Whether to combine two resolutions
        tolerance: Largest accepted normalized residual
        degeneracy_threshold: Largest accepted condition estimate of the operator
        fit_tolerance: Tolerance on fitted exponents
        check_conditioning: Whether to estimate the condition number
        negative_part_threshold: Smallness bound on the L^(n/2) norm of a Schrodinger
            potential's negative part; None uses the Euclidean Sobolev constant
    """

    r_in: float = 1e-4
    r_out: float = 1e4
    points_per_decade: int = 400
    richardson: bool = True
    tolerance: float = 1e-9
    degeneracy_threshold: float = 1e12
    fit_tolerance: float = 1e-3
    check_conditioning: bool = False
    negative_part_threshold: Optional[float] = None

    def __post_init__(self) -> None:
        if not 0 < self.r_in < self.r_out:
            raise ConfigError("solver needs 0 < r_in < r_out", key="solver.r_in")
        if np.log10(self.r_out / self.r_in) < 2:
            raise ConfigError("solver domain must span at least two decades", key="solver.r_out")
        if self.points_per_decade < 20:
            raise ConfigError("points_per_decade must be at least 20", key="solver.points_per_decade")
        if self.tolerance <= 0 or self.degeneracy_threshold <= 1:
            raise ConfigError("solver tolerances must be positive", key="solver.tolerance")
        if self.negative_part_threshold is not None and self.negative_part_threshold <= 0:
            raise ConfigError(
                "negative_part_threshold must be positive", key="solver.negative_part_threshold"
            )

    def refined(self) -> "SolverSettings":
        """The same settings at twice the resolution."""
        return replace(self, points_per_decade=2 * self.points_per_decade)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "r_in": self.r_in,
            "r_out": self.r_out,
            "points_per_decade": self.points_per_decade,
            "richardson": self.richardson,
            "tolerance": self.tolerance,
            "degeneracy_threshold": self.degeneracy_threshold,
            "fit_tolerance": self.fit_tolerance,
            "negative_part_threshold": self.negative_part_threshold,
        }


@dataclass(frozen=True)
class EndExponents:
    """Frozen-coefficient exponents nu^+ >= nu^- at one end of the grid."""

    nu_plus: float
    nu_minus: float


@dataclass
class ModeSolution:
    """
    Radial solution of one mode with its asymptotic data.

    Attributes:
        j: Mode index (None when the eigenvalue was given directly)
        eigenvalue: lambda_j
        solution: u with first and second r-derivatives
        tip_exponent: Exponent of the power-law fit on the innermost decade
        tip_coefficient: Coefficient of that fit
        infinity_exponent: Exponent of the power-law fit on the outermost decade
        infinity_coefficient: Coefficient of that fit
        residual: Normalized algebraic residual of the discrete equations
        tip_branches: Frozen-coefficient exponents at the inner end
        infinity_branches: Frozen-coefficient exponents at the outer end
        bc: Boundary branches used
        info: Solver diagnostics
    """

    j: Optional[int]
    eigenvalue: float
    solution: RadialFunction
    tip_exponent: float
    tip_coefficient: float
    infinity_exponent: float
    infinity_coefficient: float
    residual: float
    tip_branches: EndExponents
    infinity_branches: EndExponents
    bc: BoundaryBranchSpec
    info: Dict[str, Any] = field(default_factory=dict)

    @property
    def r(self) -> np.ndarray:
        return self.solution.r

    @property
    def values(self) -> np.ndarray:
        return self.solution.values


@dataclass(frozen=True)
class ModeProblem:
    """
    The mode equation u'' + P u' - Q u = S in t = log(r - tip).

    Written as u_tt + c u_t - d u = s with c = xP - 1, d = x^2 Q, s = x^2 S.
    """

    x: np.ndarray
    r: np.ndarray
    c: np.ndarray
    d: np.ndarray
    s: np.ndarray

    @property
    def t(self) -> np.ndarray:
        return np.log(self.x)

    @property
    def h(self) -> float:
        return float(self.t[1] - self.t[0])


class BaseRadialSolver(ABC):
    """
    Abstract base class for solvers of the radial mode equation.

    The mode of Delta_g with eigenvalue lambda, for
    g = phi^(4/(n-2)) (dr^2 + f^2 g^N), is
    phi^(-4/(n-2)) (u'' + [(n-1) f'/f + 2 phi'/phi] u' - lambda u / f^2).
    Subclasses solve Delta_g u - V u = rhs for one mode with branch conditions.
    """

    def __init__(self, settings: Optional[SolverSettings] = None, verbose: bool = False):
        """
        Initialize the solver.

        Args:
            settings: Truncation and resolution settings
            verbose: Whether to print progress information
        """
        self.settings = settings or SolverSettings()
        self.verbose = verbose

    @abstractmethod
    def solve(
        self,
        metric: RadialMetric,
        eigenvalue: float,
        rhs: ProfileLike = None,
        bc: Optional[BoundaryBranchSpec] = None,
        potential: ProfileLike = None,
        j: Optional[int] = None,
    ) -> ModeSolution:
        """
        Solve one mode equation.

        Args:
            metric: Background metric
            eigenvalue: Cross-section eigenvalue lambda >= 0
            rhs: Right-hand side of Delta_g u - V u = rhs (0 if None)
            bc: Boundary branches (regular, decay) if None
            potential: Potential V (0 if None)
            j: Mode index recorded in the solution

        Returns:
            ModeSolution: Solution with fitted asymptotics
        """
        pass

    # shared helpers

    def grid_offsets(self, metric: RadialMetric, refine: int = 1) -> np.ndarray:
        """
        Log-spaced offsets x = r - tip covering the truncated domain.

        Args:
            metric: Background metric
            refine: Interval subdivision; refine = 2 nests the coarse grid

        Returns:
            np.ndarray: Offsets from r_in to min(r_out, r_max - tip)
        """
        lo = self.settings.r_in
        hi = min(self.settings.r_out, metric.r_max - metric.tip)
        if hi <= lo * 100.0:
            raise ConfigError("metric domain is smaller than the solver truncation")
        intervals = int(round(np.log10(hi / lo) * self.settings.points_per_decade))
        return np.exp(np.linspace(np.log(lo), np.log(hi), refine * intervals + 1))

    @staticmethod
    def mode_problem(
        metric: RadialMetric,
        eigenvalue: float,
        x: np.ndarray,
        rhs: Optional[BaseProfile] = None,
        potential: Optional[BaseProfile] = None,
    ) -> ModeProblem:
        """
        Coefficients of the mode equation in log coordinates.

        Args:
            metric: Background metric
            eigenvalue: lambda
            x: Offsets from the tip
            rhs: Right-hand side profile
            potential: Potential profile

        Returns:
            ModeProblem: Coefficients c, d, s on the grid
        """
        if eigenvalue < 0:
            raise ConfigError(f"eigenvalue must be nonnegative, got {eigenvalue}")
        r = metric.tip + x
        f, df, _ = metric.warp.derivatives(r)
        phi, dphi, _ = metric.factor.derivatives(r)
        if np.any(f <= 0) or np.any(phi <= 0):
            raise SolverError("warp and conformal factor must be positive on the solver grid")
        psi = phi**metric.conformal_power
        P = (metric.n - 1) * df / f + 2.0 * dphi / phi
        Q = eigenvalue / f**2
        if potential is not None:
            Q = Q + psi * potential(r)
        S = np.zeros_like(x) if rhs is None else psi * rhs(r)
        return ModeProblem(x=x, r=r, c=x * P - 1.0, d=x**2 * Q, s=x**2 * S)

    @staticmethod
    def end_exponents(c: float, d: float) -> EndExponents:
        """
        Roots of nu^2 + c nu - d = 0 for frozen end coefficients.

        Raises:
            CriticalWeightError: If the two branches coincide
            SolverError: If the roots are complex
        """
        disc = c * c + 4.0 * d
        if disc < -CRITICAL_GAP:
            raise SolverError("oscillatory end: branch exponents are complex")
        if abs(disc) <= CRITICAL_GAP * max(1.0, c * c):
            raise CriticalWeightError(
                f"coincident branch exponents ({-c / 2:g}); the weight is critical"
            )
        root = np.sqrt(disc)
        return EndExponents((-c + root) / 2.0, (-c - root) / 2.0)

    @staticmethod
    def robin_data(
        bc: BoundaryBranchSpec, x0: float, tip: EndExponents, x1: float, inf: EndExponents
    ) -> Tuple[Tuple[str, float, float], Tuple[str, float, float]]:
        """
        Boundary rows as (kind, nu, g): u_t - nu u = g, or ("dirichlet", 0, value).

        At the tip u_t - nu^+ u = kappa (nu^- - nu^+) x^nu^- pins the coefficient
        of the nu^- branch to kappa; at infinity u_t - nu^- u = c (nu^+ - nu^-) x^nu^+
        pins the coefficient of the nu^+ branch to c.
        """
        if bc.tip == Branch.DIRICHLET:
            left = ("dirichlet", 0.0, bc.tip_value)
        else:
            kappa = 1.0 if bc.tip == Branch.GREEN else 0.0
            g = kappa * (tip.nu_minus - tip.nu_plus) * x0**tip.nu_minus
            left = ("robin", tip.nu_plus, g)

        if bc.infinity == Branch.DIRICHLET:
            right = ("dirichlet", 0.0, bc.infinity_value)
        else:
            coeff = 0.0
            if bc.infinity == Branch.NORMALIZED:
                if abs(inf.nu_plus) > 1e-6:
                    raise ConfigError(
                        f"normalized branch needs a constant mode at infinity "
                        f"(nu^+ = {inf.nu_plus:g})"
                    )
                coeff = 1.0
            elif bc.infinity == Branch.COORDINATE:
                if inf.nu_plus <= 0:
                    raise ConfigError("coordinate branch needs a growing mode at infinity")
                coeff = 1.0
            g = coeff * (inf.nu_plus - inf.nu_minus) * x1**inf.nu_plus
            right = ("robin", inf.nu_minus, g)
        return left, right

    @staticmethod
    def reference_exponent(
        bc: BoundaryBranchSpec, tip: EndExponents, x: np.ndarray
    ) -> float:
        """Exponent used to balance the unknowns: the kept tip branch."""
        if bc.tip == Branch.REGULAR:
            return tip.nu_plus
        if bc.tip == Branch.GREEN:
            return tip.nu_minus
        if (
            bc.infinity == Branch.DIRICHLET
            and bc.tip_value * bc.infinity_value > 0
        ):
            span = np.log(x[-1]) - np.log(x[0])
            return float(np.log(bc.infinity_value / bc.tip_value) / span)
        return 0.0

    def build_solution(
        self,
        problem: ModeProblem,
        u: np.ndarray,
        u_t: np.ndarray,
        eigenvalue: float,
        bc: BoundaryBranchSpec,
        tip: EndExponents,
        inf: EndExponents,
        residual: float,
        j: Optional[int],
        info: Dict[str, Any],
    ) -> ModeSolution:
        """
        Convert log-grid samples to r-derivatives and fit both ends.

        The second derivative is taken from the equation itself, so the
        returned samples satisfy the mode equation pointwise.
        """
        x = problem.x
        u_tt = problem.s + problem.d * u - problem.c * u_t
        u_r = u_t / x
        u_rr = (u_tt - u_t) / x**2
        solution = RadialFunction(problem.r, u, u_r, u_rr)
        tip_fit = safe_fit(x, u, (x[0], 10.0 * x[0]))
        inf_fit = safe_fit(x, u, (x[-1] / 10.0, x[-1]))
        return ModeSolution(
            j=j,
            eigenvalue=float(eigenvalue),
            solution=solution,
            tip_exponent=tip_fit[0],
            tip_coefficient=tip_fit[1],
            infinity_exponent=inf_fit[0],
            infinity_coefficient=inf_fit[1],
            residual=float(residual),
            tip_branches=tip,
            infinity_branches=inf,
            bc=bc,
            info=info,
        )


def safe_fit(
    x: np.ndarray, y: np.ndarray, window: Optional[Tuple[float, float]]
) -> Tuple[float, float]:
    """Power-law (exponent, coefficient), or nans when y changes sign on the window."""
    try:
        fit = power_law_fit(x, y, window=window)
    except FitError:
        return float("nan"), float("nan")
    return fit.exponent, fit.coefficient
