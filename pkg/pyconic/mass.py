"""
ADM mass of the AF end by flux integrals, and the conformal mass shift.
"""

import warnings
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from pyconic.cone_geometry import RadialMetric
from pyconic.conformal import conformal_metric
from pyconic.cross_section import unit_sphere_volume
from pyconic.exceptions import ConfigError, InvariantViolation
from pyconic.profiles.base import RadialFunction, SampledProfile
from pyconic.utils.fitting import fit_line, polynomial_limit, three_point_order
from pyconic.utils.symbolic import first_order_shift_coefficient

DEFAULT_LADDER = (1e1, 1e2, 1e3)
ORDER_SNAP = 0.1
LINEARITY_THRESHOLD = 1e-6


def adm_flux(m: RadialMetric, R: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    Normalized ADM flux of m through the coordinate sphere of radius R.

    In Euclidean coordinates g_ij = a delta_ij + b x_i x_j / rho^2 with
    a = psi f^2 / rho^2 and b = psi - a; the angular integral is done in
    closed form and the result is divided by vol(S^(n-1)):
    m(R) = (n-1) R^(n-1) (b/R - a'(R)).

    Args:
        m: Metric with an AF end
        R: Radius or radii inside the AF region

    Returns:
        Flux value(s)

    Raises:
        ConfigError: If R lies outside the AF region
    """
    radii = np.atleast_1d(np.asarray(R, dtype=float))
    if np.any(radii < m.af_start) or np.any(radii <= m.tip) or np.any(radii >= m.r_max):
        raise ConfigError(
            f"flux radius outside the AF region [{m.af_start:g}, {m.r_max:g})", key="mass.ladder"
        )
    n = m.n
    f, df, _ = m.warp.derivatives(radii)
    psi, dpsi, _ = m.conformal_weight(radii)
    k = f**2 / radii**2 - 1.0
    dk = 2.0 * f * df / radii**2 - 2.0 * f**2 / radii**3
    a_prime = dpsi * (1.0 + k) + psi * dk
    b = -psi * k
    flux = (n - 1) * radii ** (n - 1) * (b / radii - a_prime)
    if np.ndim(R) == 0:
        return float(flux[0])
    return flux


@dataclass
class MassReport:
    """
    Extrapolated ADM mass from a ladder of flux radii.

    Attributes:
        radii: Increasing flux radii
        fluxes: Flux values at those radii
        mass: Extrapolated mass
        order: Correction order kappa used in the extrapolation
        error_bar: |extrapolant with all radii - extrapolant without the smallest|
        omega_n: Volume of the unit sphere S^(n-1) used in the normalization
        fitted_order: kappa from the three outermost fluxes before snapping
        monotone: Whether the flux tail is monotone
    """

    radii: List[float]
    fluxes: List[float]
    mass: float
    order: float
    error_bar: float
    omega_n: float
    fitted_order: float = float("nan")
    monotone: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "radii": list(self.radii),
            "fluxes": list(self.fluxes),
            "mass": self.mass,
            "order": self.order,
            "error_bar": self.error_bar,
            "omega_n": self.omega_n,
        }


def _check_ladder(ladder: Sequence[float]) -> np.ndarray:
    radii = np.asarray(ladder, dtype=float)
    if radii.size < 3:
        raise ConfigError("mass ladder needs at least three radii", key="mass.ladder")
    if np.any(np.diff(radii) <= 0):
        raise ConfigError("mass ladder must be strictly increasing", key="mass.ladder")
    return radii


def adm_mass(
    m: RadialMetric,
    ladder: Sequence[float] = DEFAULT_LADDER,
    order_snap: float = ORDER_SNAP,
) -> MassReport:
    """
    ADM mass by polynomial extrapolation of fluxes in R^-kappa.

    kappa is fitted from the three outermost fluxes and identified with the
    AF order of m or with n - 2 when it lies within ``order_snap`` of one of
    them. A non-monotone flux tail is flagged with a warning.

    Args:
        m: Metric with an AF end
        ladder: Increasing flux radii, at least three
        order_snap: Distance within which the fitted order is snapped

    Returns:
        MassReport: Fluxes, extrapolated mass, order and error bar
    """
    radii = _check_ladder(ladder)
    fluxes = np.asarray(adm_flux(m, radii), dtype=float)
    omega = unit_sphere_volume(m.n)
    scale = max(float(np.max(np.abs(fluxes))), 1e-300)

    if np.ptp(fluxes) <= 1e-14 * scale:
        return MassReport(
            radii.tolist(), fluxes.tolist(), float(fluxes[-1]), float("nan"), 0.0, omega
        )

    steps = np.diff(fluxes[-3:])
    monotone = bool(np.all(steps > 0) or np.all(steps < 0))
    fitted = three_point_order(radii[-3:], fluxes[-3:])
    candidates = [float(m.af_order), float(m.n - 2)]  # type: ignore[arg-type]
    order = fitted
    if np.isfinite(fitted):
        near = [c for c in candidates if abs(c - fitted) < order_snap]
        if near:
            order = min(near, key=lambda c: abs(c - fitted))
    else:
        order = candidates[0]
    if not monotone or not np.isfinite(fitted):
        warnings.warn(
            f"flux tail of {m.name} is not monotone; extrapolation with order {order:g} is unreliable"
        )

    nodes = radii ** (-order)
    mass = polynomial_limit(nodes, fluxes)
    previous = polynomial_limit(nodes[1:], fluxes[1:])
    return MassReport(
        radii=radii.tolist(),
        fluxes=fluxes.tolist(),
        mass=float(mass),
        order=float(order),
        error_bar=float(abs(mass - previous)),
        omega_n=omega,
        fitted_order=float(fitted),
        monotone=monotone,
    )


@dataclass
class MassShiftReport:
    """
    Masses of the conformal family u_delta^(4/(n-2)) g and their linear fit.

    Attributes:
        A: Coefficient of the Green-type harmonic function at infinity
        deltas: Values of delta
        masses: Extrapolated mass for each delta
        base_mass: Mass of g itself
        slope: Fitted d mass / d delta
        intercept: Fitted mass at delta = 0
        linear_deviation: 1 - R^2 of the linear fit
        coefficient: slope / A
        symbolic_coefficient: First-order coefficient from the symbolic flux
        coefficient_error: Relative difference of the two coefficients
        matched_constant: Which of 4(n-2) and 4(n-1) the coefficient matches
        candidates: Values of the candidate constants
        reports: MassReport per delta
    """

    A: float
    deltas: List[float]
    masses: List[float]
    base_mass: float
    slope: float
    intercept: float
    linear_deviation: float
    coefficient: float
    symbolic_coefficient: float
    coefficient_error: float
    matched_constant: str
    candidates: Dict[str, float]
    reports: List[MassReport] = field(default_factory=list)

    @property
    def is_linear(self) -> bool:
        return self.linear_deviation < LINEARITY_THRESHOLD

    def to_dict(self) -> Dict[str, Any]:
        return {
            "A": self.A,
            "deltas": self.deltas,
            "masses": self.masses,
            "base_mass": self.base_mass,
            "slope": self.slope,
            "intercept": self.intercept,
            "linear_deviation": self.linear_deviation,
            "coefficient": self.coefficient,
            "symbolic_coefficient": self.symbolic_coefficient,
            "coefficient_error": self.coefficient_error,
            "matched_constant": self.matched_constant,
            "candidates": self.candidates,
        }


def shifted_metric(m: RadialMetric, u: RadialFunction, delta: float) -> RadialMetric:
    """The metric (1 + delta (u - 1))^(4/(n-2)) g on the grid of u."""
    if delta < 0:
        raise ConfigError(f"delta must be nonnegative, got {delta}", key="blowup.deltas")
    if delta == 0:
        return m
    factor = SampledProfile(
        u.r, 1.0 + delta * (u.values - 1.0), delta * u.d1, delta * u.d2
    )
    shifted = conformal_metric(m, factor, name=f"{m.name}[delta={delta:g}]")
    return replace(shifted, r_max=min(m.r_max, float(u.r[-1])))


def mass_shift_experiment(
    m: RadialMetric,
    u: RadialFunction,
    A: float,
    deltas: Sequence[float],
    ladder: Sequence[float] = DEFAULT_LADDER,
    linearity_threshold: float = LINEARITY_THRESHOLD,
    strict: bool = True,
    verbose: bool = False,
) -> MassShiftReport:
    """
    Fit m(u_delta^(4/(n-2)) g) against delta and compare the slope with A.

    Args:
        m: Base metric
        u: Green-type harmonic function with u -> 1 + A rho^(2-n)
        A: Its coefficient at infinity
        deltas: At least three distinct nonnegative values
        ladder: Flux radii for every mass
        linearity_threshold: Largest accepted 1 - R^2 of the linear fit
        strict: Raise on a nonlinear fit instead of warning
        verbose: Whether to print one line per delta

    Returns:
        MassShiftReport: Slope, intercept, coefficient and matched constant

    Raises:
        ConfigError: On fewer than three distinct nonnegative deltas or A = 0
        InvariantViolation: If strict and 1 - R^2 exceeds linearity_threshold
    """
    values = np.asarray(deltas, dtype=float)
    if values.size < 3 or np.unique(values).size != values.size:
        raise ConfigError("mass shift needs at least three distinct deltas", key="blowup.deltas")
    if np.any(values < 0):
        raise ConfigError("deltas must be nonnegative", key="blowup.deltas")
    if A == 0:
        raise ConfigError("mass shift needs a nonzero coefficient A")

    base = adm_mass(m, ladder)
    reports = []
    for delta in values:
        report = base if delta == 0 else adm_mass(shifted_metric(m, u, float(delta)), ladder)
        reports.append(report)
        if verbose:
            print(f"delta={delta:g}: mass {report.mass:.12g} +- {report.error_bar:.2g}")
    masses = np.array([rep.mass for rep in reports])

    slope, intercept, deviation = fit_line(values, masses)
    n = m.n
    coefficient = slope / A
    symbolic = first_order_shift_coefficient(n)
    candidates = {"4(n-2)": 4.0 * (n - 2), "4(n-1)": 4.0 * (n - 1)}
    matched = min(candidates, key=lambda key: abs(candidates[key] - coefficient))
    if deviation > linearity_threshold:
        message = f"mass is not linear in delta (1 - R^2 = {deviation:.3g})"
        if strict:
            raise InvariantViolation(message)
        warnings.warn(message)
    if matched != "4(n-2)":
        warnings.warn(
            f"mass shift coefficient {coefficient:.6g} matches {matched}, not 4(n-2)"
        )
    return MassShiftReport(
        A=float(A),
        deltas=values.tolist(),
        masses=masses.tolist(),
        base_mass=base.mass,
        slope=slope,
        intercept=intercept,
        linear_deviation=deviation,
        coefficient=coefficient,
        symbolic_coefficient=symbolic,
        coefficient_error=abs(coefficient - symbolic) / abs(symbolic),
        matched_constant=matched,
        candidates=candidates,
        reports=reports,
    )
