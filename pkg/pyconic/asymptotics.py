"""
Weighted Sobolev norms, critical exponents and power-law membership.
"""

import warnings
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Tuple

import numpy as np
from scipy.integrate import simpson

from pyconic.cone_geometry import RadialMetric, flat_metric
from pyconic.cross_section import SpectralData
from pyconic.exceptions import ConfigError
from pyconic.profiles.base import RadialFunction
from pyconic.utils.ramps import cutoff_partition

CRITICAL_TOLERANCE = 1e-12
DEFAULT_WINDOW = 32
TAIL_RATIO = 0.99


@dataclass(frozen=True)
class WeightPair:
    """
    Weights of the two-ended Sobolev space W^{k,p}_{delta,beta}.

    Attributes:
        delta: Weight at the cone tip
        beta: Weight at infinity
        k: Number of derivatives (0, 1 or 2 for radial functions)
        p: Integrability exponent, p >= 1
    """

    delta: float
    beta: float
    k: int = 0
    p: float = 2.0

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ConfigError(f"weight exponent p must be >= 1, got {self.p}")
        if int(self.k) != self.k or self.k < 0:
            raise ConfigError(f"derivative order k must be a nonnegative integer, got {self.k}")
        if self.k > 2:
            raise ConfigError("radial weighted norms are implemented for k <= 2")


def critical_exponents(lam: float, n: int) -> Tuple[float, float]:
    """
    Roots nu^+ >= nu^- of nu^2 + (n - 2) nu - lambda = 0.

    Args:
        lam: Eigenvalue lambda >= 0
        n: Dimension, n >= 3

    Returns:
        Tuple[float, float]: (nu_plus, nu_minus)
    """
    if lam < 0:
        raise ConfigError(f"eigenvalue must be nonnegative, got {lam}")
    if n < 3:
        raise ConfigError(f"dimension must be >= 3, got {n}")
    root = np.sqrt((n - 2) ** 2 + 4.0 * lam)
    return float((-(n - 2) + root) / 2.0), float((-(n - 2) - root) / 2.0)


@dataclass(frozen=True)
class CatalogRow:
    j: int
    eigenvalue: float
    multiplicity: int
    nu_plus: float
    nu_minus: float


@dataclass(frozen=True)
class ExponentCatalog:
    """
    Critical exponents at the cone tip and at infinity.

    Attributes:
        n: Dimension
        rows: Per-mode exponents nu_j^+ and nu_j^-
        window: Largest k in the infinity set {k, 2 - n - k}
    """

    n: int
    rows: Tuple[CatalogRow, ...]
    window: int

    @classmethod
    def from_spectrum(cls, s: SpectralData, window: Optional[int] = None) -> "ExponentCatalog":
        """
        Build the catalog from spectral data.

        Args:
            s: Spectral data
            window: Largest mode/infinity index kept; defaults to min(j_max, 32)

        Returns:
            ExponentCatalog: Catalog truncated to the window
        """
        if window is None:
            window = min(s.j_max, DEFAULT_WINDOW)
        if window < 0:
            raise ConfigError("catalog window must be nonnegative")
        rows = []
        for j, (lam, mult) in enumerate(s.pairs[: window + 1]):
            nu_p, nu_m = critical_exponents(lam, s.n)
            rows.append(CatalogRow(j, lam, mult, nu_p, nu_m))
        return cls(s.n, tuple(rows), int(window))

    @property
    def cone_critical(self) -> FrozenSet[float]:
        return frozenset([row.nu_plus for row in self.rows] + [row.nu_minus for row in self.rows])

    @property
    def infinity_critical(self) -> FrozenSet[float]:
        ks = range(self.window + 1)
        return frozenset([float(k) for k in ks] + [float(2 - self.n - k) for k in ks])

    def reflect(self, nu: float) -> float:
        """The exponent 2 - n - nu paired with nu."""
        return 2.0 - self.n - nu


def _near(value: float, candidates: FrozenSet[float], tol: float) -> bool:
    return any(abs(value - c) <= tol * max(1.0, abs(c)) for c in candidates)


def is_critical(
    delta: float,
    beta: float,
    s: SpectralData,
    j_max: Optional[int] = None,
    tol: float = CRITICAL_TOLERANCE,
) -> Tuple[bool, bool]:
    """
    Whether the weights (delta, beta) are critical at the tip and at infinity.

    Args:
        delta: Tip weight
        beta: Infinity weight
        s: Spectral data
        j_max: Mode window; defaults to min(stored modes, 32)
        tol: Comparison tolerance

    Returns:
        Tuple[bool, bool]: (cone-critical, infinity-critical)
    """
    catalog = ExponentCatalog.from_spectrum(s, j_max)
    top = catalog.rows[-1]
    if delta > top.nu_plus or delta < top.nu_minus:
        warnings.warn(
            f"delta = {delta:g} lies beyond the catalog window "
            f"[{top.nu_minus:g}, {top.nu_plus:g}]; noncriticality is not certified"
        )
    if beta > catalog.window or beta < 2 - s.n - catalog.window:
        warnings.warn(f"beta = {beta:g} lies beyond the infinity window k <= {catalog.window}")
    return _near(delta, catalog.cone_critical, tol), _near(beta, catalog.infinity_critical, tol)


def membership(nu: float, mu: float, w: WeightPair) -> Tuple[bool, bool]:
    """
    Membership of r^nu chi_1 and rho^mu chi_2 in W^{k,p}_{delta,beta}.

    Returns:
        Tuple[bool, bool]: (nu > delta, mu < beta)
    """
    return nu > w.delta, mu < w.beta


# ---------------------------------------------------------------------------
# Weighted norms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormResult:
    """
    Weighted norm with its tail diagnostics.

    Attributes:
        value: The p-th root of the integral, or inf
        finite: Whether both tail tests passed
        tip_ratio: Decade-to-decade ratio of the tip integrand
        infinity_ratio: Decade-to-decade ratio of the outer integrand
    """

    value: float
    finite: bool
    tip_ratio: float
    infinity_ratio: float


def _gradient_norms(u: RadialFunction, m: RadialMetric, k: int) -> List[np.ndarray]:
    """|nabla^i u| for i <= k, from the arclength form of the metric."""
    r = u.r
    n = m.n
    psi, dpsi, _ = m.conformal_weight(r)
    sigma = np.sqrt(psi)
    dsigma = 0.5 * dpsi / sigma
    norms = [np.abs(u.values)]
    if k >= 1:
        u_s = u.d1 / sigma
        norms.append(np.abs(u_s))
    if k >= 2:
        f, df, _ = m.warp.derivatives(r)
        u_ss = (u.d2 - u.d1 * dsigma / sigma) / sigma**2
        log_F_s = (df / f + dsigma / sigma) / sigma
        norms.append(np.sqrt(u_ss**2 + (n - 1) * (u_s * log_F_s) ** 2))
    return norms


def _decade_integrals(t: np.ndarray, y: np.ndarray, from_end: bool) -> np.ndarray:
    """Simpson integrals of y dt over the three decades at one end of the grid."""
    per_decade = int(round(np.log(10.0) / (t[1] - t[0])))
    out = []
    for d in range(3):
        if from_end:
            hi = t.size - d * per_decade
            sl = slice(hi - per_decade - 1, hi)
        else:
            lo = d * per_decade
            sl = slice(lo, lo + per_decade + 1)
        out.append(simpson(y[sl], x=t[sl]))
    return np.array(out)


def _tail(decades: np.ndarray) -> Tuple[float, bool, float]:
    """Cauchy ratio test over three decades: returns (tail estimate, finite, ratio)."""
    near, mid, far = decades  # ordered from the extreme end inward
    if near == 0.0:
        return 0.0, True, 0.0
    if mid == 0.0 or far == 0.0:
        return float("inf"), False, float("inf")
    # the larger of the two successive ratios bounds the geometric tail
    ratio = max(near / mid, mid / far)
    if ratio >= TAIL_RATIO:
        return float("inf"), False, float(ratio)
    return float(near * ratio / (1.0 - ratio)), True, float(ratio)


def weighted_norm_details(
    u: RadialFunction,
    w: WeightPair,
    cutoffs: Tuple[float, float] = (0.25, 4.0),
    metric: Optional[RadialMetric] = None,
    n: Optional[int] = None,
) -> NormResult:
    """
    Weighted Sobolev norm of a radial function with tail diagnostics.

    The integral of sum_i (r^(-p(delta-i)-n) chi_1 + rho^(-p(beta-i)-n) chi_2
    + chi_3) |nabla^i u|^p dvol is evaluated by Simpson's rule in log r. The
    part beyond the grid at each end is estimated by a geometric tail over
    the last three decades; either successive decade ratio >= 0.99 declares
    the norm infinite.

    Args:
        u: Radial function on a log-spaced grid with derivatives up to k
        w: Weights
        cutoffs: (eps, R) with eps < 1/2 and R > 2
        metric: Background metric
        n: Dimension of the Euclidean background used when metric is None

    Returns:
        NormResult: Norm value and tail diagnostics

    Raises:
        ConfigError: On invalid cutoffs, insufficient grid coverage, or
            neither metric nor n given
    """
    eps, radius = cutoffs
    if not (0 < eps < 0.5 and radius > 2):
        raise ConfigError(f"cutoffs need eps < 1/2 and R > 2, got ({eps:g}, {radius:g})")
    if metric is None:
        if n is None:
            raise ConfigError("weighted norms need a metric or a dimension n", key="n")
        metric = flat_metric(n)
    elif n is not None and n != metric.n:
        raise ConfigError(f"n = {n} does not match the metric dimension {metric.n}", key="n")
    m = metric
    x = m.offset(u.r)
    if np.any(x <= 0):
        raise ConfigError("function grid reaches the tip")
    t = np.log(x)
    steps = np.diff(t)
    if not np.allclose(steps, steps[0], rtol=1e-6):
        raise ConfigError("weighted norms need a log-spaced grid")
    if x[0] > eps * 1e-3 or x[-1] < 2 * radius * 1e3:
        raise ConfigError(
            "insufficient grid coverage: need three decades inside each cutoff region"
        )

    chi_tip, chi_inf, chi_mid = cutoff_partition(x, eps, radius)
    psi, _, _ = m.conformal_weight(u.r)
    f = m.warp(u.r)
    n = m.n
    # dvol per unit dt, including the cross-section volume
    dvol = psi ** (n / 2.0) * f ** (n - 1) * x * m.spectral.volume
    rho = u.r

    tip_part = np.zeros_like(x)
    inf_part = np.zeros_like(x)
    mid_part = np.zeros_like(x)
    for i, grad in enumerate(_gradient_norms(u, m, w.k)):
        gp = grad**w.p
        tip_part += x ** (-w.p * (w.delta - i) - n) * gp
        inf_part += rho ** (-w.p * (w.beta - i) - n) * gp
        mid_part += gp
    tip_part *= chi_tip * dvol
    inf_part *= chi_inf * dvol
    mid_part *= chi_mid * dvol

    total = simpson(tip_part + inf_part + mid_part, x=t)
    tip_tail, tip_ok, tip_ratio = _tail(_decade_integrals(t, tip_part, from_end=False))
    inf_tail, inf_ok, inf_ratio = _tail(_decade_integrals(t, inf_part, from_end=True))
    if not (tip_ok and inf_ok):
        return NormResult(float("inf"), False, tip_ratio, inf_ratio)
    value = float((total + tip_tail + inf_tail) ** (1.0 / w.p))
    return NormResult(value, True, tip_ratio, inf_ratio)


def weighted_norm(
    u: RadialFunction,
    w: WeightPair,
    cutoffs: Tuple[float, float] = (0.25, 4.0),
    metric: Optional[RadialMetric] = None,
    n: Optional[int] = None,
) -> float:
    """
    Weighted Sobolev norm ||u||_{W^{k,p}_{delta,beta}}, +inf when a tail diverges.

    See weighted_norm_details for the quadrature and tail rules.
    """
    return weighted_norm_details(u, w, cutoffs, metric, n).value
