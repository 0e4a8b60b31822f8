"""
Geometry of cones, warped products and conformally radial metrics.

All metrics handled here have the form

    g = phi(r)^(4/(n-2)) (dr^2 + f(r)^2 g^N)

on (tip, r_max) x N, with warp f and conformal factor phi given as radial
profiles. The cross section enters only through its spectrum, its scalar
curvature and its Einstein constant.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Tuple

import numpy as np

from pyconic.cross_section import SpectralData, sphere_spectrum
from pyconic.exceptions import ConfigError, FitError
from pyconic.profiles.base import (
    BaseProfile,
    ConstantProfile,
    SampledProfile,
    ScaledProfile,
)
from pyconic.profiles.builtin import ConeWarp, GluedWarp, HornWarp, PowerLawFactor
from pyconic.utils.fitting import PowerLawFit, power_law_fit


@dataclass(frozen=True)
class RadialMetric:
    """
    A conformally radial metric over a closed cross section.

    Attributes:
        n: Dimension, n >= 3
        spectral: Spectral data of the cross section
        warp: Warp f, positive on the domain
        factor: Conformal factor phi, positive on the domain
        cross_section_scalar: Scalar curvature Sc_N of g^N (assumed constant)
        conical_order: alpha, rate at which the tip approaches the model cone
        af_order: tau, decay rate of the metric at the AF end
        tip: Radius where the metric degenerates (0 for cones)
        r_max: Outer end of the domain
        af_start: Radius beyond which flux integrals are meaningful
        name: Short label used in reports
    """

    n: int
    spectral: SpectralData
    warp: BaseProfile
    factor: BaseProfile = field(default_factory=ConstantProfile)
    cross_section_scalar: Optional[float] = None
    conical_order: float = 1.0
    af_order: Optional[float] = None
    tip: float = 0.0
    r_max: float = float("inf")
    af_start: float = 0.0
    name: str = "metric"

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 3:
            raise ConfigError(f"metric dimension must be an integer >= 3, got {self.n}", key="n")
        if self.spectral.n != self.n:
            raise ConfigError("spectral data dimension does not match the metric", key="n")
        if self.conical_order <= 0:
            raise ConfigError("conical order alpha must be positive", key="metric.alpha")
        if self.cross_section_scalar is None:
            sc = self.spectral.scalar_curvature
            if sc is None:
                raise ConfigError(
                    "cross-section scalar curvature is required for non-sphere sections",
                    key="metric.cross_section_scalar",
                )
            object.__setattr__(self, "cross_section_scalar", float(sc))
        if self.af_order is None:
            object.__setattr__(self, "af_order", float(self.n - 2))
        if self.af_order is not None and self.af_order <= (self.n - 2) / 2.0:
            raise ConfigError(
                f"AF order tau must exceed (n-2)/2 = {(self.n - 2) / 2:g}", key="metric.tau"
            )
        if self.r_max <= self.tip:
            raise ConfigError("metric domain is empty", key="metric.r_max")

    @property
    def conformal_power(self) -> float:
        """Exponent 4/(n-2) of the conformal factor."""
        return 4.0 / (self.n - 2)

    @property
    def is_warped(self) -> bool:
        """Whether the conformal factor is identically 1."""
        return isinstance(self.factor, ConstantProfile) and self.factor.value == 1.0

    @property
    def ricci_constant(self) -> Optional[float]:
        return self.spectral.ricci_lower_bound

    def offset(self, r: np.ndarray) -> np.ndarray:
        """Distance x = r - tip from the degenerate end."""
        return np.asarray(r, dtype=float) - self.tip

    def conformal_weight(self, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        psi = phi^(4/(n-2)) with its first two derivatives.

        Args:
            r: Radii

        Returns:
            Tuple[np.ndarray, np.ndarray, np.ndarray]: (psi, psi', psi'')
        """
        phi, dphi, d2phi = self.factor.derivatives(np.asarray(r, dtype=float))
        p = self.conformal_power
        psi = phi**p
        dpsi = p * phi ** (p - 1.0) * dphi
        d2psi = p * (p - 1.0) * phi ** (p - 2.0) * dphi**2 + p * phi ** (p - 1.0) * d2phi
        return psi, dpsi, d2psi

    def check_domain(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if np.any(r <= self.tip) or np.any(r > self.r_max):
            raise ConfigError(
                f"radius outside the metric domain ({self.tip:g}, {self.r_max:g}]"
            )
        return r

    def scaled(self, c: float) -> "RadialMetric":
        """
        The metric c^2 g in the coordinate rho = c r.

        The warp becomes c f(rho / c) and the conformal factor phi(rho / c);
        the ADM mass scales by c^(n-2).

        Args:
            c: Positive scale

        Returns:
            RadialMetric: Rescaled metric
        """
        if c <= 0:
            raise ConfigError("scale factor must be positive")
        return replace(
            self,
            warp=ScaledProfile(self.warp, outer=c, inner=c),
            factor=ScaledProfile(self.factor, outer=1.0, inner=c),
            tip=c * self.tip,
            r_max=c * self.r_max,
            af_start=c * self.af_start,
            name=f"{self.name}*{c:g}",
        )

    def with_factor(self, factor: BaseProfile, name: Optional[str] = None) -> "RadialMetric":
        """Same warp and cross section with a different conformal factor."""
        return replace(self, factor=factor, name=name or self.name)


# ---------------------------------------------------------------------------
# Builtin metrics
# ---------------------------------------------------------------------------


def flat_metric(n: int, j_max: int = 8) -> RadialMetric:
    """Euclidean R^n as the cone over the unit round sphere."""
    return RadialMetric(n, sphere_spectrum(n, j_max), ConeWarp(1.0), name="flat")


def cone_metric(n: int, radius: float = 1.0, j_max: int = 8) -> RadialMetric:
    """
    Exact cone dr^2 + r^2 g^N over the round sphere of radius a.

    Args:
        n: Dimension
        radius: Sphere radius a, so that lambda_1 = (n-1)/a^2
        j_max: Number of stored modes beyond the constant one

    Returns:
        RadialMetric: The cone (flat when a = 1)
    """
    return RadialMetric(
        n, sphere_spectrum(n, j_max, radius=radius), ConeWarp(1.0), name=f"cone(a={radius:g})"
    )


def horn_metric(n: int, b: float, j_max: int = 8) -> RadialMetric:
    """Model r^b-horn dr^2 + r^(2b) g^N over the unit sphere."""
    return RadialMetric(n, sphere_spectrum(n, j_max), HornWarp(b), name=f"horn(b={b:g})")


def schwarzschild_metric(n: int, A: float, j_max: int = 8) -> RadialMetric:
    """
    Schwarzschild-type metric (1 + A r^(2-n))^(4/(n-2)) delta with A > 0.

    Its ADM mass under the flux normalization used here is 4 (n - 1) A.
    """
    if A <= 0:
        raise ConfigError(f"schwarzschild needs A > 0, got {A}", key="metric.A")
    return RadialMetric(
        n,
        sphere_spectrum(n, j_max),
        ConeWarp(1.0),
        factor=PowerLawFactor(A, 2.0 - n),
        name=f"schwarzschild(A={A:g})",
    )


def neg_schwarzschild_metric(n: int, A: float, j_max: int = 8) -> RadialMetric:
    """
    Negative-mass Schwarzschild metric (1 - A r^(2-n))^(4/(n-2)) delta.

    The metric degenerates at r_0 = A^(1/(n-2)), which becomes a horn of
    exponent 2/n in arclength coordinates.

    Args:
        n: Dimension
        A: Magnitude of the (negative) mass parameter, A > 0
        j_max: Number of stored modes

    Returns:
        RadialMetric: Metric on (r_0, inf)
    """
    if A <= 0:
        raise ConfigError(f"neg_schwarzschild needs A > 0, got {A}", key="metric.A")
    r0 = A ** (1.0 / (n - 2))
    return RadialMetric(
        n,
        sphere_spectrum(n, j_max),
        ConeWarp(1.0),
        factor=PowerLawFactor(-A, 2.0 - n),
        tip=r0,
        af_start=r0,
        name=f"neg_schwarzschild(A={A:g})",
    )


def glued_metric(
    n: int,
    cone_radius: float = 1.0,
    af_radius: float = 2.0,
    aperture: float = 0.5,
    j_max: int = 8,
) -> RadialMetric:
    """
    Exact cone of slope a for r <= cone_radius, Euclidean for r >= af_radius.

    Args:
        n: Dimension
        cone_radius: End of the cone region
        af_radius: Start of the Euclidean region
        aperture: Cone slope a (a < 1 gives positive scalar curvature)
        j_max: Number of stored modes

    Returns:
        RadialMetric: Glued metric
    """
    warp = GluedWarp(cone_radius, af_radius, aperture)
    return RadialMetric(
        n,
        sphere_spectrum(n, j_max),
        warp,
        af_start=af_radius,
        name=f"glued(a={aperture:g})",
    )


def sampled_metric(
    n: int,
    r: np.ndarray,
    f: np.ndarray,
    u: Optional[np.ndarray] = None,
    spectral: Optional[SpectralData] = None,
    af_start: float = 0.0,
) -> RadialMetric:
    """
    Metric from sampled warp (and optional conformal factor) columns.

    Args:
        n: Dimension
        r: Increasing positive radii
        f: Warp samples
        u: Conformal factor samples, 1 if None
        spectral: Cross-section spectrum, unit sphere if None
        af_start: Start of the AF region

    Returns:
        RadialMetric: Interpolated metric on [r[0], r[-1]]
    """
    r = np.asarray(r, dtype=float)
    if np.any(np.asarray(f) <= 0) or (u is not None and np.any(np.asarray(u) <= 0)):
        raise ConfigError("sampled warp and conformal factor must be positive", key="metric.path")
    spectral = spectral or sphere_spectrum(n, 8)
    factor: BaseProfile = ConstantProfile() if u is None else SampledProfile(r, u)
    return RadialMetric(
        n,
        spectral,
        SampledProfile(r, f),
        factor=factor,
        r_max=float(r[-1]),
        af_start=max(af_start, float(r[0])),
        name="sampled",
    )


# ---------------------------------------------------------------------------
# Curvature of the model cone
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConeConnection:
    """
    Nonzero Levi-Civita data of dr^2 + r^2 g^N in an orthonormal frame.

    Attributes:
        tangent_radial: Coefficient of e_i in nabla_{e_i} d_r
        radial_tangent: Coefficient in nabla_{d_r} e_i
        radial_radial: Coefficient in nabla_{d_r} d_r
        tangent_tangent_radial: Coefficient of d_r in nabla_{e_i} e_j (times delta_ij)
    """

    tangent_radial: float
    radial_tangent: float
    radial_radial: float
    tangent_tangent_radial: float


def _positive_radius(r: float) -> float:
    if not np.all(np.asarray(r) > 0):
        raise ConfigError(f"radius must be positive, got {r}")
    return r


def cone_scalar_curvature(sc_n: float, n: int, r: float) -> float:
    """
    Scalar curvature (Sc_N - (n-1)(n-2)) / r^2 of the cone over N.

    Args:
        sc_n: Scalar curvature of the cross section
        n: Dimension
        r: Radius, r > 0

    Returns:
        float: Scalar curvature at r
    """
    _positive_radius(r)
    return (sc_n - (n - 1) * (n - 2)) / r**2


def cone_ricci(kappa: float, n: int) -> Tuple[float, float]:
    """
    Ricci tensor of the cone over an Einstein cross section Ric_N = kappa g^N.

    Returns:
        Tuple[float, float]: (coefficient of g^N in the tangential part, radial part)
    """
    return kappa - (n - 2), 0.0


def cone_connection(n: int, r: float) -> ConeConnection:
    """Connection coefficients of the model cone at radius r."""
    _positive_radius(r)
    return ConeConnection(
        tangent_radial=1.0 / r,
        radial_tangent=0.0,
        radial_radial=0.0,
        tangent_tangent_radial=-1.0 / r,
    )


def warped_scalar_curvature(m: RadialMetric, r: np.ndarray) -> np.ndarray:
    """
    Scalar curvature of the warped product dr^2 + f(r)^2 g^N.

    Sc = Sc_N / f^2 - 2 (n-1) f''/f - (n-1)(n-2) (f'/f)^2.

    Args:
        m: Metric with trivial conformal factor
        r: Radii inside the domain

    Returns:
        np.ndarray: Scalar curvature samples

    Raises:
        ConfigError: If the metric has a conformal factor or f is not smooth at r
    """
    if not m.is_warped:
        raise ConfigError(
            "warped_scalar_curvature needs a trivial conformal factor; "
            "use conformal.conformal_scalar or to_arclength"
        )
    r = m.check_domain(r)
    f, df, d2f = m.warp.derivatives(r)
    if not (np.all(np.isfinite(f)) and np.all(np.isfinite(df)) and np.all(np.isfinite(d2f))):
        raise ConfigError("warp is not twice differentiable at the requested radius")
    if np.any(f <= 0):
        raise ConfigError("warp must be positive")
    n = m.n
    assert m.cross_section_scalar is not None
    return m.cross_section_scalar / f**2 - 2 * (n - 1) * d2f / f - (n - 1) * (n - 2) * (df / f) ** 2


# ---------------------------------------------------------------------------
# Finite-difference curvature oracle
# ---------------------------------------------------------------------------

_FIRST = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_OFFSETS = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])


def _fd_first(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray, k: int, h: float) -> np.ndarray:
    out = 0.0
    for w, o in zip(_FIRST, _OFFSETS):
        if w == 0.0:
            continue
        shifted = x.copy()
        shifted[k] += o * h
        out = out + w * func(shifted)
    return out / h


def scalar_curvature_fd(
    components: Callable[[np.ndarray], np.ndarray],
    point: np.ndarray,
    steps: np.ndarray,
) -> float:
    """
    Scalar curvature from metric components by 4th-order finite differences.

    Christoffel symbols, their derivatives and the Ricci tensor are built
    from first and second differences of the component matrix.

    Args:
        components: Map from a coordinate vector to the metric matrix
        point: Coordinates of the evaluation point
        steps: Finite-difference step per coordinate

    Returns:
        float: Scalar curvature at the point
    """
    x = np.asarray(point, dtype=float)
    dim = x.size
    g = components(x)
    g_inv = np.linalg.inv(g)

    dg = np.stack([_fd_first(components, x, k, steps[k]) for k in range(dim)])

    d2g = np.empty((dim, dim, dim, dim))
    for k in range(dim):
        def partial_k(y: np.ndarray, k: int = k) -> np.ndarray:
            return _fd_first(components, y, k, steps[k])

        for l in range(k, dim):
            d2g[k, l] = _fd_first(partial_k, x, l, steps[l])
            d2g[l, k] = d2g[k, l]

    # lowered Christoffels: Gamma_{d b c} = (d_b g_dc + d_c g_db - d_d g_bc) / 2
    low = 0.5 * (
        np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - np.einsum("dbc->dbc", dg)
    )
    gamma = np.einsum("ad,dbc->abc", g_inv, low)

    d_low = 0.5 * (
        np.einsum("ebdc->edbc", d2g) + np.einsum("ecdb->edbc", d2g) - d2g
    )
    d_ginv = -np.einsum("ap,epq,qd->ead", g_inv, dg, g_inv)
    # d_gamma[e, a, b, c] = d_e Gamma^a_bc
    d_gamma = np.einsum("ead,dbc->eabc", d_ginv, low) + np.einsum("ad,edbc->eabc", g_inv, d_low)

    ricci = (
        np.einsum("aabd->bd", d_gamma)
        - np.einsum("daba->bd", d_gamma)
        + np.einsum("aae,ebd->bd", gamma, gamma)
        - np.einsum("ade,eba->bd", gamma, gamma)
    )
    return float(np.einsum("bd,bd->", g_inv, ricci))


def metric_components(m: RadialMetric) -> Callable[[np.ndarray], np.ndarray]:
    """
    Component matrix of m in coordinates (r, theta_1, ..., theta_{n-1}).

    The cross section is realized as the round sphere whose scalar
    curvature equals Sc_N, so this is only meaningful for sphere sections.

    Args:
        m: Metric with Sc_N > 0

    Returns:
        Callable: Map from a coordinate vector to the n x n metric matrix
    """
    sc_n = m.cross_section_scalar or 0.0
    if sc_n <= 0:
        raise ConfigError("curvature oracle needs a round-sphere cross section (Sc_N > 0)")
    radius_sq = (m.n - 1) * (m.n - 2) / sc_n
    n = m.n

    def components(x: np.ndarray) -> np.ndarray:
        r = np.array([x[0]])
        f = float(m.warp(r)[0])
        psi = float(m.conformal_weight(r)[0][0])
        diag = np.empty(n)
        diag[0] = 1.0
        prod = radius_sq * f**2
        diag[1] = prod
        for i in range(2, n):
            prod = prod * np.sin(x[i - 1]) ** 2
            diag[i] = prod
        return psi * np.diag(diag)

    return components


def curvature_oracle(m: RadialMetric, r: float, rel_step: float = 1e-4) -> Tuple[float, float]:
    """
    Brute-force scalar curvature of m at radius r.

    Uses 4th-order central differences with step h = rel_step * r (and
    rel_step on the angles) and compares with the step 2h to estimate the
    truncation error.

    Args:
        m: Metric over a round-sphere cross section
        r: Radius inside the domain
        rel_step: Relative radial step

    Returns:
        Tuple[float, float]: (scalar curvature, Richardson error estimate)
    """
    m.check_domain(np.array([r]))
    components = metric_components(m)
    point = np.concatenate([[r], np.full(m.n - 1, 1.0)])
    steps = np.concatenate([[rel_step * (r - m.tip)], np.full(m.n - 1, rel_step)])
    fine = scalar_curvature_fd(components, point, steps)
    coarse = scalar_curvature_fd(components, point, 2.0 * steps)
    return fine, abs(fine - coarse) / 15.0


# ---------------------------------------------------------------------------
# Arclength form and horn exponents
# ---------------------------------------------------------------------------


def log_grid(lo: float, hi: float, points_per_decade: int) -> np.ndarray:
    """Log-spaced grid from lo to hi with the given density."""
    if not 0 < lo < hi:
        raise ConfigError(f"invalid grid range ({lo:g}, {hi:g})")
    count = max(int(round(np.log10(hi / lo) * points_per_decade)), 2) + 1
    return np.exp(np.linspace(np.log(lo), np.log(hi), count))


def _log_trapezoid(t: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Cumulative integral of positive g dt, exact for exponentials in t."""
    lo, hi = g[:-1], g[1:]
    ratio = np.log(hi / lo)
    h = np.diff(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        pieces = np.where(np.abs(ratio) > 1e-10, h * (hi - lo) / ratio, 0.5 * h * (hi + lo))
    return np.concatenate([[0.0], np.cumsum(pieces)])


@dataclass(frozen=True)
class ArclengthSamples:
    """Arclength s from the tip, warped radius F and their derivatives on an r-grid."""

    r: np.ndarray
    s: np.ndarray
    F: np.ndarray
    F_s: np.ndarray
    F_ss: np.ndarray


def arclength_samples(
    m: RadialMetric, x_min: float = 1e-4, x_max: float = 1e2, points_per_decade: int = 400
) -> ArclengthSamples:
    """
    Arclength parametrization of a conformally radial metric.

    s(r) = integral of phi^(2/(n-2)) dr from the tip, F = phi^(2/(n-2)) f.
    The integral from the tip to the first sample is closed with the power
    law read off the first two integrand samples.

    Args:
        m: Metric
        x_min: Smallest offset r - tip
        x_max: Largest offset
        points_per_decade: Grid density

    Returns:
        ArclengthSamples: Samples on the grid
    """
    x_max = min(x_max, m.r_max - m.tip)
    x = log_grid(x_min, x_max, points_per_decade)
    r = m.tip + x
    c = 2.0 / (m.n - 2)
    phi, dphi, d2phi = m.factor.derivatives(r)
    if np.any(phi <= 0):
        raise ConfigError("conformal factor must be positive on the grid")
    f, df, d2f = m.warp.derivatives(r)

    speed = phi**c
    dspeed = c * phi ** (c - 1.0) * dphi
    t = np.log(x)
    integrand = speed * x
    slope = np.log(integrand[1] / integrand[0]) / (t[1] - t[0])
    if slope <= 0:
        raise FitError("arclength diverges at the tip; the end is not a horn")
    s = integrand[0] / slope + _log_trapezoid(t, integrand)

    F = speed * f
    F_r = dspeed * f + speed * df
    d2speed = c * (c - 1.0) * phi ** (c - 2.0) * dphi**2 + c * phi ** (c - 1.0) * d2phi
    F_rr = d2speed * f + 2.0 * dspeed * df + speed * d2f
    F_s = F_r / speed
    F_ss = (F_rr - F_r * dspeed / speed) / speed**2
    return ArclengthSamples(r, s, F, F_s, F_ss)


def to_arclength(
    m: RadialMetric, x_min: float = 1e-4, x_max: float = 1e2, points_per_decade: int = 400
) -> RadialMetric:
    """
    Rewrite a conformally radial metric as ds^2 + F(s)^2 g^N.

    Args:
        m: Metric
        x_min: Smallest offset from the tip
        x_max: Largest offset from the tip
        points_per_decade: Grid density

    Returns:
        RadialMetric: Warped metric in arclength, with sampled warp
    """
    a = arclength_samples(m, x_min, x_max, points_per_decade)
    return RadialMetric(
        m.n,
        m.spectral,
        SampledProfile(a.s, a.F, a.F_s, a.F_ss),
        cross_section_scalar=m.cross_section_scalar,
        conical_order=m.conical_order,
        af_order=m.af_order,
        tip=0.0,
        r_max=float(a.s[-1]),
        name=f"{m.name}[arclength]",
    )


def horn_fit(
    m: RadialMetric,
    x_min: float = 1e-4,
    points_per_decade: int = 400,
    threshold: float = 1e-3,
) -> PowerLawFit:
    """
    Fit F ~ c s^b near the degenerate end in arclength coordinates.

    The fit uses the innermost decade of arclength samples.

    Args:
        m: Metric degenerating at its tip
        x_min: Smallest offset from the tip
        points_per_decade: Grid density
        threshold: Largest admissible rms residual of the log-log fit

    Returns:
        PowerLawFit: Exponent b with coefficient and residual

    Raises:
        FitError: If the end is not a horn (F does not vanish or the fit is poor)
    """
    a = arclength_samples(m, x_min, x_min * 1e6, points_per_decade)
    window = (a.s[0], a.s[0] * 10.0)
    fit = power_law_fit(a.s, a.F, window=window)
    if fit.exponent <= 0:
        raise FitError(f"warp does not vanish at the tip (b = {fit.exponent:g}); not a horn")
    if fit.residual > threshold:
        raise FitError(
            f"horn fit residual {fit.residual:.3g} exceeds {threshold:g}; not a horn"
        )
    return fit


def horn_exponent_fit(m: RadialMetric, **kwargs: float) -> float:
    """
    Horn exponent b of the degenerate end of m.

    Args:
        m: Metric degenerating at its tip
        **kwargs: Passed to horn_fit

    Returns:
        float: Fitted exponent b (1 for a cone, 2/n for negative-mass Schwarzschild)
    """
    return horn_fit(m, **kwargs).exponent  # type: ignore[arg-type]
