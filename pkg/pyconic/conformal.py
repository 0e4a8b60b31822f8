"""
Conformal changes, the blow-up of a conical tip and mean curvature of slices.

A Green-type harmonic function u ~ r^(2-n) turns the conical tip of g into
an infinite conical end of u_delta^(4/(n-2)) g, where u_delta = 1 + delta (u - 1).
In the coordinate s = delta^(2/(n-2)) / r the blown-up metric reads
Psi(s) (ds^2 + F(s)^2 g^N) with Psi -> 1 and F ~ a s as s -> infinity.
"""

import warnings
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from pyconic.cone_geometry import RadialMetric
from pyconic.exceptions import ConfigError, FitError
from pyconic.profiles.base import BaseProfile, ProductProfile, RadialFunction, SampledProfile
from pyconic.utils.fitting import power_law_fit

CUT_DEVIATION = 1e-2
CUT_CONCAVITY = 1e-3
ALPHA_MARGIN = 1e-2


def _total_factor(m: RadialMetric, factor: Optional[BaseProfile]) -> BaseProfile:
    return m.factor if factor is None else ProductProfile(m.factor, factor)


def conformal_scalar(
    m: RadialMetric, r: np.ndarray, factor: Optional[BaseProfile] = None
) -> np.ndarray:
    """
    Scalar curvature of Phi^(4/(n-2)) (dr^2 + f^2 g^N) by the conformal law.

    Phi is the conformal factor of m, multiplied by ``factor`` when given.
    Sc = 4(n-1)/(n-2) Phi^(-(n+2)/(n-2)) (-Delta Phi + (n-2)/(4(n-1)) Sc_0 Phi),
    with Delta and Sc_0 those of the warped product dr^2 + f^2 g^N.

    Args:
        m: Metric supplying the warp and cross section
        r: Radii inside the domain
        factor: Additional conformal factor u (the harmonic function)

    Returns:
        np.ndarray: Scalar curvature samples

    Raises:
        ConfigError: If the total conformal factor is not positive
    """
    r = m.check_domain(np.atleast_1d(r))
    n = m.n
    phi, dphi, d2phi = _total_factor(m, factor).derivatives(r)
    if np.any(phi <= 0):
        raise ConfigError("conformal factor must be positive")
    f, df, d2f = m.warp.derivatives(r)
    assert m.cross_section_scalar is not None
    sc_base = (
        m.cross_section_scalar / f**2
        - 2 * (n - 1) * d2f / f
        - (n - 1) * (n - 2) * (df / f) ** 2
    )
    laplacian = d2phi + (n - 1) * (df / f) * dphi
    c = 4.0 * (n - 1) / (n - 2)
    return c * phi ** (-(n + 2.0) / (n - 2)) * (-laplacian + sc_base * phi / c)


def conformal_metric(m: RadialMetric, factor: BaseProfile, name: Optional[str] = None) -> RadialMetric:
    """The metric factor^(4/(n-2)) g in the same coordinate."""
    return m.with_factor(ProductProfile(m.factor, factor), name=name or f"{m.name}[conformal]")


def conformal_flip(
    r: np.ndarray,
    warp: np.ndarray,
    factor: np.ndarray,
    delta: float,
    n: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Rewrite U^(4/(n-2)) (dr^2 + f^2 g^N) in the coordinate s = delta^(2/(n-2)) / r.

    The result is U_s^(4/(n-2)) (ds^2 + F^2 g^N) with F = f s^2 / c and
    U_s = U r^(n-2) / delta, where c = delta^(2/(n-2)). Applying the flip
    twice with the same delta returns the input samples.

    Args:
        r: Increasing positive radii
        warp: Warp samples f(r)
        factor: Conformal factor samples U(r)
        delta: Positive blow-up parameter
        n: Dimension

    Returns:
        Tuple[np.ndarray, np.ndarray, np.ndarray]: (s, F, U_s), increasing in s
    """
    if delta <= 0:
        raise ConfigError(f"delta must be positive, got {delta}", key="blowup.deltas")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ConfigError("flip needs positive radii")
    c = delta ** (2.0 / (n - 2))
    s = c / r
    F = np.asarray(warp, dtype=float) * s**2 / c
    U = np.asarray(factor, dtype=float) * r ** (n - 2) / delta
    return s[::-1], F[::-1], U[::-1]


def _mean_curvature(
    n: int,
    f: np.ndarray,
    df: np.ndarray,
    psi: np.ndarray,
    dpsi: np.ndarray,
    sign: float,
) -> np.ndarray:
    if np.any(f <= 0) or not np.all(np.isfinite(df)):
        raise ConfigError("degenerate warp at the slice")
    return sign * (n - 1) * psi ** -0.5 * (df / f + 0.5 * dpsi / psi)


@dataclass(frozen=True)
class CutSlice:
    """
    Slice {s = s0} chosen for cutting the blown-up end.

    Attributes:
        s0: Slice coordinate (nan if no slice qualifies)
        mean_curvature: H(s0) for the normal toward the AF end
        scaled_curvature: H(s0) * s0
        deviation: Deviation of the metric from the exact cone at s0
        mean_concave: Whether H(s0) < 0
    """

    s0: float
    mean_curvature: float
    scaled_curvature: float
    deviation: float
    mean_concave: bool


@dataclass(frozen=True)
class BlowUpResult:
    """
    The blown-up metric g_delta in the coordinate s.

    Attributes:
        delta: Blow-up parameter
        n: Dimension
        s: Increasing s samples
        r: Radii corresponding to s
        warp: F(s) samples
        factor: Conformal factor U_s samples in the s coordinate
        metric: g_delta as a conformally radial metric in s
        af_metric: g_delta in the original coordinate r (its AF end)
        aperture: Slope a of the limiting cone ds^2 + a^2 s^2 g^N
        deviation: max(|Psi - 1|, |Psi F^2/(a s)^2 - 1|) per sample
        mean_curvature: H(s) per sample, normal toward decreasing s
        decay_exponent: Fitted decay rate of the deviation as s -> infinity
        decay_residual: Residual of that fit
        alpha_prime: Required decay rate min(1, alpha) (1 - 10^-2)
        cut: Selected cut slice
    """

    delta: float
    n: int
    s: np.ndarray
    r: np.ndarray
    warp: np.ndarray
    factor: np.ndarray
    metric: RadialMetric
    af_metric: RadialMetric
    aperture: float
    deviation: np.ndarray
    mean_curvature: np.ndarray
    decay_exponent: float
    decay_residual: float
    alpha_prime: float
    cut: CutSlice

    @property
    def decays_to_cone(self) -> bool:
        return self.decay_exponent >= self.alpha_prime

    def rows(self) -> List[Tuple[float, float, float, float, float]]:
        """(s, F, U_s, deviation, H) rows for CSV export."""
        return [
            (float(a), float(b), float(c), float(d), float(e))
            for a, b, c, d, e in zip(
                self.s, self.warp, self.factor, self.deviation, self.mean_curvature
            )
        ]


def blow_up(m: RadialMetric, delta: float, u: RadialFunction) -> BlowUpResult:
    """
    Blow up the conical tip of m with the Green-type harmonic function u.

    Forms u_delta = 1 + delta (u - 1), flips to s = delta^(2/(n-2)) / r with
    analytic derivatives, measures the decay of the flipped metric towards
    the limiting cone on the outermost s-decade and selects a cut slice.

    Args:
        m: Metric with a conical tip at r = 0
        delta: Positive blow-up parameter
        u: Green-type harmonic function from green_harmonic

    Returns:
        BlowUpResult: The blown-up metric and its diagnostics

    Raises:
        ConfigError: If delta <= 0 or u is not strictly greater than 1
    """
    if delta <= 0:
        raise ConfigError(f"delta must be positive, got {delta}", key="blowup.deltas")
    if np.min(u.values) <= 1.0:
        raise ConfigError("blow-up needs a harmonic function strictly greater than 1")
    if m.tip != 0.0:
        raise ConfigError("blow-up needs a conical tip at r = 0")
    n = m.n
    r = u.r
    c = delta ** (2.0 / (n - 2))

    ud = 1.0 + delta * (u.values - 1.0)
    ud1 = delta * u.d1
    ud2 = delta * u.d2
    phi, dphi, d2phi = m.factor.derivatives(r)
    U = phi * ud
    U1 = dphi * ud + phi * ud1
    U2 = d2phi * ud + 2.0 * dphi * ud1 + phi * ud2

    # G(r) = U r^(n-2) / delta is the conformal factor in the s coordinate
    p = n - 2
    G = U * r**p / delta
    G1 = (U1 * r**p + p * U * r ** (p - 1)) / delta
    G2 = (U2 * r**p + 2 * p * U1 * r ** (p - 1) + p * (p - 1) * U * r ** (p - 2)) / delta

    f, df, d2f = m.warp.derivatives(r)
    s = c / r
    F = f * s**2 / c
    F_s = -df + 2.0 * f / r
    F_ss = -(r / s) * (-d2f + 2.0 * df / r - 2.0 * f / r**2)
    G_s = -(r / s) * G1
    G_ss = r**2 * (2.0 * r * G1 + r**2 * G2) / c**2

    order = np.argsort(s)
    s, r_s = s[order], r[order]
    F, F_s, F_ss = F[order], F_s[order], F_ss[order]
    G, G_s, G_ss = G[order], G_s[order], G_ss[order]

    metric = RadialMetric(
        n,
        m.spectral,
        SampledProfile(s, F, F_s, F_ss),
        factor=SampledProfile(s, G, G_s, G_ss),
        cross_section_scalar=m.cross_section_scalar,
        conical_order=m.conical_order,
        af_order=m.af_order,
        r_max=float(s[-1]),
        name=f"{m.name}[blowup delta={delta:g}]",
    )
    af_metric = conformal_metric(
        m,
        SampledProfile(r, ud, ud1, ud2),
        name=f"{m.name}[delta={delta:g}]",
    )
    af_metric = replace(af_metric, r_max=min(m.r_max, float(np.max(r))))

    aperture = float(f[0] / r[0])
    psi = G ** metric.conformal_power
    dpsi = metric.conformal_power * G ** (metric.conformal_power - 1.0) * G_s
    deviation = np.maximum(
        np.abs(psi - 1.0), np.abs(psi * F**2 / (aperture * s) ** 2 - 1.0)
    )
    H = _mean_curvature(n, F, F_s, psi, dpsi, sign=-1.0)

    outer = (s[-1] / 10.0, s[-1])
    try:
        fit = power_law_fit(s, deviation, window=outer)
        decay, decay_res = -fit.exponent, fit.residual
    except FitError:
        # deviation vanishes on the outer decade: the tip is exactly conical
        decay, decay_res = float("inf"), 0.0
    alpha_prime = min(1.0, m.conical_order) * (1.0 - ALPHA_MARGIN)
    if decay < alpha_prime:
        warnings.warn(
            f"blown-up metric approaches the cone at rate {decay:.4g} < alpha' = {alpha_prime:.4g}"
        )

    result = BlowUpResult(
        delta=float(delta),
        n=n,
        s=s,
        r=r_s,
        warp=F,
        factor=G,
        metric=metric,
        af_metric=af_metric,
        aperture=aperture,
        deviation=deviation,
        mean_curvature=H,
        decay_exponent=float(decay),
        decay_residual=float(decay_res),
        alpha_prime=alpha_prime,
        cut=CutSlice(float("nan"), float("nan"), float("nan"), float("nan"), False),
    )
    return _with_cut(result)


def _with_cut(b: BlowUpResult) -> BlowUpResult:
    return replace(b, cut=select_cut_slice(b))


def select_cut_slice(
    b: BlowUpResult,
    max_deviation: float = CUT_DEVIATION,
    concavity: float = CUT_CONCAVITY,
) -> CutSlice:
    """
    Smallest s0 such that every sample s >= s0 has H < -concavity/s and deviation < max_deviation.

    Args:
        b: Blow-up result
        max_deviation: Largest admitted deviation from the limiting cone
        concavity: Required margin of H * s below zero

    Returns:
        CutSlice: The selected slice, with s0 = nan if none qualifies
    """
    ok = (b.mean_curvature < -concavity / b.s) & (b.deviation < max_deviation)
    bad = np.flatnonzero(~ok)
    start = 0 if bad.size == 0 else int(bad[-1]) + 1
    if start >= ok.size:
        return CutSlice(float("nan"), float("nan"), float("nan"), float("nan"), False)
    s0 = float(b.s[start])
    H = float(b.mean_curvature[start])
    return CutSlice(s0, H, H * s0, float(b.deviation[start]), H < 0)


def slice_mean_curvature(b: Union[BlowUpResult, RadialMetric], s0: float) -> float:
    """
    Mean curvature of the slice {s = s0}.

    For a BlowUpResult the normal points toward the AF end (decreasing s),
    so an exact cone gives H = -(n-1)/s0. For a RadialMetric the normal
    points toward increasing r, so a Euclidean sphere gives +(n-1)/r.

    Args:
        b: Blow-up result or metric
        s0: Slice coordinate inside the grid

    Returns:
        float: H(s0)

    Raises:
        ConfigError: If s0 is outside the domain or the warp degenerates there
    """
    m, sign = (b.metric, -1.0) if isinstance(b, BlowUpResult) else (b, 1.0)
    point = m.check_domain(np.array([s0]))
    f, df, _ = m.warp.derivatives(point)
    psi, dpsi, _ = m.conformal_weight(point)
    return float(_mean_curvature(m.n, f, df, psi, dpsi, sign)[0])


def area_variation_oracle(
    b: Union[BlowUpResult, RadialMetric], s0: float, rel_step: float = 1e-4
) -> float:
    """
    Mean curvature from the first variation of slice area by central differences.

    The area of {s} per unit cross-section volume is Psi^((n-1)/2) F^(n-1);
    H is its logarithmic derivative along the unit normal.
    """
    m, sign = (b.metric, -1.0) if isinstance(b, BlowUpResult) else (b, 1.0)
    h = rel_step * (s0 - m.tip)
    points = m.check_domain(np.array([s0 - h, s0, s0 + h]))
    f = m.warp(points)
    psi = m.conformal_weight(points)[0]
    log_area = (m.n - 1) * (0.5 * np.log(psi) + np.log(f))
    return float(sign * (log_area[2] - log_area[0]) / (2.0 * h) / np.sqrt(psi[1]))


def blow_up_family(
    m: RadialMetric, deltas: Sequence[float], u: RadialFunction
) -> List[BlowUpResult]:
    """Blow-ups of m for several values of delta."""
    return [blow_up(m, d, u) for d in deltas]
