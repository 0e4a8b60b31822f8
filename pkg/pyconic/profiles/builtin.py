"""
Closed-form warps, conformal factors and potentials.
"""

import numpy as np

from pyconic.exceptions import ConfigError
from pyconic.profiles.base import BaseProfile, Derivatives
from pyconic.utils.ramps import smoothstep_derivatives


class ConeWarp(BaseProfile):
    """
    Cone warp f(r) = a r.

    Args:
        aperture: Slope a of the warp, a = 1 is the model cone
    """

    def __init__(self, aperture: float = 1.0):
        if aperture <= 0:
            raise ConfigError("cone aperture must be positive", key="metric.aperture")
        self.aperture = float(aperture)

    def derivatives(self, r: np.ndarray) -> Derivatives:
        r = np.asarray(r, dtype=float)
        return self.aperture * r, np.full_like(r, self.aperture), np.zeros_like(r)


class HornWarp(BaseProfile):
    """
    Horn warp f(r) = c r^b.

    Args:
        b: Horn exponent, 0 < b < 2
        coefficient: Leading coefficient c
    """

    def __init__(self, b: float, coefficient: float = 1.0):
        if not 0 < b < 2:
            raise ConfigError(f"horn exponent b must lie in (0, 2), got {b}", key="metric.b")
        if coefficient <= 0:
            raise ConfigError("horn coefficient must be positive", key="metric.coefficient")
        self.b = float(b)
        self.coefficient = float(coefficient)

    def derivatives(self, r: np.ndarray) -> Derivatives:
        r = np.asarray(r, dtype=float)
        b, c = self.b, self.coefficient
        v = c * r**b
        return v, b * v / r, b * (b - 1.0) * v / r**2


class GluedWarp(BaseProfile):
    """
    Warp equal to a r for r <= r_c and to r for r >= r_af.

    The slope is blended by the C^2 quintic ramp,
    f = r (a + (1 - a) S((r - r_c) / (r_af - r_c))).

    Args:
        cone_radius: End of the exact cone region
        af_radius: Start of the exactly Euclidean region
        aperture: Cone slope a
    """

    def __init__(self, cone_radius: float = 1.0, af_radius: float = 2.0, aperture: float = 0.5):
        if cone_radius <= 0 or af_radius <= cone_radius:
            raise ConfigError(
                "glued metric needs 0 < cone_radius < af_radius", key="metric.af_radius"
            )
        if aperture <= 0:
            raise ConfigError("glued aperture must be positive", key="metric.aperture")
        self.cone_radius = float(cone_radius)
        self.af_radius = float(af_radius)
        self.aperture = float(aperture)

    def derivatives(self, r: np.ndarray) -> Derivatives:
        r = np.asarray(r, dtype=float)
        width = self.af_radius - self.cone_radius
        s, ds, d2s = smoothstep_derivatives((r - self.cone_radius) / width)
        a = self.aperture
        slope = a + (1.0 - a) * s
        dslope = (1.0 - a) * ds / width
        d2slope = (1.0 - a) * d2s / width**2
        return r * slope, slope + r * dslope, 2.0 * dslope + r * d2slope


class PowerLawFactor(BaseProfile):
    """
    Conformal factor 1 + A r^p (Schwarzschild-type for p = 2 - n).

    Args:
        coefficient: A, any sign
        exponent: p
        constant: Additive constant, 1 by default
    """

    def __init__(self, coefficient: float, exponent: float, constant: float = 1.0):
        self.coefficient = float(coefficient)
        self.exponent = float(exponent)
        self.constant = float(constant)

    def derivatives(self, r: np.ndarray) -> Derivatives:
        r = np.asarray(r, dtype=float)
        a, p = self.coefficient, self.exponent
        term = a * r**p
        return self.constant + term, p * term / r, p * (p - 1.0) * term / r**2

    def is_constant(self) -> bool:
        return self.coefficient == 0.0


class BumpProfile(BaseProfile):
    """
    Compactly supported C^2 bump amplitude * (1 - ((r - c)/w)^2)^3.

    Args:
        amplitude: Peak value (negative for a nonpositive potential)
        center: Center c of the support
        width: Half-width w of the support
    """

    def __init__(self, amplitude: float = 1.0, center: float = 1.5, width: float = 0.5):
        if width <= 0 or center - width <= 0:
            raise ConfigError(
                "bump support must be a compact annulus away from r = 0",
                key="potential.width",
            )
        self.amplitude = float(amplitude)
        self.center = float(center)
        self.width = float(width)

    @property
    def support(self) -> tuple:
        return self.center - self.width, self.center + self.width

    def derivatives(self, r: np.ndarray) -> Derivatives:
        r = np.asarray(r, dtype=float)
        w = self.width
        z = (r - self.center) / w
        inside = np.abs(z) < 1.0
        q = np.where(inside, 1.0 - z**2, 0.0)
        a = self.amplitude
        v = a * q**3
        d1 = a * 3.0 * q**2 * (-2.0 * z) / w
        d2 = a * (6.0 * q * 4.0 * z**2 - 6.0 * q**2) / w**2
        return v, np.where(inside, d1, 0.0), np.where(inside, d2, 0.0)
