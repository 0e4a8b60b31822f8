"""
Base classes for radial profiles (warps, conformal factors, potentials).
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from pyconic.exceptions import ConfigError

Derivatives = Tuple[np.ndarray, np.ndarray, np.ndarray]


@dataclass(frozen=True)
class RadialFunction:
    """
    A scalar function of r sampled on a strictly increasing grid.

    Attributes:
        r: Sample radii
        values: Function values
        d1: First derivative in r
        d2: Second derivative in r
    """

    r: np.ndarray
    values: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    def __post_init__(self) -> None:
        r = np.asarray(self.r, dtype=float)
        if r.ndim != 1 or r.size < 3:
            raise ConfigError("RadialFunction needs a 1-d grid with at least 3 samples")
        if np.any(np.diff(r) <= 0):
            raise ConfigError("RadialFunction grid must be strictly increasing")
        for name in ("values", "d1", "d2"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != r.shape:
                raise ConfigError(f"RadialFunction.{name} does not match the grid shape")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "r", r)

    @classmethod
    def from_samples(
        cls,
        r: np.ndarray,
        values: np.ndarray,
        d1: Optional[np.ndarray] = None,
        d2: Optional[np.ndarray] = None,
    ) -> "RadialFunction":
        """
        Build a RadialFunction, filling missing derivatives by finite differences.

        Args:
            r: Sample radii
            values: Function values
            d1: First derivative samples, estimated if None
            d2: Second derivative samples, estimated if None

        Returns:
            RadialFunction: The sampled function
        """
        r = np.asarray(r, dtype=float)
        values = np.asarray(values, dtype=float)
        if d1 is None:
            d1 = np.gradient(values, r, edge_order=2)
        if d2 is None:
            d2 = np.gradient(np.asarray(d1, dtype=float), r, edge_order=2)
        return cls(r, values, np.asarray(d1, dtype=float), np.asarray(d2, dtype=float))

    def __len__(self) -> int:
        return int(self.r.size)

    def scale(self, c: float) -> "RadialFunction":
        """Return c times this function."""
        return RadialFunction(self.r, c * self.values, c * self.d1, c * self.d2)

    def shift(self, offset: float) -> "RadialFunction":
        """Return this function plus a constant."""
        return RadialFunction(self.r, self.values + offset, self.d1, self.d2)

    def window(self, r_a: float, r_b: float) -> np.ndarray:
        """Boolean mask of samples with r_a <= r <= r_b."""
        return (self.r >= r_a) & (self.r <= r_b)


class BaseProfile(ABC):
    """
    Abstract base class for a smooth function of the radial coordinate.

    Subclasses implement `derivatives`, returning values with first and
    second derivatives so that curvature and solver code never has to
    difference a closed-form profile numerically.
    """

    @abstractmethod
    def derivatives(self, r: np.ndarray) -> Derivatives:
        """
        Evaluate the profile and its first two derivatives.

        Args:
            r: Radii

        Returns:
            Tuple[np.ndarray, np.ndarray, np.ndarray]: (value, d/dr, d^2/dr^2)
        """
        pass

    def __call__(self, r: Union[float, np.ndarray]) -> np.ndarray:
        return self.derivatives(np.asarray(r, dtype=float))[0]

    def sample(self, r: np.ndarray) -> RadialFunction:
        """Sample the profile on a grid."""
        r = np.asarray(r, dtype=float)
        v, d1, d2 = self.derivatives(r)
        return RadialFunction(r, v, d1, d2)

    def is_constant(self) -> bool:
        """Whether the profile is a known constant."""
        return False


class ConstantProfile(BaseProfile):
    """A constant profile (the trivial conformal factor by default)."""

    def __init__(self, value: float = 1.0):
        self.value = float(value)

    def derivatives(self, r: np.ndarray) -> Derivatives:
        r = np.asarray(r, dtype=float)
        return np.full_like(r, self.value), np.zeros_like(r), np.zeros_like(r)

    def is_constant(self) -> bool:
        return True

    def __repr__(self) -> str:
        return f"ConstantProfile({self.value!r})"


class SampledProfile(BaseProfile):
    """
    Profile interpolated from samples.

    Values are interpolated by a cubic Hermite spline through the first
    derivative samples, first derivatives by a Hermite spline through the
    second derivative samples, so all three reproduce the samples exactly
    at the nodes.

    Args:
        r: Strictly increasing sample radii
        values: Profile values
        d1: First derivatives, estimated by finite differences if None
        d2: Second derivatives, estimated by finite differences if None
    """

    def __init__(
        self,
        r: np.ndarray,
        values: np.ndarray,
        d1: Optional[np.ndarray] = None,
        d2: Optional[np.ndarray] = None,
    ):
        self.samples = RadialFunction.from_samples(r, values, d1, d2)
        s = self.samples
        self._value_spline = CubicHermiteSpline(s.r, s.values, s.d1)
        self._slope_spline = CubicHermiteSpline(s.r, s.d1, s.d2)
        self._curvature_spline = self._slope_spline.derivative()

    @classmethod
    def from_function(cls, u: RadialFunction) -> "SampledProfile":
        return cls(u.r, u.values, u.d1, u.d2)

    @property
    def r_min(self) -> float:
        return float(self.samples.r[0])

    @property
    def r_max(self) -> float:
        return float(self.samples.r[-1])

    def derivatives(self, r: np.ndarray) -> Derivatives:
        r = np.asarray(r, dtype=float)
        span = self.r_max - self.r_min
        if np.any(r < self.r_min - 1e-12 * span) or np.any(r > self.r_max + 1e-12 * span):
            raise ConfigError(
                f"radius outside sampled range [{self.r_min:g}, {self.r_max:g}]"
            )
        r = np.clip(r, self.r_min, self.r_max)
        return (
            self._value_spline(r),
            self._slope_spline(r),
            self._curvature_spline(r),
        )


class ProductProfile(BaseProfile):
    """Pointwise product of two profiles."""

    def __init__(self, first: BaseProfile, second: BaseProfile):
        self.first = first
        self.second = second

    def derivatives(self, r: np.ndarray) -> Derivatives:
        a, a1, a2 = self.first.derivatives(r)
        b, b1, b2 = self.second.derivatives(r)
        return a * b, a1 * b + a * b1, a2 * b + 2.0 * a1 * b1 + a * b2

    def is_constant(self) -> bool:
        return self.first.is_constant() and self.second.is_constant()


class ScaledProfile(BaseProfile):
    """
    The profile r -> outer * base(r / inner).

    Args:
        base: Profile being rescaled
        outer: Multiplier of the values
        inner: Divisor of the argument
    """

    def __init__(self, base: BaseProfile, outer: float = 1.0, inner: float = 1.0):
        if inner <= 0:
            raise ConfigError("ScaledProfile inner scale must be positive")
        self.base = base
        self.outer = float(outer)
        self.inner = float(inner)

    def derivatives(self, r: np.ndarray) -> Derivatives:
        v, d1, d2 = self.base.derivatives(np.asarray(r, dtype=float) / self.inner)
        c, k = self.outer, self.inner
        return c * v, c * d1 / k, c * d2 / k**2

    def is_constant(self) -> bool:
        return self.base.is_constant()


def as_profile(obj: Union[None, float, BaseProfile, RadialFunction]) -> Optional[BaseProfile]:
    """
    Coerce a number, RadialFunction or profile into a BaseProfile.

    Args:
        obj: Object to convert; None is passed through

    Returns:
        Optional[BaseProfile]: Equivalent profile
    """
    if obj is None or isinstance(obj, BaseProfile):
        return obj
    if isinstance(obj, RadialFunction):
        return SampledProfile.from_function(obj)
    if np.isscalar(obj):
        return ConstantProfile(float(obj))  # type: ignore[arg-type]
    raise ConfigError(f"cannot interpret {type(obj).__name__} as a radial profile")
