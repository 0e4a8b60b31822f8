"""
Spectral data of the closed cross section (N, g^N) of a cone.
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb, gamma

from pyconic.exceptions import ConfigError


@dataclass(frozen=True)
class SpectralData:
    """
    Laplace spectrum of a closed cross section.

    Eigenfunctions are never stored; downstream code only consumes the
    eigenvalues and multiplicities. Where a coefficient of an eigenfunction
    is reported, the eigenfunction is taken with unit L^2(N) norm.

    Attributes:
        n: Dimension of the cone (cross section has dimension n - 1)
        eigenvalues: Distinct eigenvalues lambda_0 < lambda_1 < ...
        multiplicities: Multiplicity of each eigenvalue
        ricci_lower_bound: Largest known kappa with Ric >= kappa g^N, or None
        is_round_unit_sphere: Whether N is the round unit sphere
        sphere_radius: Radius a when N is a round sphere of radius a, else None
    """

    n: int
    eigenvalues: Tuple[float, ...]
    multiplicities: Tuple[int, ...]
    ricci_lower_bound: Optional[float] = None
    is_round_unit_sphere: bool = False
    sphere_radius: Optional[float] = None

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 3:
            raise ConfigError(f"ambient dimension n must be an integer >= 3, got {self.n}")
        if len(self.eigenvalues) != len(self.multiplicities):
            raise ConfigError("eigenvalues and multiplicities differ in length")
        if len(self.eigenvalues) == 0:
            raise ConfigError("spectral data needs at least one eigenvalue")
        object.__setattr__(self, "eigenvalues", tuple(float(v) for v in self.eigenvalues))
        object.__setattr__(self, "multiplicities", tuple(int(m) for m in self.multiplicities))

    @classmethod
    def from_table(
        cls,
        n: int,
        table: Iterable[Dict[str, Any]],
        ricci_lower_bound: Optional[float] = None,
    ) -> "SpectralData":
        """
        Build spectral data from rows {"lambda": ..., "multiplicity": ...}.

        Args:
            n: Cone dimension
            table: Eigenvalue rows
            ricci_lower_bound: Known Ricci lower bound of N

        Returns:
            SpectralData: Spectral data (not validated; see validate_spectrum)
        """
        eigenvalues: List[float] = []
        multiplicities: List[int] = []
        for i, row in enumerate(table):
            unknown = set(row) - {"lambda", "multiplicity"}
            if unknown:
                raise ConfigError(
                    f"unknown key {sorted(unknown)[0]!r} in eigenvalue row {i}",
                    key=f"spectrum.eigenvalues[{i}]",
                )
            try:
                eigenvalues.append(float(row["lambda"]))
                multiplicities.append(int(row.get("multiplicity", 1)))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(
                    f"malformed eigenvalue row {i}", key=f"spectrum.eigenvalues[{i}]"
                ) from exc
        return cls(n, tuple(eigenvalues), tuple(multiplicities), ricci_lower_bound)

    @property
    def pairs(self) -> List[Tuple[float, int]]:
        """(lambda_j, multiplicity) pairs."""
        return list(zip(self.eigenvalues, self.multiplicities))

    @property
    def j_max(self) -> int:
        return len(self.eigenvalues) - 1

    @property
    def first_nonzero(self) -> Optional[float]:
        """lambda_1, or None when only the constant mode is stored."""
        return self.eigenvalues[1] if len(self.eigenvalues) > 1 else None

    @property
    def volume(self) -> float:
        """Volume of N: a^(n-1) vol(S^(n-1)) for round spheres, else 1."""
        if self.sphere_radius is None:
            return 1.0
        return self.sphere_radius ** (self.n - 1) * unit_sphere_volume(self.n)

    @property
    def scalar_curvature(self) -> Optional[float]:
        """Scalar curvature of N when N is a round sphere."""
        if self.sphere_radius is None:
            return None
        return (self.n - 1) * (self.n - 2) / self.sphere_radius**2

    def eigenvalue(self, j: int) -> float:
        if not 0 <= j < len(self.eigenvalues):
            raise ConfigError(f"mode {j} outside the stored spectrum (j_max = {self.j_max})")
        return self.eigenvalues[j]


def unit_sphere_volume(n: int) -> float:
    """Volume of the unit sphere S^(n-1) in R^n, 2 pi^(n/2) / Gamma(n/2)."""
    return float(2.0 * np.pi ** (n / 2.0) / gamma(n / 2.0))


def sphere_multiplicity(n: int, j: int) -> int:
    """Dimension of degree-j spherical harmonics on S^(n-1)."""
    return int(comb(n + j - 1, j, exact=True) - comb(n + j - 3, j - 2, exact=True))


def sphere_spectrum(n: int, j_max: int, radius: float = 1.0) -> SpectralData:
    """
    Spectrum of the round sphere S^(n-1) of the given radius.

    Args:
        n: Cone dimension, n >= 3
        j_max: Largest mode index kept
        radius: Sphere radius a; eigenvalues scale as a^-2

    Returns:
        SpectralData: lambda_j = j (n - 2 + j) / a^2 with harmonic multiplicities

    Raises:
        ConfigError: If n < 3, j_max < 0 or radius <= 0
    """
    if int(n) != n or n < 3:
        raise ConfigError(f"sphere_spectrum needs integer n >= 3, got {n}", key="n")
    if int(j_max) != j_max or j_max < 0:
        raise ConfigError(f"j_max must be a nonnegative integer, got {j_max}", key="j_max")
    if radius <= 0:
        raise ConfigError("sphere radius must be positive", key="spectrum.radius")
    n, j_max = int(n), int(j_max)
    unit = radius == 1.0
    scale = 1.0 if unit else 1.0 / radius**2
    eigenvalues = tuple(float(j * (n - 2 + j)) * scale for j in range(j_max + 1))
    multiplicities = tuple(sphere_multiplicity(n, j) for j in range(j_max + 1))
    return SpectralData(
        n=n,
        eigenvalues=eigenvalues,
        multiplicities=multiplicities,
        ricci_lower_bound=(n - 2) * scale,
        is_round_unit_sphere=unit,
        sphere_radius=float(radius),
    )


def lichnerowicz_bound(n: int, kappa: float) -> float:
    """
    Lower bound (n-1) kappa / (n-2) on lambda_1 when Ric_N >= kappa g^N, kappa > 0.

    Args:
        n: Cone dimension
        kappa: Ricci lower bound of the (n-1)-dimensional cross section

    Returns:
        float: Lichnerowicz bound
    """
    if n < 3:
        raise ConfigError(f"n must be >= 3, got {n}", key="n")
    return (n - 1) * kappa / (n - 2)


def lichnerowicz_floor(n: int) -> float:
    """
    Minimum admissible lambda_1 under Ric_N >= (n - 2) g^N, namely n - 1.

    Args:
        n: Cone dimension, n >= 3

    Returns:
        float: n - 1
    """
    return lichnerowicz_bound(n, n - 2.0)


def violates_lichnerowicz(s: SpectralData, tol: float = 1e-12) -> bool:
    """Whether s claims Ric_N >= (n-2) g^N but has lambda_1 below n - 1."""
    kappa = s.ricci_lower_bound
    lam1 = s.first_nonzero
    if kappa is None or lam1 is None or kappa <= 0:
        return False
    return lam1 < lichnerowicz_bound(s.n, kappa) * (1.0 - tol)


def is_obata_equality(s: SpectralData, tol: float = 1e-12) -> bool:
    """Whether lambda_1 attains the Lichnerowicz floor (the round-sphere case)."""
    kappa = s.ricci_lower_bound
    lam1 = s.first_nonzero
    if kappa is None or lam1 is None or kappa <= 0:
        return False
    floor = lichnerowicz_bound(s.n, kappa)
    return abs(lam1 - floor) <= tol * max(1.0, floor)


def validate_spectrum(s: SpectralData) -> List[str]:
    """
    Check the invariants of spectral data.

    Args:
        s: Spectral data

    Returns:
        List[str]: Violations found; an empty list means the data is consistent
    """
    violations: List[str] = []
    lam = np.asarray(s.eigenvalues, dtype=float)
    if lam[0] != 0.0:
        violations.append(f"lambda_0 = {lam[0]:g} != 0")
    elif s.multiplicities[0] != 1:
        violations.append("lambda_0 must have multiplicity 1 (connected cross section)")
    if np.any(lam < 0):
        violations.append("negative eigenvalue")
    if np.any(np.diff(lam) <= 0):
        violations.append("eigenvalues not strictly increasing")
    if any(m < 1 for m in s.multiplicities):
        violations.append("multiplicities must be positive")
    if s.is_round_unit_sphere:
        expected = np.array([j * (s.n - 2 + j) for j in range(lam.size)], dtype=float)
        if not np.array_equal(lam, expected):
            violations.append("round unit sphere eigenvalues differ from j(n-2+j)")
    if violates_lichnerowicz(s):
        violations.append(
            f"lambda_1 = {s.first_nonzero:g} is below the Lichnerowicz floor "
            f"{lichnerowicz_bound(s.n, s.ricci_lower_bound or 0.0):g}"
        )
    return violations


def spectrum_rows(s: SpectralData) -> Sequence[Dict[str, Any]]:
    """Rows {"lambda", "multiplicity"} suitable for a config file."""
    return [{"lambda": lam, "multiplicity": m} for lam, m in s.pairs]
