"""
Blow-up analysis of a conical tip: Green function, blown-up metrics and masses.
"""

import time
import warnings
from typing import Any, Dict, List, Optional, Sequence

from pyconic.cone_geometry import RadialMetric
from pyconic.conformal import BlowUpResult, blow_up
from pyconic.exceptions import ConfigError
from pyconic.mass import DEFAULT_LADDER, MassReport, MassShiftReport, adm_mass, mass_shift_experiment
from pyconic.profiles.base import RadialFunction
from pyconic.solvers.base import SolverSettings
from pyconic.solvers.constructions import green_harmonic


class BlowUpAnalysis:
    """
    Conformal blow-up of the conical tip of an AF metric.

    Fitting solves for the Green-type harmonic function u, blows up the tip
    for every delta, computes the mass of each blown-up AF end and fits the
    mass shift against delta.

    Attributes:
        deltas (Sequence[float]): Blow-up parameters, at least three distinct values
        settings (SolverSettings): Radial solver settings
        ladder (Sequence[float]): Flux radii for the ADM masses
        verbose (bool): Whether to print progress information
    """

    def __init__(
        self,
        deltas: Sequence[float] = (0.1, 0.2, 0.4),
        settings: Optional[SolverSettings] = None,
        ladder: Sequence[float] = DEFAULT_LADDER,
        verbose: bool = False,
    ):
        """
        Initialize a BlowUpAnalysis.

        Args:
            deltas: Positive blow-up parameters
            settings: Radial solver settings, the defaults if None
            ladder: Increasing flux radii
            verbose: Whether to print progress information
        """
        if len(deltas) < 3:
            raise ConfigError("blow-up analysis needs at least three deltas", key="blowup.deltas")
        if any(d <= 0 for d in deltas):
            raise ConfigError("deltas must be positive", key="blowup.deltas")
        self.deltas = tuple(float(d) for d in deltas)
        self.settings = settings or SolverSettings()
        self.ladder = tuple(float(r) for r in ladder)
        self.verbose = verbose

        self._fitted = False
        self._green: Optional[RadialFunction] = None
        self._A = float("nan")
        self._blowups: List[BlowUpResult] = []
        self._mass_report: Optional[MassReport] = None
        self._blowup_masses: List[MassReport] = []
        self._shift: Optional[MassShiftReport] = None
        self._fit_time = 0.0

    def fit(self, metric: RadialMetric) -> "BlowUpAnalysis":
        """
        Run the blow-up pipeline on a metric.

        Args:
            metric: Metric with a conical tip at r = 0 and an AF end

        Returns:
            self: The fitted analysis
        """
        start_time = time.time()
        if self.verbose:
            print(f"Solving for the Green function of {metric.name}...")
        u, A = green_harmonic(metric, settings=self.settings)
        if A <= 0:
            warnings.warn(f"A = {A:.6g} <= 0; the blown-up masses will not increase with delta")

        self._mass_report = adm_mass(metric, self.ladder)
        self._blowups = []
        self._blowup_masses = []
        for delta in self.deltas:
            if self.verbose:
                print(f"Blowing up with delta = {delta:g}...")
            result = blow_up(metric, delta, u)
            self._blowups.append(result)
            self._blowup_masses.append(adm_mass(result.af_metric, self.ladder))

        self._shift = mass_shift_experiment(
            metric, u, A, self.deltas, ladder=self.ladder, verbose=self.verbose
        )
        if self.verbose:
            print(f"Mass shift coefficient: {self._shift.coefficient:.8g}")

        self._green = u
        self._A = A
        self._fitted = True
        self._fit_time = time.time() - start_time
        return self

    def _check_fitted(self) -> None:
        if not self._fitted:
            raise ValueError(
                "This BlowUpAnalysis instance is not fitted yet. "
                "Call 'fit' before using this method."
            )

    def evaluate(self) -> Dict[str, Any]:
        """
        Summary of the fitted analysis.

        Returns:
            Dict[str, Any]: A, masses, decay exponents and cut slices per delta
        """
        self._check_fitted()
        assert self._shift is not None and self._mass_report is not None
        return {
            "A": self._A,
            "base_mass": self._mass_report.mass,
            "shift_coefficient": self._shift.coefficient,
            "matched_constant": self._shift.matched_constant,
            "blowups": [
                {
                    "delta": b.delta,
                    "mass": mr.mass,
                    "decay_exponent": b.decay_exponent,
                    "alpha_prime": b.alpha_prime,
                    "s0": b.cut.s0,
                    "H_s0": b.cut.mean_curvature,
                    "mean_concave": b.cut.mean_concave,
                }
                for b, mr in zip(self._blowups, self._blowup_masses)
            ],
        }

    @property
    def green_(self) -> RadialFunction:
        """
        Get the Green-type harmonic function.

        Returns:
            RadialFunction: u with u ~ r^(2-n) at the tip
        """
        self._check_fitted()
        assert self._green is not None
        return self._green

    @property
    def A_(self) -> float:
        self._check_fitted()
        return self._A

    @property
    def blowups_(self) -> List[BlowUpResult]:
        self._check_fitted()
        return self._blowups

    @property
    def mass_report_(self) -> MassReport:
        """Mass of the metric before blowing up."""
        self._check_fitted()
        assert self._mass_report is not None
        return self._mass_report

    @property
    def blowup_masses_(self) -> List[MassReport]:
        self._check_fitted()
        return self._blowup_masses

    @property
    def shift_(self) -> MassShiftReport:
        self._check_fitted()
        assert self._shift is not None
        return self._shift

    @property
    def fit_time_(self) -> float:
        """
        Get the time taken to fit.

        Returns:
            float: Time in seconds
        """
        return self._fit_time
