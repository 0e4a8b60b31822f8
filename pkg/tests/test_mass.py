"""
Tests for ADM masses, the conformal mass shift and the blow-up analysis.
"""

import numpy as np
import pytest

from pyconic.analysis import BlowUpAnalysis
from pyconic.cone_geometry import (
    flat_metric,
    glued_metric,
    neg_schwarzschild_metric,
    schwarzschild_metric,
)
from pyconic.exceptions import ConfigError, InvariantViolation
from pyconic.mass import adm_flux, adm_mass, mass_shift_experiment, shifted_metric
from pyconic.solvers import green_harmonic
from pyconic.utils.symbolic import schwarzschild_flux, symbolic_flux


@pytest.fixture(scope="module")
def flat_green():
    """Fixture for u = 1 + 1/r on Euclidean space, solved numerically."""
    return green_harmonic(flat_metric(3))


@pytest.mark.parametrize("A", [0.5, 1.0, 2.0])
def test_schwarzschild_mass(A):
    """Test the extrapolated mass 4(n-1)A of Schwarzschild metrics."""
    report = adm_mass(schwarzschild_metric(3, A))
    assert report.mass == pytest.approx(8.0 * A, rel=1e-4)
    assert report.order == 1.0
    assert report.monotone
    assert report.error_bar < 1e-2 * A
    assert report.omega_n == pytest.approx(4.0 * np.pi)

    report4 = adm_mass(schwarzschild_metric(4, A), ladder=(1e2, 1e3, 1e4))
    assert report4.mass == pytest.approx(12.0 * A, rel=1e-6)
    assert report4.order == 2.0


def test_flux_matches_symbolic():
    """Test the numerical flux against the closed form and sympy."""
    for n, A in ((3, 1.0), (3, 0.3), (5, 2.0)):
        m = schwarzschild_metric(n, A)
        exact = schwarzschild_flux(n, A, 1e3)
        assert adm_flux(m, 1e3) == pytest.approx(exact, rel=1e-6)
        assert symbolic_flux(n, 1e3, "r", f"1 + {A}*r**({2 - n})") == pytest.approx(
            exact, rel=1e-12
        )


def test_flux_array_input():
    """Test that array radii give an array of fluxes."""
    fluxes = adm_flux(schwarzschild_metric(3, 1.0), np.array([10.0, 100.0]))
    assert isinstance(fluxes, np.ndarray)
    assert fluxes.shape == (2,)
    assert fluxes[1] < fluxes[0]


def test_ladder_independence():
    """Test that the extrapolated mass does not depend on the ladder."""
    m = schwarzschild_metric(3, 1.0)
    first = adm_mass(m, ladder=(1e2, 1e3, 1e4)).mass
    second = adm_mass(m, ladder=(3e2, 3e3, 3e4)).mass
    assert second == pytest.approx(first, rel=1e-6)


def test_negative_mass():
    """Test that negative-mass Schwarzschild has mass -8A."""
    report = adm_mass(neg_schwarzschild_metric(3, 1.0))
    assert report.mass < 0
    assert report.mass == pytest.approx(-8.0, rel=1e-4)


def test_flat_mass():
    """Test that Euclidean space and the glued cone have zero mass."""
    report = adm_mass(flat_metric(3))
    assert report.mass == 0.0
    assert np.isnan(report.order)
    assert report.error_bar == 0.0
    assert adm_mass(glued_metric(3)).mass == pytest.approx(0.0, abs=1e-9)


def test_ladder_validation():
    """Test rejection of invalid ladders."""
    m = schwarzschild_metric(3, 1.0)
    with pytest.raises(ConfigError):
        adm_mass(m, ladder=(10.0, 100.0))
    with pytest.raises(ConfigError):
        adm_mass(m, ladder=(100.0, 10.0, 1000.0))
    with pytest.raises(ConfigError) as excinfo:
        adm_flux(glued_metric(3), 1.0)
    assert excinfo.value.key == "mass.ladder"


def test_mass_report_dict():
    """Test the serializable form of a mass report."""
    data = adm_mass(schwarzschild_metric(3, 1.0)).to_dict()
    assert set(data) == {"radii", "fluxes", "mass", "order", "error_bar", "omega_n"}
    assert data["radii"] == [1e1, 1e2, 1e3]


def test_shifted_metric(flat_green):
    """Test the conformal family built from the Green function."""
    u, _ = flat_green
    m = flat_metric(3)
    assert shifted_metric(m, u, 0.0) is m
    shifted = shifted_metric(m, u, 0.5)
    assert shifted.r_max == pytest.approx(u.r[-1])
    assert shifted.factor(np.array([2.0]))[0] == pytest.approx(1.25, rel=1e-6)
    with pytest.raises(ConfigError):
        shifted_metric(m, u, -0.1)


def test_mass_shift_flat(flat_green):
    """Test that the mass shift is linear with coefficient 4(n-1)."""
    u, A = flat_green
    with pytest.warns(UserWarning, match="4\\(n-1\\)"):
        report = mass_shift_experiment(flat_metric(3), u, A, [0.1, 0.2, 0.4])
    assert report.is_linear
    assert report.linear_deviation < 1e-6
    assert report.base_mass == 0.0
    assert report.coefficient == pytest.approx(8.0, rel=5e-3)
    assert report.symbolic_coefficient == pytest.approx(8.0)
    assert report.coefficient_error < 5e-3
    assert report.matched_constant == "4(n-1)"
    assert report.candidates == {"4(n-2)": 4.0, "4(n-1)": 8.0}
    assert len(report.reports) == 3


def test_mass_shift_nonlinear(flat_green):
    """Test that a nonlinear mass shift raises unless strict is off."""
    u, A = flat_green
    m = flat_metric(3)
    # the flux 8c(1 + c/R)^3 leaves an extrapolation error of order c^4 on the ladder
    deltas = [1.0, 10.0, 100.0]
    with pytest.raises(InvariantViolation, match="not linear"):
        mass_shift_experiment(m, u, A, deltas)
    with pytest.warns(UserWarning, match="not linear"):
        report = mass_shift_experiment(m, u, A, deltas, strict=False)
    assert not report.is_linear
    assert report.linear_deviation > 1e-6


def test_mass_shift_validation(flat_green):
    """Test rejection of invalid delta sets."""
    u, A = flat_green
    m = flat_metric(3)
    with pytest.raises(ConfigError):
        mass_shift_experiment(m, u, A, [0.1, 0.2])
    with pytest.raises(ConfigError):
        mass_shift_experiment(m, u, A, [0.1, 0.1, 0.2])
    with pytest.raises(ConfigError):
        mass_shift_experiment(m, u, 0.0, [0.1, 0.2, 0.4])


def test_blowup_analysis_not_fitted():
    """Test that results require fit."""
    analysis = BlowUpAnalysis()
    with pytest.raises(ValueError, match="not fitted"):
        analysis.evaluate()
    with pytest.raises(ValueError):
        _ = analysis.A_


def test_blowup_analysis_validation():
    """Test rejection of invalid deltas."""
    with pytest.raises(ConfigError):
        BlowUpAnalysis(deltas=(0.1, 0.2))
    with pytest.raises(ConfigError):
        BlowUpAnalysis(deltas=(0.0, 0.1, 0.2))


def test_blowup_analysis_glued():
    """Test the full blow-up pipeline on a glued cone."""
    analysis = BlowUpAnalysis(deltas=(0.1, 0.2, 0.4))
    with pytest.warns(UserWarning):
        analysis.fit(glued_metric(3, aperture=0.5))

    # the flux of f^2 u' is conserved, so A = a^2 for a radial Green function
    assert analysis.A_ == pytest.approx(0.25, rel=1e-6)
    assert analysis.mass_report_.mass == pytest.approx(0.0, abs=1e-9)
    masses = [report.mass for report in analysis.blowup_masses_]
    assert np.all(np.diff(masses) > 0)
    assert analysis.shift_.coefficient == pytest.approx(8.0, rel=5e-3)
    assert analysis.fit_time_ > 0

    summary = analysis.evaluate()
    assert summary["matched_constant"] == "4(n-1)"
    assert len(summary["blowups"]) == 3
    for row in summary["blowups"]:
        assert row["decay_exponent"] >= row["alpha_prime"]
        assert row["mean_concave"]
