"""
Tests for the cone_geometry module.
"""

import numpy as np
import pytest

from pyconic.cone_geometry import (
    RadialMetric,
    arclength_samples,
    cone_connection,
    cone_metric,
    cone_ricci,
    cone_scalar_curvature,
    curvature_oracle,
    flat_metric,
    glued_metric,
    horn_exponent_fit,
    horn_fit,
    horn_metric,
    log_grid,
    neg_schwarzschild_metric,
    sampled_metric,
    schwarzschild_metric,
    to_arclength,
    warped_scalar_curvature,
)
from pyconic.cross_section import sphere_spectrum
from pyconic.exceptions import ConfigError, FitError
from pyconic.profiles import HornWarp, SymbolicProfile


@pytest.fixture
def radii():
    """Fixture for 100 radii spread over six decades."""
    return np.logspace(-3, 3, 100)


def test_metric_validation():
    """Test the invariants checked when building a RadialMetric."""
    spectral = sphere_spectrum(3, 2)
    with pytest.raises(ConfigError):
        RadialMetric(3, spectral, HornWarp(1.0), af_order=0.4)
    with pytest.raises(ConfigError):
        RadialMetric(4, spectral, HornWarp(1.0))
    with pytest.raises(ConfigError):
        RadialMetric(3, spectral, HornWarp(1.0), conical_order=0.0)

    m = flat_metric(4)
    assert m.af_order == 2.0
    assert m.cross_section_scalar == pytest.approx(6.0)
    assert m.conformal_power == pytest.approx(2.0)
    assert m.is_warped


def test_cone_flatness(radii):
    """Test that the cone over the unit round sphere is scalar flat."""
    for n in (3, 4, 5):
        sc = warped_scalar_curvature(flat_metric(n), radii)
        assert np.max(np.abs(sc)) < 1e-10
        assert cone_scalar_curvature((n - 1) * (n - 2), n, 2.0) == 0.0
        assert cone_ricci(n - 2.0, n) == (0.0, 0.0)


def test_cone_scalar_curvature_scaling():
    """Test that cone scalar curvature times r^2 does not depend on r."""
    values = [cone_scalar_curvature(0.5, 3, r) * r**2 for r in (0.25, 1.0, 4.0)]
    assert values == [-1.5, -1.5, -1.5]
    with pytest.raises(ConfigError):
        cone_scalar_curvature(0.5, 3, 0.0)


def test_cone_connection():
    """Test the connection coefficients of the model cone."""
    conn = cone_connection(3, 1.0)
    assert conn.tangent_radial == 1.0
    assert conn.radial_radial == 0.0
    assert conn.radial_tangent == 0.0
    assert cone_connection(3, 2.0).tangent_tangent_radial == -0.5


def test_cylinder_curvature():
    """Test the product metric dr^2 + c^2 g^N."""
    m = RadialMetric(3, sphere_spectrum(3, 2), SymbolicProfile("2"))
    sc = warped_scalar_curvature(m, np.array([0.5, 1.0, 3.0]))
    np.testing.assert_allclose(sc, 0.5, rtol=1e-14)


def test_curvature_oracle_flat():
    """Test the finite-difference oracle on Euclidean space."""
    for r in (0.5, 1.0, 2.0):
        value, error = curvature_oracle(flat_metric(3), r)
        assert abs(value) < 1e-6
        assert error < 1e-6


def test_curvature_oracle_matches_formula():
    """Test the warped-product formula against the finite-difference oracle."""
    for m in (horn_metric(3, 1.5), horn_metric(4, 0.5), glued_metric(3, aperture=0.5)):
        for r in (0.7, 1.3, 1.8):
            formula = float(warped_scalar_curvature(m, np.array([r]))[0])
            oracle, _ = curvature_oracle(m, r)
            assert oracle == pytest.approx(formula, rel=1e-5, abs=1e-6)


def test_warped_scalar_rejects_conformal():
    """Test that conformally changed metrics are rejected."""
    with pytest.raises(ConfigError):
        warped_scalar_curvature(schwarzschild_metric(3, 1.0), np.array([1.0]))


def test_scaled_metric():
    """Test that rescaling the flat metric leaves it flat."""
    m = flat_metric(3).scaled(2.0)
    np.testing.assert_allclose(m.warp(np.array([3.0])), [3.0])
    s = schwarzschild_metric(3, 1.0).scaled(2.0)
    # phi(rho / c) = 1 + c / rho for A = 1, n = 3
    np.testing.assert_allclose(s.factor(np.array([4.0])), [1.5])
    with pytest.raises(ConfigError):
        m.scaled(-1.0)


def test_log_grid():
    """Test the density and ends of log grids."""
    grid = log_grid(1e-2, 1e2, 50)
    assert grid.size == 201
    assert grid[0] == pytest.approx(1e-2)
    assert grid[-1] == pytest.approx(1e2)
    with pytest.raises(ConfigError):
        log_grid(1.0, 0.5, 10)


def test_arclength_of_warped_metric():
    """Test that s = r when there is no conformal factor."""
    a = arclength_samples(flat_metric(3), 1e-3, 1e1, points_per_decade=100)
    np.testing.assert_allclose(a.s, a.r, rtol=1e-10)
    np.testing.assert_allclose(a.F, a.r, rtol=1e-12)
    np.testing.assert_allclose(a.F_s, 1.0, rtol=1e-12)

    m = to_arclength(horn_metric(3, 0.5), 1e-3, 1e1, points_per_decade=100)
    assert m.tip == 0.0
    assert m.r_max == pytest.approx(1e1, rel=1e-8)


@pytest.mark.parametrize("b", [0.3, 0.5, 1.0, 1.5, 1.9])
def test_horn_fit_model(b):
    """Test that the model horn returns its exponent."""
    assert horn_exponent_fit(horn_metric(3, b)) == pytest.approx(b, abs=1e-6)


def test_horn_fit_negative_schwarzschild():
    """Test the 2/3 horn of negative-mass Schwarzschild."""
    b = horn_exponent_fit(neg_schwarzschild_metric(3, 1.0))
    assert b == pytest.approx(2.0 / 3.0, rel=1e-2)


def test_horn_fit_perturbed_cone():
    """Test that a perturbed cone still fits b = 1."""
    m = RadialMetric(3, sphere_spectrum(3, 2), SymbolicProfile("r*(1 + r**(1/2)/20)"))
    fit = horn_fit(m)
    assert fit.exponent == pytest.approx(1.0, abs=1e-3)
    assert fit.r2 > 0.999


def test_horn_fit_not_a_horn():
    """Test the not-a-horn diagnostic on an end that is infinitely far away."""
    with pytest.raises(FitError):
        horn_fit(schwarzschild_metric(3, 1.0))


def test_sampled_metric():
    """Test metrics built from sampled columns."""
    r = np.linspace(0.5, 50.0, 400)
    m = sampled_metric(3, r, r, af_start=10.0)
    assert m.r_max == 50.0
    assert m.af_start == 10.0
    np.testing.assert_allclose(m.warp(np.array([7.3])), [7.3], rtol=1e-10)
    with pytest.raises(ConfigError):
        sampled_metric(3, r, -r)


def test_cone_metric_radius():
    """Test the cone over a small sphere."""
    m = cone_metric(3, radius=0.5)
    assert m.spectral.first_nonzero == pytest.approx(8.0)
    assert m.cross_section_scalar == pytest.approx(8.0)
    # Sc = (Sc_N - (n-1)(n-2)) / r^2 for the exact cone
    sc = warped_scalar_curvature(m, np.array([2.0]))
    assert sc[0] == pytest.approx(cone_scalar_curvature(8.0, 3, 2.0))


def test_check_domain():
    """Test radii outside the metric domain."""
    m = neg_schwarzschild_metric(3, 1.0)
    assert m.tip == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        m.check_domain(np.array([0.5]))
