"""
Tests for conformal changes and the blow-up of conical tips.
"""

import numpy as np
import pytest

from pyconic.conformal import (
    area_variation_oracle,
    blow_up,
    blow_up_family,
    conformal_flip,
    conformal_metric,
    conformal_scalar,
    select_cut_slice,
    slice_mean_curvature,
)
from pyconic.cone_geometry import (
    flat_metric,
    glued_metric,
    neg_schwarzschild_metric,
    schwarzschild_metric,
)
from pyconic.exceptions import ConfigError
from pyconic.mass import adm_flux
from pyconic.profiles import SymbolicProfile
from pyconic.solvers import green_harmonic


@pytest.fixture(scope="module")
def flat_green():
    """Fixture for the Green function of Euclidean space."""
    m = flat_metric(3)
    u, _ = green_harmonic(m)
    return m, u


@pytest.fixture(scope="module")
def glued_green():
    """Fixture for the Green function of a glued cone of slope 1/2."""
    m = glued_metric(3, aperture=0.5)
    u, _ = green_harmonic(m)
    return m, u


@pytest.mark.parametrize("A", [0.5, 1.0, 3.0])
def test_schwarzschild_scalar_flat(A):
    """Test that Schwarzschild metrics are scalar flat."""
    r = np.logspace(0.5, 3, 60)
    assert np.max(np.abs(conformal_scalar(schwarzschild_metric(3, A), r))) < 1e-8
    assert np.max(np.abs(conformal_scalar(schwarzschild_metric(4, A), r))) < 1e-8
    neg = neg_schwarzschild_metric(3, A)
    assert np.max(np.abs(conformal_scalar(neg, 2.0 * neg.tip + r))) < 1e-8


def test_harmonic_factor_keeps_flatness():
    """Test that a harmonic conformal factor on Euclidean space gives Sc = 0."""
    factor = SymbolicProfile("1 + 2/r")
    r = np.linspace(0.1, 10.0, 50)
    assert np.max(np.abs(conformal_scalar(flat_metric(3), r, factor=factor))) < 1e-10
    m = conformal_metric(flat_metric(3), factor)
    assert not m.is_warped
    assert m.factor(np.array([2.0]))[0] == pytest.approx(2.0)


def test_conformal_scalar_rejects_nonpositive_factor():
    """Test rejection of a conformal factor that changes sign."""
    with pytest.raises(ConfigError):
        conformal_scalar(flat_metric(3), np.array([0.5, 2.0]), factor=SymbolicProfile("1 - 1/r"))


def test_flip_is_an_involution():
    """Test that flipping twice with the same delta is the identity."""
    r = np.logspace(-2, 2, 41)
    warp = 0.5 * r * (1.0 + r)
    factor = 1.0 + 1.0 / r
    for n, delta in ((3, 0.3), (4, 2.0), (5, 1.0)):
        s, F, U = conformal_flip(r, warp, factor, delta, n)
        assert np.all(np.diff(s) > 0)
        r2, f2, u2 = conformal_flip(s, F, U, delta, n)
        np.testing.assert_allclose(r2, r, rtol=1e-12)
        np.testing.assert_allclose(f2, warp, rtol=1e-12)
        np.testing.assert_allclose(u2, factor, rtol=1e-12)


def test_flip_rejects_bad_input():
    """Test rejection of nonpositive delta and radii."""
    r = np.array([1.0, 2.0])
    with pytest.raises(ConfigError) as excinfo:
        conformal_flip(r, r, r, 0.0, 3)
    assert excinfo.value.key == "blowup.deltas"
    with pytest.raises(ConfigError):
        conformal_flip(np.array([0.0, 1.0]), r, r, 1.0, 3)


def test_blow_up_flat(flat_green):
    """Test the blow-up of Euclidean space at the origin."""
    m, u = flat_green
    b = blow_up(m, 1.0, u)
    assert b.aperture == pytest.approx(1.0)
    assert b.decays_to_cone
    assert b.decay_exponent >= b.alpha_prime
    # U_s = 1 + 1/s exactly, so the deviation drops below 1e-2 near s = 400
    assert b.cut.s0 == pytest.approx(401.5, rel=1e-2)
    assert b.cut.mean_concave
    assert b.cut.scaled_curvature <= -2.0 * 0.99
    assert len(b.rows()) == b.s.size


@pytest.mark.parametrize("delta", [0.25, 1.0])
def test_blow_up_glued(glued_green, delta):
    """Test the asymptotically conical end of the blown-up glued metric."""
    m, u = glued_green
    b = blow_up(m, delta, u)
    assert b.aperture == pytest.approx(0.5)
    assert b.decay_exponent >= b.alpha_prime
    assert np.isfinite(b.cut.s0)
    assert b.cut.mean_curvature < 0
    assert b.cut.scaled_curvature <= -(m.n - 1) * 0.99
    assert b.af_metric.factor(np.array([1e3]))[0] == pytest.approx(1.0, abs=1e-3)


def test_blow_up_af_metric_domain(flat_green):
    """Test that the AF end of a blow-up stops where the Green function was sampled."""
    m, u = flat_green
    b = blow_up(m, 1.0, u)
    assert b.af_metric.r_max == pytest.approx(u.r[-1])
    with pytest.raises(ConfigError) as excinfo:
        adm_flux(b.af_metric, 10.0 * u.r[-1])
    assert excinfo.value.key == "mass.ladder"


def test_blow_up_family(glued_green):
    """Test that the family keeps the order of the deltas."""
    m, u = glued_green
    family = blow_up_family(m, [0.25, 0.5], u)
    assert [b.delta for b in family] == [0.25, 0.5]


def test_select_cut_slice_threshold(flat_green):
    """Test that a stricter deviation threshold moves the cut outward."""
    m, u = flat_green
    b = blow_up(m, 1.0, u)
    strict = select_cut_slice(b, max_deviation=1e-3)
    assert strict.s0 > b.cut.s0
    impossible = select_cut_slice(b, max_deviation=0.0)
    assert np.isnan(impossible.s0)
    assert not impossible.mean_concave


def test_blow_up_validation(flat_green):
    """Test rejection of invalid blow-up input."""
    m, u = flat_green
    with pytest.raises(ConfigError):
        blow_up(m, -1.0, u)
    with pytest.raises(ConfigError):
        blow_up(m, 1.0, u.shift(-1.0))
    with pytest.raises(ConfigError):
        blow_up(neg_schwarzschild_metric(3, 1.0), 1.0, u)


def test_mean_curvature_of_spheres():
    """Test the mean curvature of round spheres in Euclidean space."""
    assert slice_mean_curvature(flat_metric(3), 2.0) == pytest.approx(1.0)
    assert slice_mean_curvature(flat_metric(4), 3.0) == pytest.approx(1.0)


def test_mean_curvature_matches_area_variation(flat_green):
    """Test the closed-form mean curvature against the area variation."""
    m = schwarzschild_metric(3, 1.0)
    for r in (0.5, 1.0, 4.0):
        assert area_variation_oracle(m, r) == pytest.approx(
            slice_mean_curvature(m, r), rel=1e-6
        )
    # the horizon r = A is minimal
    assert slice_mean_curvature(m, 1.0) == pytest.approx(0.0, abs=1e-12)

    b = blow_up(flat_green[0], 1.0, flat_green[1])
    for s0 in (10.0, 100.0, 1000.0):
        assert area_variation_oracle(b, s0) == pytest.approx(
            slice_mean_curvature(b, s0), rel=1e-4
        )
