"""
Tests for the asymptotics module.
"""

import numpy as np
import pytest

from pyconic.asymptotics import (
    ExponentCatalog,
    WeightPair,
    critical_exponents,
    is_critical,
    membership,
    weighted_norm,
    weighted_norm_details,
)
from pyconic.cone_geometry import flat_metric
from pyconic.cross_section import SpectralData, sphere_spectrum
from pyconic.exceptions import ConfigError
from pyconic.profiles import RadialFunction


def power(nu: float, lo: float = 1e-5, hi: float = 1e5, per_decade: int = 100) -> RadialFunction:
    """r^nu with exact derivatives on a log grid."""
    count = int(round(np.log10(hi / lo) * per_decade)) + 1
    r = np.exp(np.linspace(np.log(lo), np.log(hi), count))
    return RadialFunction(r, r**nu, nu * r ** (nu - 1), nu * (nu - 1) * r ** (nu - 2))


def test_critical_exponents():
    """Test the roots of nu^2 + (n-2) nu - lambda."""
    assert critical_exponents(0.0, 3) == (0.0, -1.0)
    assert critical_exponents(2.0, 3) == pytest.approx((1.0, -2.0))
    for n in (3, 4, 6):
        for lam in (0.5, 3.0, 17.0):
            p, m = critical_exponents(lam, n)
            assert p * m == pytest.approx(-lam)
            assert p + m == pytest.approx(2 - n)
    with pytest.raises(ConfigError):
        critical_exponents(-1.0, 3)


def test_weight_pair_validation():
    """Test the WeightPair invariants."""
    with pytest.raises(ConfigError):
        WeightPair(0.0, 0.0, p=0.5)
    with pytest.raises(ConfigError):
        WeightPair(0.0, 0.0, k=-1)
    with pytest.raises(ConfigError):
        WeightPair(0.0, 0.0, k=3)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_sphere_catalog_sets(n):
    """Test that round-sphere exponents are the integers k and 2-n-k."""
    catalog = ExponentCatalog.from_spectrum(sphere_spectrum(n, 6))
    assert catalog.window == 6
    assert catalog.cone_critical == catalog.infinity_critical
    for row in catalog.rows:
        assert row.nu_plus >= 0
        assert row.nu_minus <= 2 - n
    assert catalog.reflect(1.0) == 1.0 - n


def test_catalog_general_spectrum():
    """Test the catalog of a non-sphere spectrum."""
    s = SpectralData(3, (0.0, 0.75, 3.75), (1, 2, 1))
    catalog = ExponentCatalog.from_spectrum(s)
    assert [row.nu_plus for row in catalog.rows] == pytest.approx([0.0, 0.5, 1.5])
    assert [row.nu_minus for row in catalog.rows] == pytest.approx([-1.0, -1.5, -2.5])
    assert 0.5 not in catalog.infinity_critical


def test_is_critical():
    """Test criticality of weight pairs."""
    s = sphere_spectrum(3, 5)
    assert is_critical(0.0, 0.5, s) == (True, False)
    assert is_critical(0.3, -1.0, s) == (False, True)
    assert is_critical(-0.5, -0.5, s) == (False, False)


def test_is_critical_window_warning():
    """Test the warning when the window cannot certify noncriticality."""
    with pytest.warns(UserWarning):
        is_critical(10.5, 0.5, sphere_spectrum(3, 3))


def test_membership():
    """Test power-law membership bookkeeping."""
    w = WeightPair(-0.5, -0.5)
    assert membership(0.0, -1.0, w) == (True, True)
    assert membership(-1.0, 0.0, w) == (False, False)


def test_weighted_norm_flat_power():
    """Test a finite weighted norm against its closed form."""
    # r^nu with delta < nu < beta is in L^2_{delta,beta}
    u = power(-0.5)
    w = WeightPair(-1.0, 0.0, k=0, p=2.0)
    details = weighted_norm_details(u, w, metric=flat_metric(3))
    assert details.finite
    assert details.tip_ratio == pytest.approx(0.1, rel=1e-6)
    assert details.infinity_ratio == pytest.approx(0.1, rel=1e-6)
    assert np.isfinite(details.value) and details.value > 0


@pytest.mark.parametrize("seed", range(20))
def test_weighted_norm_tip_membership(seed):
    """Test the inner tail test on r^nu for nu on both sides of delta."""
    rng = np.random.default_rng(seed)
    delta = rng.uniform(-2.0, 1.0)
    beta = delta + 3.0
    w = WeightPair(delta, beta, k=1, p=2.0)

    inside = weighted_norm_details(power(delta + 0.5), w, n=3)
    outside = weighted_norm_details(power(delta - 0.5), w, n=3)
    assert inside.finite and inside.tip_ratio < 0.99
    assert not outside.finite and outside.tip_ratio >= 0.99
    assert weighted_norm(power(delta - 0.5), w, n=3) == float("inf")


def test_weighted_norm_coverage():
    """Test rejection of grids that miss the cutoff regions."""
    w = WeightPair(0.0, 0.0)
    with pytest.raises(ConfigError):
        weighted_norm(power(0.0, lo=1e-2, hi=1e2), w, n=3)
    with pytest.raises(ConfigError):
        weighted_norm(power(0.0), w, cutoffs=(0.6, 4.0), n=3)


def test_weighted_norm_uses_all_three_decades():
    """Test that a flat integrand in the two inner decades is caught behind a damped end decade."""
    u = power(0.0)
    damped = RadialFunction(u.r, np.where(u.r < 1e-4, 0.5, 1.0), u.d1, u.d2)
    w = WeightPair(0.0, 3.0, k=0, p=2.0)
    details = weighted_norm_details(damped, w, n=3)
    assert not details.finite
    assert details.tip_ratio >= 0.99


def test_weighted_norm_dimension():
    """Test that the Euclidean background takes its dimension from the caller."""
    u = power(-0.5)
    w = WeightPair(-1.0, 0.0, k=0, p=2.0)
    with pytest.raises(ConfigError) as excinfo:
        weighted_norm(u, w)
    assert excinfo.value.key == "n"
    with pytest.raises(ConfigError):
        weighted_norm(u, w, metric=flat_metric(3), n=4)
    four = weighted_norm(u, w, n=4)
    assert four == pytest.approx(weighted_norm(u, w, metric=flat_metric(4)))
    assert four != pytest.approx(weighted_norm(u, w, n=3))
