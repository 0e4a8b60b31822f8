"""
Property-based tests of algebraic invariants.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pyconic.asymptotics import ExponentCatalog, critical_exponents
from pyconic.conformal import conformal_flip
from pyconic.cross_section import SpectralData
from pyconic.utils.fitting import polynomial_limit
from pyconic.utils.io import format_float

dimensions = st.integers(min_value=3, max_value=8)
eigenvalues = st.floats(min_value=0.0, max_value=1e3, allow_nan=False, allow_infinity=False)


@given(eigenvalues, dimensions)
def test_critical_exponents_roots(lam, n):
    """Property: nu^+ and nu^- are the roots of nu^2 + (n-2) nu - lambda."""
    nu_plus, nu_minus = critical_exponents(lam, n)
    assert nu_plus >= 0 >= nu_minus + (n - 2)
    assert nu_plus + nu_minus == pytest.approx(2 - n, abs=1e-9)
    assert nu_plus * nu_minus == pytest.approx(-lam, rel=1e-9, abs=1e-9)


@given(st.lists(eigenvalues, min_size=1, max_size=6, unique=True), dimensions)
def test_catalog_reflection(extra, n):
    """Property: every catalog row is symmetric about (2-n)/2."""
    values = [0.0] + sorted(lam for lam in extra if lam > 0)
    spectral = SpectralData(n, tuple(values), (1,) * len(values))
    catalog = ExponentCatalog.from_spectrum(spectral)
    for row in catalog.rows:
        assert catalog.reflect(row.nu_plus) == pytest.approx(row.nu_minus, abs=1e-9)


@given(
    st.floats(min_value=1e-2, max_value=1e2),
    dimensions,
    st.lists(st.floats(min_value=0.1, max_value=10.0), min_size=2, max_size=8),
)
@settings(max_examples=50)
def test_flip_involution(delta, n, warps):
    """Property: flipping twice with the same delta returns the samples."""
    r = np.logspace(-1, 1, len(warps))
    warp = np.asarray(warps) * r
    factor = 1.0 + 1.0 / r
    s, F, U = conformal_flip(r, warp, factor, delta, n)
    r2, f2, u2 = conformal_flip(s, F, U, delta, n)
    np.testing.assert_allclose(r2, r, rtol=1e-10)
    np.testing.assert_allclose(f2, warp, rtol=1e-10)
    np.testing.assert_allclose(u2, factor, rtol=1e-10)


@given(
    st.lists(
        st.floats(min_value=-10.0, max_value=10.0, allow_nan=False), min_size=1, max_size=3
    )
)
def test_polynomial_limit_exact(coefficients):
    """Property: extrapolation through three nodes is exact for quadratics."""
    nodes = np.array([1e-1, 1e-2, 1e-3])
    values = np.polyval(coefficients[::-1], nodes)
    scale = max(1.0, float(np.max(np.abs(coefficients))))
    assert polynomial_limit(nodes, values) == pytest.approx(coefficients[0], abs=1e-9 * scale)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_float_round_trip(value):
    """Property: the report text of a float reads back to the same float."""
    assert float(format_float(value)) == value
