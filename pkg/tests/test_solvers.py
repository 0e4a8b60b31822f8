"""
Tests for the radial solvers and the constructions built on them.
"""

import numpy as np
import pytest
from scipy.integrate import quad

from pyconic.asymptotics import critical_exponents
from pyconic.cone_geometry import cone_metric, flat_metric, glued_metric
from pyconic.exceptions import ConfigError, CriticalWeightError, SolverError
from pyconic.profiles import BumpProfile, SymbolicProfile
from pyconic.solvers import (
    BaseRadialSolver,
    BoundaryBranchSpec,
    Branch,
    FiniteDifferenceSolver,
    ShootingSolver,
    SolverSettings,
    fit_power_law,
    green_harmonic,
    harmonic_coordinate_mode,
    negative_part_norm,
    sobolev_threshold,
    solve_mode,
    solve_schrodinger,
)


@pytest.fixture
def glued():
    """Fixture for a cone of slope 1/2 glued to Euclidean space."""
    return glued_metric(3, cone_radius=1.0, af_radius=2.0, aperture=0.5)


@pytest.fixture
def short_settings():
    """Fixture for a six-decade solver domain."""
    return SolverSettings(r_in=1e-3, r_out=1e3, points_per_decade=200)


def test_branch_validation():
    """Test branch kinds at both ends."""
    assert Branch() == Branch.REGULAR
    assert Branch(None, "infinity") == Branch.DECAY
    assert Branch("green") == "green"
    with pytest.raises(ConfigError):
        Branch("green", "infinity")
    with pytest.raises(ConfigError):
        Branch("invalid")


def test_boundary_spec_parse():
    """Test parsing of branch strings."""
    bc = BoundaryBranchSpec.parse("dirichlet:2.5", "normalized")
    assert bc.tip == Branch.DIRICHLET
    assert bc.tip_value == 2.5
    assert bc.infinity == Branch.NORMALIZED
    assert BoundaryBranchSpec.parse(*bc.to_strings()) == bc
    with pytest.raises(ConfigError):
        BoundaryBranchSpec.parse("green:1")
    with pytest.raises(ConfigError):
        BoundaryBranchSpec.parse("dirichlet:x")


def test_settings_validation():
    """Test the SolverSettings invariants."""
    with pytest.raises(ConfigError):
        SolverSettings(r_in=1.0, r_out=0.5)
    with pytest.raises(ConfigError):
        SolverSettings(r_in=1.0, r_out=10.0)
    with pytest.raises(ConfigError):
        SolverSettings(points_per_decade=10)
    assert SolverSettings().refined().points_per_decade == 800


def test_end_exponents():
    """Test coincident and complex frozen exponents."""
    ends = BaseRadialSolver.end_exponents(1.0, 2.0)
    assert (ends.nu_plus, ends.nu_minus) == pytest.approx((1.0, -2.0))
    with pytest.raises(CriticalWeightError):
        BaseRadialSolver.end_exponents(-2.0, -1.0)
    with pytest.raises(SolverError):
        BaseRadialSolver.end_exponents(0.0, -1.0)


def test_manufactured_solution():
    """Test u = r + r^2 with Delta u - 2u/r^2 = 4 on the flat cone."""
    settings = SolverSettings(r_in=1e-2, r_out=1e2)
    bc = BoundaryBranchSpec(
        Branch.DIRICHLET, Branch.DIRICHLET, tip_value=1e-2 + 1e-4, infinity_value=1e2 + 1e4
    )
    sol = solve_mode(flat_metric(3), 2.0, rhs=4.0, bc=bc, settings=settings)
    r = sol.r
    exact = r + r**2
    np.testing.assert_allclose(sol.values, exact, rtol=1e-7)
    np.testing.assert_allclose(sol.solution.d1, 1.0 + 2.0 * r, rtol=1e-5)
    assert sol.residual < settings.tolerance


def test_solution_linearity():
    """Test that solutions are linear in the right-hand side."""
    settings = SolverSettings(r_in=1e-2, r_out=1e2, points_per_decade=100)
    bc = BoundaryBranchSpec(Branch.DIRICHLET, Branch.DIRICHLET)
    m = flat_metric(3)
    first = SymbolicProfile("exp(-(r - 1)**2)")
    second = SymbolicProfile("r*exp(-r)")
    total = SymbolicProfile("exp(-(r - 1)**2) + 3*r*exp(-r)")

    u1 = solve_mode(m, 2.0, rhs=first, bc=bc, settings=settings).values
    u2 = solve_mode(m, 2.0, rhs=second, bc=bc, settings=settings).values
    u = solve_mode(m, 2.0, rhs=total, bc=bc, settings=settings).values
    np.testing.assert_allclose(u, u1 + 3.0 * u2, rtol=1e-9, atol=1e-12)

    zero = solve_mode(m, 2.0, rhs=0.0, bc=bc, settings=settings).values
    assert np.all(zero == 0.0)


@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("j", [1, 2, 3])
def test_harmonic_branches(n, j):
    """Test that homogeneous solves reproduce r^nu_j^+ and r^nu_j^-."""
    m = flat_metric(n)
    lam = m.spectral.eigenvalue(j)
    nu_plus, nu_minus = critical_exponents(lam, n)

    growing = solve_mode(m, lam, bc=BoundaryBranchSpec(Branch.REGULAR, Branch.COORDINATE))
    assert growing.residual < 1e-10
    assert growing.tip_exponent == pytest.approx(nu_plus, abs=1e-6)
    assert growing.infinity_exponent == pytest.approx(nu_plus, abs=1e-6)

    decaying = solve_mode(m, lam, bc=BoundaryBranchSpec(Branch.GREEN, Branch.DECAY))
    assert decaying.residual < 1e-10
    assert decaying.tip_exponent == pytest.approx(nu_minus, abs=1e-6)
    assert decaying.tip_branches.nu_minus == pytest.approx(nu_minus)


def test_rhs_decay_check():
    """Test rejection of forcing that does not decay at infinity."""
    with pytest.raises(SolverError):
        solve_mode(flat_metric(3), 0.0, rhs=1.0)


def test_fit_power_law_window():
    """Test power-law fits of sampled solutions."""
    u = flat_metric(3).warp.sample(np.logspace(-2, 2, 81))
    fit = fit_power_law(u, window=(1e-1, 1e1))
    assert fit.exponent == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        fit_power_law(u, window=(1e-3, 1.0))


def test_green_flat():
    """Test that the Green function of Euclidean space is 1 + 1/r."""
    u, A = green_harmonic(flat_metric(3))
    exact = 1.0 + 1.0 / u.r
    assert np.max(np.abs(u.values - exact) / exact) < 1e-8
    assert A == pytest.approx(1.0, abs=1e-6)


def test_green_flat_higher_dimension():
    """Test u = 1 + r^(2-n) for n = 4."""
    u, A = green_harmonic(flat_metric(4))
    np.testing.assert_allclose(u.values, 1.0 + u.r**-2.0, rtol=1e-8)
    assert A == pytest.approx(1.0, abs=1e-6)


def test_green_glued(glued):
    """Test positivity and grid stability of the glued Green function."""
    settings = SolverSettings()
    u, A = green_harmonic(glued, settings=settings)
    assert np.min(u.values) > 1.0
    assert A > 0
    _, A_fine = green_harmonic(glued, settings=settings.refined())
    assert A_fine == pytest.approx(A, rel=1e-4)


@pytest.mark.parametrize("radius", [0.5, 0.9])
def test_harmonic_coordinate_small_sphere(radius):
    """Test the harmonic coordinate exponent on cones over small spheres."""
    m = cone_metric(3, radius=radius)
    sol = harmonic_coordinate_mode(m)
    expected = critical_exponents(2.0 / radius**2, 3)[0]
    assert sol.info["expected_tip_exponent"] == pytest.approx(expected)
    assert abs(sol.tip_exponent - expected) / expected < 1e-3
    assert sol.tip_exponent > 1.0


def test_harmonic_coordinate_unit_sphere():
    """Test that the unit sphere gives a linear coordinate."""
    sol = harmonic_coordinate_mode(flat_metric(3))
    assert sol.tip_exponent == pytest.approx(1.0, abs=1e-6)
    assert sol.info["tip_exponent_error"] < 1e-6
    np.testing.assert_allclose(sol.values, sol.r, rtol=1e-6)


def test_shooting_matches_finite_difference(glued, short_settings):
    """Test the shooting oracle against the finite-difference solver."""
    lam = glued.spectral.eigenvalue(1)
    bc = BoundaryBranchSpec(Branch.REGULAR, Branch.COORDINATE)
    fd = solve_mode(glued, lam, bc=bc, settings=short_settings)
    shot = solve_mode(glued, lam, bc=bc, solver=ShootingSolver(short_settings))
    np.testing.assert_allclose(shot.values, fd.values, rtol=1e-5)
    assert shot.info["method"] == "DOP853"


def test_schrodinger_zero_potential(glued):
    """Test that a vanishing potential gives u = 1 exactly."""
    result = solve_schrodinger(glued, 0.0)
    assert np.max(np.abs(result.u.values - 1.0)) < 1e-12
    assert result.B == pytest.approx(1.0, abs=1e-12)
    assert result.potential_nonnegative


def test_schrodinger_nonnegative_bump(glued):
    """Test positivity and grid stability for a nonnegative potential.

    B < 1 here: for V >= 0, u is subharmonic and the maximum principle
    bounds it by its limit 1 at infinity.
    """
    settings = SolverSettings()
    potential = BumpProfile(1.0, 1.5, 0.5)
    result = solve_schrodinger(glued, potential, settings=settings)
    assert np.min(result.u.values) > 0
    assert result.potential_nonnegative
    # u is subharmonic for V >= 0, so its tip limit lies below 1
    assert result.B < 1.0
    assert not result.tip_limit_at_least_one
    assert result.A < 0
    assert result.condition_estimate > 0

    fine = solve_schrodinger(glued, potential, settings=settings.refined())
    assert fine.B == pytest.approx(result.B, rel=1e-4)


def test_schrodinger_negative_bump(glued):
    """Test that a small negative potential raises the tip limit."""
    result = solve_schrodinger(glued, BumpProfile(-0.5, 1.5, 0.5))
    assert not result.potential_nonnegative
    assert result.B > 1.0
    assert result.tip_limit_at_least_one
    assert 0 < result.negative_part_norm < result.negative_part_threshold


def test_negative_part_norm_flat():
    """Test the L^(3/2) norm of a negative bump against quadrature."""
    m = flat_metric(3)
    r = np.logspace(-1, 1, 2001)
    bump = BumpProfile(-1.0, 1.5, 0.5)
    integral, _ = quad(lambda s: abs(bump(np.array([s]))[0]) ** 1.5 * 4 * np.pi * s**2, 1.0, 2.0)
    assert negative_part_norm(m, r, bump(r)) == pytest.approx(integral ** (2.0 / 3.0), rel=1e-6)
    assert negative_part_norm(m, r, -bump(r)) == 0.0
    assert sobolev_threshold(m) == pytest.approx(0.75 * (2 * np.pi**2) ** (2.0 / 3.0))


def test_schrodinger_negative_part_too_large(glued):
    """Test that a negative part above the smallness bound is rejected."""
    with pytest.raises(SolverError, match="negative part"):
        solve_schrodinger(glued, BumpProfile(-10.0, 1.5, 0.5))
    strict = SolverSettings(negative_part_threshold=1.0)
    with pytest.raises(SolverError, match="negative part"):
        solve_schrodinger(glued, BumpProfile(-0.5, 1.5, 0.5), settings=strict)
    with pytest.raises(ConfigError):
        SolverSettings(negative_part_threshold=0.0)


def test_schrodinger_potential_support(glued):
    """Test that potentials must vanish at both ends."""
    with pytest.raises(ConfigError) as excinfo:
        solve_schrodinger(glued, 1.0)
    assert excinfo.value.key == "potential"


def test_solver_verbose(capsys, short_settings):
    """Test the verbose progress line."""
    solver = FiniteDifferenceSolver(short_settings, verbose=True)
    solver.solve(flat_metric(3), 2.0, bc=BoundaryBranchSpec(Branch.REGULAR, Branch.COORDINATE))
    assert "lambda=2" in capsys.readouterr().out
