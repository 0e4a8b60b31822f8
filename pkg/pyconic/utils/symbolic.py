"""
Symbolic oracles for fluxes, mass shifts and scalar curvature.

These evaluate the same quantities as the numerical modules through sympy,
so tests and reports can compare the two.
"""

from typing import Optional, Union

import sympy as sp

from pyconic.exceptions import ConfigError
from pyconic.profiles.symbolic import R

ExprLike = Union[str, float, sp.Expr]


def _expr(value: ExprLike) -> sp.Expr:
    if isinstance(value, sp.Basic):
        return value
    try:
        expr = sp.sympify(value, locals={"r": R})
    except (sp.SympifyError, TypeError) as exc:
        raise ConfigError(f"cannot parse expression {value!r}") from exc
    if expr.free_symbols - {R}:
        raise ConfigError(f"expression {value!r} may only depend on r")
    return expr


def flux_expression(n: int, warp: ExprLike = "r", factor: ExprLike = 1) -> sp.Expr:
    """
    Normalized flux m(R) of phi^(4/(n-2)) (dr^2 + f^2 g^N) over the sphere of radius r.

    In Euclidean coordinates g_ij = a(rho) delta_ij + b(rho) x_i x_j / rho^2
    with a = psi (1 + k), b = -psi k, k = f^2/rho^2 - 1, psi = phi^(4/(n-2)),
    and the angular integral gives m = (n-1) rho^(n-1) (b/rho - a').

    Args:
        n: Dimension
        warp: Warp f as an expression in r
        factor: Conformal factor phi as an expression in r

    Returns:
        sp.Expr: The flux divided by vol(S^(n-1)), as a function of r
    """
    f = _expr(warp)
    psi = _expr(factor) ** sp.Rational(4, n - 2)
    k = f**2 / R**2 - 1
    a = psi * (1 + k)
    b = -psi * k
    return (n - 1) * R ** (n - 1) * (b / R - sp.diff(a, R))


def symbolic_flux(n: int, radius: float, warp: ExprLike = "r", factor: ExprLike = 1) -> float:
    """Value of flux_expression at r = radius."""
    return float(sp.N(flux_expression(n, warp, factor).subs(R, radius), 30))


def flux_limit(n: int, warp: ExprLike = "r", factor: ExprLike = 1) -> float:
    """Limit of the normalized flux as r -> infinity (the ADM mass)."""
    return float(sp.limit(flux_expression(n, warp, factor), R, sp.oo))


def schwarzschild_flux(n: int, A: float, radius: float) -> float:
    """
    Closed-form flux of (1 + A r^(2-n))^(4/(n-2)) delta at r = radius.

    m(R) = 4 (n-1) A (1 + A R^(2-n))^((6-n)/(n-2)), with limit 4 (n-1) A.
    """
    phi = 1 + sp.Float(A, 30) * sp.Float(radius, 30) ** (2 - n)
    return float(4 * (n - 1) * A * phi ** sp.Rational(6 - n, n - 2))


def first_order_shift_coefficient(n: int) -> float:
    """
    d m / d delta at delta = 0 for the factor 1 + delta A rho^(2-n), divided by A.

    Args:
        n: Dimension

    Returns:
        float: The coefficient c of m(g_delta) = m(g) + c delta A
    """
    delta, A = sp.symbols("delta A", positive=True)
    flux = flux_expression(n, "r", 1 + delta * A * R ** (2 - n))
    first = sp.diff(flux, delta).subs(delta, 0)
    return float(sp.limit(sp.simplify(first / A), R, sp.oo))


def arclength_scalar_expression(
    n: int, warp: ExprLike, factor: ExprLike = 1, cross_section_scalar: Optional[ExprLike] = None
) -> sp.Expr:
    """
    Scalar curvature of phi^(4/(n-2)) (dr^2 + f^2 g^N) via its arclength form.

    With ds = phi^(2/(n-2)) dr and F = phi^(2/(n-2)) f the metric is
    ds^2 + F^2 g^N, whose scalar curvature is
    Sc_N/F^2 - 2 (n-1) F_ss/F - (n-1)(n-2) (F_s/F)^2.

    Args:
        n: Dimension
        warp: Warp f
        factor: Conformal factor phi
        cross_section_scalar: Sc_N, the unit round sphere value if None

    Returns:
        sp.Expr: Scalar curvature as a function of r
    """
    sc_n = (n - 1) * (n - 2) if cross_section_scalar is None else _expr(cross_section_scalar)
    speed = _expr(factor) ** sp.Rational(2, n - 2)
    F = speed * _expr(warp)
    F_s = sp.diff(F, R) / speed
    F_ss = sp.diff(F_s, R) / speed
    return sc_n / F**2 - 2 * (n - 1) * F_ss / F - (n - 1) * (n - 2) * (F_s / F) ** 2
