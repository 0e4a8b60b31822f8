"""
Least-squares power-law fits and limit extrapolation.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from sklearn.linear_model import LinearRegression
from sklearn.metrics import r2_score

from pyconic.exceptions import FitError


@dataclass(frozen=True)
class PowerLawFit:
    """
    Result of fitting |y - offset| ~ |c| x^exponent.

    Attributes:
        exponent: Fitted exponent
        coefficient: Fitted coefficient, carrying the sign of y - offset
        residual: Root-mean-square residual of the log-log fit
        r2: Coefficient of determination of the log-log fit
        n_points: Number of samples used
    """

    exponent: float
    coefficient: float
    residual: float
    r2: float
    n_points: int

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.exponent, self.coefficient, self.residual


def _window_mask(x: np.ndarray, window: Optional[Tuple[float, float]]) -> np.ndarray:
    if window is None:
        return np.ones_like(x, dtype=bool)
    lo, hi = window
    if lo >= hi:
        raise FitError(f"empty fit window ({lo:g}, {hi:g})")
    span = hi - lo
    return (x >= lo - 1e-12 * span) & (x <= hi + 1e-12 * span)


def power_law_fit(
    x: np.ndarray,
    y: np.ndarray,
    window: Optional[Tuple[float, float]] = None,
    offset: float = 0.0,
    min_points: int = 3,
) -> PowerLawFit:
    """
    Fit log|y - offset| against log x by least squares.

    Args:
        x: Positive abscissae
        y: Values
        window: Inclusive (x_a, x_b) window; the whole range if None
        offset: Constant subtracted before fitting
        min_points: Minimum number of samples inside the window

    Returns:
        PowerLawFit: Exponent, signed coefficient and residual

    Raises:
        FitError: If the window is too small or y - offset changes sign
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float) - offset
    mask = _window_mask(x, window)
    if mask.sum() < min_points:
        raise FitError(f"fit window holds {int(mask.sum())} samples, need {min_points}")
    xw, yw = x[mask], y[mask]
    if np.any(xw <= 0):
        raise FitError("power-law fit needs positive abscissae")
    if not (np.all(yw > 0) or np.all(yw < 0)):
        raise FitError("values minus offset are not single-signed on the fit window")

    log_x = np.log(xw).reshape(-1, 1)
    log_y = np.log(np.abs(yw))
    model = LinearRegression().fit(log_x, log_y)
    pred = model.predict(log_x)
    residual = float(np.sqrt(np.mean((log_y - pred) ** 2)))
    r2 = float(r2_score(log_y, pred)) if np.ptp(log_y) > 0 else 1.0
    sign = 1.0 if yw[0] > 0 else -1.0
    return PowerLawFit(
        exponent=float(model.coef_[0]),
        coefficient=sign * float(np.exp(model.intercept_)),
        residual=residual,
        r2=r2,
        n_points=int(mask.sum()),
    )


def fit_branch_coefficient(
    x: np.ndarray,
    y: np.ndarray,
    exponent: float,
    window: Optional[Tuple[float, float]] = None,
    intercept: bool = False,
) -> Tuple[float, float, float]:
    """
    Fit y ~ b + c x^exponent with the exponent held fixed.

    Args:
        x: Positive abscissae
        y: Values
        exponent: Fixed branch exponent
        window: Inclusive fit window
        intercept: Whether to fit the constant b (else b = 0)

    Returns:
        Tuple[float, float, float]: (b, c, relative rms residual)
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = _window_mask(x, window)
    if mask.sum() < 2:
        raise FitError("branch-coefficient window holds fewer than 2 samples")
    basis = (x[mask] ** exponent).reshape(-1, 1)
    # rescale the column so the regression is well conditioned
    scale = float(np.max(np.abs(basis))) or 1.0
    model = LinearRegression(fit_intercept=intercept).fit(basis / scale, y[mask])
    pred = model.predict(basis / scale)
    norm = float(np.max(np.abs(y[mask]))) or 1.0
    residual = float(np.sqrt(np.mean((y[mask] - pred) ** 2))) / norm
    b = float(model.intercept_) if intercept else 0.0
    return b, float(model.coef_[0]) / scale, residual


def fit_line(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, float]:
    """
    Ordinary least-squares line y = intercept + slope x.

    Returns:
        Tuple[float, float, float]: (slope, intercept, 1 - R^2)
    """
    x = np.asarray(x, dtype=float).reshape(-1, 1)
    y = np.asarray(y, dtype=float)
    model = LinearRegression().fit(x, y)
    pred = model.predict(x)
    if np.ptp(y) == 0:
        deviation = 0.0
    else:
        deviation = 1.0 - float(r2_score(y, pred))
    return float(model.coef_[0]), float(model.intercept_), deviation


def polynomial_limit(x: Sequence[float], y: Sequence[float]) -> float:
    """
    Value at x = 0 of the interpolating polynomial through (x_i, y_i).

    Evaluated by Neville's recursion, which stays accurate when the nodes
    are tiny (x = R^-kappa for large R).

    Args:
        x: Distinct nodes
        y: Values

    Returns:
        float: Extrapolated value at 0
    """
    xs = np.asarray(x, dtype=float)
    table = np.asarray(y, dtype=float).copy()
    m = xs.size
    for level in range(1, m):
        for i in range(m - level):
            j = i + level
            table[i] = (xs[j] * table[i] - xs[i] * table[i + 1]) / (xs[j] - xs[i])
    return float(table[0])


def three_point_order(radii: Sequence[float], values: Sequence[float]) -> float:
    """
    Correction order kappa of v(R) = m + c R^-kappa from three samples.

    Args:
        radii: Three increasing radii
        values: Values at those radii

    Returns:
        float: kappa, or nan if the differences do not define one
    """
    r1, r2, r3 = (float(r) for r in radii)
    v1, v2, v3 = (float(v) for v in values)
    d1, d2 = v2 - v1, v3 - v2
    if d1 == 0.0 or d2 == 0.0 or np.sign(d1) != np.sign(d2):
        return float("nan")
    target = np.log(d1 / d2)
    if np.isclose(np.log(r2 / r1), np.log(r3 / r2), rtol=1e-12):
        kappa = target / np.log(r2 / r1)
        return float(kappa) if kappa > 0 else float("nan")

    def mismatch(k: float) -> float:
        a = r1**-k - r2**-k
        b = r2**-k - r3**-k
        return float(np.log(a / b) - target)

    lo, hi = 1e-6, 50.0
    try:
        if mismatch(lo) * mismatch(hi) > 0:
            return float("nan")
        return float(brentq(mismatch, lo, hi, xtol=1e-14))
    except (ValueError, FloatingPointError, ZeroDivisionError):
        return float("nan")
