"""
Smooth ramps and cutoff functions.
"""

from typing import Tuple

import numpy as np


def smoothstep(x: np.ndarray) -> np.ndarray:
    """
    C^2 quintic ramp 6x^5 - 15x^4 + 10x^3, clipped to [0, 1].

    Args:
        x: Ramp parameter

    Returns:
        np.ndarray: Ramp values, 0 for x <= 0 and 1 for x >= 1
    """
    t = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return t**3 * (10.0 - 15.0 * t + 6.0 * t**2)


def smoothstep_derivatives(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Quintic ramp with its first two derivatives in x.

    Args:
        x: Ramp parameter

    Returns:
        Tuple[np.ndarray, np.ndarray, np.ndarray]: (S, S', S'')
    """
    x = np.asarray(x, dtype=float)
    t = np.clip(x, 0.0, 1.0)
    inside = (x > 0.0) & (x < 1.0)
    s = t**3 * (10.0 - 15.0 * t + 6.0 * t**2)
    ds = np.where(inside, 30.0 * t**2 * (1.0 - t) ** 2, 0.0)
    d2s = np.where(inside, 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t), 0.0)
    return s, ds, d2s


def inner_cutoff(r: np.ndarray, eps: float) -> np.ndarray:
    """Cutoff equal to 1 on (0, eps] and 0 on [2 eps, inf)."""
    return 1.0 - smoothstep((np.asarray(r, dtype=float) - eps) / eps)


def outer_cutoff(r: np.ndarray, radius: float) -> np.ndarray:
    """Cutoff equal to 0 on (0, R] and 1 on [2R, inf)."""
    return smoothstep((np.asarray(r, dtype=float) - radius) / radius)


def cutoff_partition(
    r: np.ndarray, eps: float, radius: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Partition of unity (chi_1, chi_2, chi_3) near the tip, at infinity, and between.

    Args:
        r: Radii
        eps: Tip cutoff radius, must be below radius / 2
        radius: Infinity cutoff radius

    Returns:
        Tuple[np.ndarray, np.ndarray, np.ndarray]: tip, infinity and middle cutoffs
    """
    chi_tip = inner_cutoff(r, eps)
    chi_inf = outer_cutoff(r, radius)
    return chi_tip, chi_inf, 1.0 - chi_tip - chi_inf
