"""
Utility functions for pyconic.
"""

from pyconic.utils.fitting import (
    PowerLawFit,
    fit_branch_coefficient,
    fit_line,
    polynomial_limit,
    power_law_fit,
    three_point_order,
)
from pyconic.utils.io import format_float, write_csv, write_json
from pyconic.utils.ramps import cutoff_partition, smoothstep

__all__ = [
    "PowerLawFit",
    "cutoff_partition",
    "fit_branch_coefficient",
    "fit_line",
    "format_float",
    "polynomial_limit",
    "power_law_fit",
    "smoothstep",
    "three_point_order",
    "write_csv",
    "write_json",
]
