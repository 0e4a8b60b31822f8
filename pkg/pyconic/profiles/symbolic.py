"""
Profiles given by symbolic expressions in r.
"""

from typing import Union

import numpy as np
import sympy as sp

from pyconic.exceptions import ConfigError
from pyconic.profiles.base import BaseProfile, Derivatives

R = sp.Symbol("r", positive=True)


class SymbolicProfile(BaseProfile):
    """
    Profile defined by a sympy expression in the symbol ``r``.

    Derivatives are taken symbolically and compiled with ``sympy.lambdify``.

    Args:
        expression: sympy expression or string parsed with ``sympy.sympify``

    Example:
        >>> f = SymbolicProfile("r + r**2")
        >>> float(f.derivatives(np.array([1.0]))[1][0])
        3.0
    """

    def __init__(self, expression: Union[str, sp.Expr]):
        try:
            expr = sp.sympify(expression, locals={"r": R})
        except (sp.SympifyError, TypeError) as exc:
            raise ConfigError(f"cannot parse profile expression {expression!r}") from exc
        free = expr.free_symbols - {R}
        if free:
            names = sorted(str(s) for s in free)
            raise ConfigError(f"profile expression has unknown symbols {names}")
        self.expression = expr
        d1 = sp.diff(expr, R)
        d2 = sp.diff(d1, R)
        self._funcs = [sp.lambdify(R, e, modules="numpy") for e in (expr, d1, d2)]

    def derivatives(self, r: np.ndarray) -> Derivatives:
        r = np.asarray(r, dtype=float)
        out = []
        for func in self._funcs:
            out.append(np.broadcast_to(np.asarray(func(r), dtype=float), r.shape).copy())
        return out[0], out[1], out[2]

    def is_constant(self) -> bool:
        return bool(self.expression.is_constant())

    def __repr__(self) -> str:
        return f"SymbolicProfile({str(self.expression)!r})"
