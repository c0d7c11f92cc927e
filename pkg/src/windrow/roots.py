"""Scalar root bracketing and bisection used throughout the package.

Bisection is deliberately preferred over faster schemes for the set-point
solvers: every interval involved is bracketed and the iteration is
bit-deterministic, which the reproducibility contract relies on.
"""

from __future__ import annotations

from typing import Callable, Optional

from .errors import ConvergenceError

_MAX_ITER = 200


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    f_lo: Optional[float] = None,
    f_hi: Optional[float] = None,
    xtol: float = 1e-10,
    ftol: float = 0.0,
) -> float:
    """Bisect ``f`` on ``[lo, hi]``; the endpoints must bracket a sign change.

    Stops when the bracket is narrower than ``xtol`` or ``|f| <= ftol``.
    """
    if lo > hi:
        raise ValueError("bisect_root: lo > hi")
    a, b = lo, hi
    fa = f(a) if f_lo is None else f_lo
    fb = f(b) if f_hi is None else f_hi
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise ConvergenceError(f"bisect_root: no sign change on [{lo}, {hi}]")
    for _ in range(_MAX_ITER):
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fm == 0.0 or abs(fm) <= ftol or (b - a) <= xtol:
            return mid
        if (fm > 0.0) == (fa > 0.0):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    return 0.5 * (a + b)


def first_crossing(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    step: float,
    *,
    f_lo: Optional[float] = None,
) -> Optional[tuple[float, float, float, float]]:
    """Walk from ``lo`` towards ``hi`` and return the first sign-change bracket.

    Returns ``(a, b, f(a), f(b))`` for the first sub-interval on which ``f``
    changes sign (early exit), or ``None`` if no crossing is found.  The scan
    tolerates non-monotone ``f``; ``step`` must be small relative to the scale
    on which ``f`` wiggles.
    """
    a = lo
    fa = f(a) if f_lo is None else f_lo
    if fa == 0.0:
        return (a, a, 0.0, 0.0)
    while a < hi:
        b = min(a + step, hi)
        fb = f(b)
        if fb == 0.0 or (fb > 0.0) != (fa > 0.0):
            return (a, b, fa, fb)
        a, fa = b, fb
    return None
