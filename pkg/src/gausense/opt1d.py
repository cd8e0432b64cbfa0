"""Golden-section search for smooth scalar objectives on an interval."""

from __future__ import annotations

import math

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi


def golden_section_min(f, lo: float, hi: float, tol: float = 1e-10,
                       max_iter: int = 400) -> tuple[float, float]:
    """Minimize a unimodal function on [lo, hi].

    Returns (argmin, min); the interval endpoints are also evaluated so a
    boundary minimum is returned exactly.
    """
    if hi < lo:
        raise ValueError("empty bracket")
    a, b = lo, hi
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while b - a > tol and it < max_iter:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
        it += 1
    xm = 0.5 * (a + b)
    candidates = [(f(xm), xm), (f(lo), lo), (f(hi), hi)]
    fbest, xbest = min(candidates, key=lambda t: t[0])
    return xbest, fbest


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-10,
                       max_iter: int = 400) -> tuple[float, float]:
    """Maximize a unimodal function on [lo, hi]; returns (argmax, max)."""
    x, fneg = golden_section_min(lambda t: -f(t), lo, hi, tol, max_iter)
    return x, -fneg
