"""Bounded scalar maximization by golden-section search."""

import math

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section_max(f, lo: float, hi: float, xtol: float, max_iters: int = 200):
    """Maximize ``f`` on [lo, hi]; returns (argmax, value).

    Assumes ``f`` is unimodal on the interval; with multiple local maxima it
    returns one of them.  The endpoints are always evaluated so a boundary
    maximum is reported exactly at the boundary.
    """
    if hi < lo:
        raise ValueError("empty search interval")
    f_lo = f(lo)
    f_hi = f(hi)
    best_x, best_f = (lo, f_lo) if f_lo >= f_hi else (hi, f_hi)
    dist = hi - lo
    if dist <= xtol:
        return best_x, best_f
    a, b = lo, hi
    c = a + _INV_PHI_SQ * dist
    d = a + _INV_PHI * dist
    fc = f(c)
    fd = f(d)
    for _ in range(max_iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            dist = b - a
            c = a + _INV_PHI_SQ * dist
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            dist = b - a
            d = a + _INV_PHI * dist
            fd = f(d)
        if dist <= xtol:
            break
    for x_cand, f_cand in ((c, fc), (d, fd)):
        if f_cand > best_f:
            best_x, best_f = x_cand, f_cand
    return best_x, best_f
