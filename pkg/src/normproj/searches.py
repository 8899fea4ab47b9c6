"""One-dimensional derivative-free searches used throughout the package.

Both searches assume the objective is unimodal on the bracket.  They are
deliberately hand-rolled: callers rely on their determinism (same bracket,
same tolerance, same sequence of probe points every run).
"""

import math

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi ~ 0.618034


def golden_section_max(fn, lo, hi, tol=1e-10, max_iter=200):
    """Maximize a unimodal ``fn`` on [lo, hi].

    Returns ``(x, fn(x))`` with ``x`` within ``tol`` of the maximizer.
    One function evaluation is reused per iteration.
    """
    a, b = float(lo), float(hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


def golden_section_min(fn, lo, hi, tol=1e-10, max_iter=200):
    """Minimize a unimodal ``fn`` on [lo, hi]; returns ``(x, fn(x))``."""
    x, neg = golden_section_max(lambda t: -fn(t), lo, hi, tol=tol, max_iter=max_iter)
    return x, -neg


def quadratic_polish(fn, x, delta=1e-5, rounds=2):
    """Refine a minimizer by fitting a parabola through x-delta, x, x+delta.

    Bracketing searches stall near sqrt(eps/curvature) because function
    differences drown in rounding; the vertex of a parabola fitted at a
    spacing well above the noise floor recovers several more digits.
    """
    for _ in range(rounds):
        f0, fm, fp = fn(x), fn(x - delta), fn(x + delta)
        denom = fm - 2.0 * f0 + fp
        if denom <= 0.0:
            break
        step = 0.5 * delta * (fm - fp) / denom
        if abs(step) > delta:  # parabola untrustworthy this far out
            step = math.copysign(delta, step)
        x = x + step
        delta *= 0.25
    return x


def ternary_min(fn, lo, hi, tol=1e-10, max_iter=400):
    """Classic ternary search for the minimum of a unimodal ``fn``."""
    a, b = float(lo), float(hi)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if fn(m1) < fn(m2):
            b = m2
        else:
            a = m1
    x = 0.5 * (a + b)
    return x, fn(x)
