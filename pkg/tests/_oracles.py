"""Independent numerics the test suite trusts instead of the package's own.

Everything here is deliberately dumb: fixed-step classical Runge-Kutta, dense
sign scans, plain bisection, and the governing formulas re-derived in expanded
form. None of it shares code with the package's adaptive integrator, dense
output, or zero detector, so agreement is evidence rather than tautology.
"""

from __future__ import annotations

import numpy as np


def rk4_second_order(f, t0, y0, v0, t1, n_steps):
    """Fixed-step RK4 for y'' = f(t, y, v). Returns (t, y, v) arrays."""
    h = (t1 - t0) / n_steps
    t = np.empty(n_steps + 1)
    y = np.empty(n_steps + 1)
    v = np.empty(n_steps + 1)
    t[0], y[0], v[0] = t0, y0, v0
    for i in range(n_steps):
        ti, yi, vi = t[i], y[i], v[i]
        k1y = vi
        k1v = f(ti, yi, vi)
        k2y = vi + 0.5 * h * k1v
        k2v = f(ti + 0.5 * h, yi + 0.5 * h * k1y, vi + 0.5 * h * k1v)
        k3y = vi + 0.5 * h * k2v
        k3v = f(ti + 0.5 * h, yi + 0.5 * h * k2y, vi + 0.5 * h * k2v)
        k4y = vi + h * k3v
        k4v = f(ti + h, yi + h * k3y, vi + h * k3v)
        t[i + 1] = ti + h
        y[i + 1] = yi + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        v[i + 1] = vi + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return t, y, v


def scan_sign_changes(y):
    """Count strict sign alternations in a sampled signal, zeros dropped."""
    s = np.sign(np.asarray(y, dtype=float))
    s = s[s != 0.0]
    if s.size < 2:
        return 0
    return int(np.count_nonzero(s[:-1] != s[1:]))


def bisect_scalar(fn, lo, hi, tol=1e-13, max_iter=200):
    """Plain bisection on a callable with a sign change over [lo, hi]."""
    flo = fn(lo)
    fhi = fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    assert flo * fhi < 0.0, "oracle bisection needs a sign change"
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol:
            return mid
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


# Governing formulas re-derived in multiplied-out form, sharing no source
# arrangement with src/p4lab/equations.py.

def quartic_accel_cleared(t, s, sdot, t_sign=1.0):
    """2*s*s'' for the quartic form: sdot^2 + 3 s^4 + 8 t_sign t s^3 + 4 t^2 s^2."""
    return sdot ** 2 + 3.0 * s ** 4 + 8.0 * t_sign * t * s ** 3 \
        + 4.0 * t * t * s * s


def half_accel_expanded(t, sigma, t_sign=1.0):
    """sigma'' for the square-root form, factors multiplied out.

    4 sigma'' = 3 sigma^5 + 8 t_sign t sigma^3 + 4 t^2 sigma.
    """
    return 0.25 * (3.0 * sigma ** 5 + 8.0 * t_sign * t * sigma ** 3
                   + 4.0 * t * t * sigma)


def squared_run_satisfies_quartic(t, sigma, sigma_dot, t_sign=1.0):
    """Residual of s = sigma^2 against the cleared quartic equation.

    Uses the chain rule exactly, so this vanishes identically when
    sigma'' matches half_accel_expanded. Values near machine epsilon
    certify that the squaring substitution is implemented consistently.
    """
    a = half_accel_expanded(t, sigma, t_sign)
    s = sigma * sigma
    sdot = 2.0 * sigma * sigma_dot
    sddot = 2.0 * sigma_dot * sigma_dot + 2.0 * sigma * a
    return 2.0 * s * sddot - quartic_accel_cleared(t, s, sdot, t_sign)


def inner_branch(t, sign=1.0):
    """Inner guide curve sign*sqrt(-2t/3) for t <= 0, NaN past the vertex."""
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, np.nan)
    ok = t <= 0.0
    out[ok] = sign * np.sqrt(-2.0 * t[ok] / 3.0)
    return out if out.shape else float(out)


def outer_branch(t, sign=1.0):
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, np.nan)
    ok = t <= 0.0
    out[ok] = sign * np.sqrt(-2.0 * t[ok])
    return out if out.shape else float(out)
