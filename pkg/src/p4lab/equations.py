"""The four vector fields and their residual identities.

The full equation (written for s(t)) reads

    s'' = s'^2/(2s) + (3/2) s^3 + 4 t s^2 + 2 t^2 s

with a mirror variant in which the 4ts^2 term carries a minus sign. Clearing
the denominator and factoring gives the form that stays meaningful at zeros:

    2 s s'' - s'^2 = s^2 (3s + 2t)(s + 2t)

The square-root companion (written for sigma(t)) is polynomial on the right,

    4 sigma'' = sigma (3 sigma^2 + 2t)(sigma^2 + 2t)

again with a mirror variant in which both 2t terms flip sign.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NearZeroDenominator

#: below this |s| the full equation's denominator is considered ill-posed
DEFAULT_EPS_S = 1e-12


class EquationId(enum.Enum):
    """Which of the four concrete equations a field or residual refers to."""

    P = "p"
    PBAR = "pbar"
    PHALF = "phalf"
    PBARHALF = "pbarhalf"

    @property
    def is_half(self) -> bool:
        return self in (EquationId.PHALF, EquationId.PBARHALF)

    @property
    def t_sign(self) -> float:
        """+1 for the plain equations, -1 for the mirrored (bar) ones."""
        return 1.0 if self in (EquationId.P, EquationId.PHALF) else -1.0

    def negated_dependent(self) -> "EquationId":
        """Image under y -> -y: swaps full/bar, fixes the half equations."""
        if self is EquationId.P:
            return EquationId.PBAR
        if self is EquationId.PBAR:
            return EquationId.P
        return self

    def reversed_time(self) -> "EquationId":
        """Image under t -> -t: swaps full/bar and the two half equations."""
        return {
            EquationId.P: EquationId.PBAR,
            EquationId.PBAR: EquationId.P,
            EquationId.PHALF: EquationId.PBARHALF,
            EquationId.PBARHALF: EquationId.PHALF,
        }[self]

    def squared(self) -> "EquationId":
        """Equation satisfied by the square of a solution of a half equation."""
        if not self.is_half:
            raise ValueError(f"squared() only applies to the half equations, got {self}")
        return EquationId.P if self is EquationId.PHALF else EquationId.PBAR

    def square_root(self) -> "EquationId":
        """Half equation satisfied by square roots of positive solutions."""
        if self.is_half:
            raise ValueError(f"square_root() only applies to the full equations, got {self}")
        return EquationId.PHALF if self is EquationId.P else EquationId.PBARHALF

    @classmethod
    def parse(cls, tag: str) -> "EquationId":
        try:
            return cls(tag.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown equation tag {tag!r}; expected one of p, pbar, phalf, pbarhalf"
            ) from None


def rhs_P(t: float, s: float, sdot: float, eps_s: float = DEFAULT_EPS_S) -> float:
    """Acceleration of the full equation; raises if |s| is below the guard."""
    if abs(s) < eps_s:
        raise NearZeroDenominator(
            f"|s|={abs(s):.3e} < {eps_s:.1e}: the full equation is ill-posed at a zero; "
            "use the square-root representation instead"
        )
    return sdot * sdot / (2.0 * s) + 1.5 * s**3 + 4.0 * t * s * s + 2.0 * t * t * s


def rhs_Pbar(t: float, s: float, sdot: float, eps_s: float = DEFAULT_EPS_S) -> float:
    """Mirror of :func:`rhs_P` (the 4ts^2 term carries a minus sign)."""
    if abs(s) < eps_s:
        raise NearZeroDenominator(
            f"|s|={abs(s):.3e} < {eps_s:.1e}: the full equation is ill-posed at a zero; "
            "use the square-root representation instead"
        )
    return sdot * sdot / (2.0 * s) + 1.5 * s**3 - 4.0 * t * s * s + 2.0 * t * t * s


def rhs_Phalf(t, sigma):
    """Polynomial acceleration of the square-root equation. Array-friendly."""
    sq = sigma * sigma
    return 0.25 * sigma * (3.0 * sq + 2.0 * t) * (sq + 2.0 * t)


def rhs_Pbarhalf(t, sigma):
    """Mirror of :func:`rhs_Phalf` (both 2t terms flip sign)."""
    sq = sigma * sigma
    return 0.25 * sigma * (3.0 * sq - 2.0 * t) * (sq - 2.0 * t)


def acceleration(eq: EquationId, t: float, y: float, v: float,
                 eps_s: float = DEFAULT_EPS_S) -> float:
    """Dispatch to the acceleration of any of the four equations."""
    if eq is EquationId.PHALF:
        return rhs_Phalf(t, y)
    if eq is EquationId.PBARHALF:
        return rhs_Pbarhalf(t, y)
    if eq is EquationId.P:
        return rhs_P(t, y, v, eps_s)
    return rhs_Pbar(t, y, v, eps_s)


def acceleration_array(eq: EquationId, t, y, v,
                       eps_s: float = DEFAULT_EPS_S) -> np.ndarray:
    """Vectorized acceleration over node arrays.

    For the full equations, nodes with |y| below eps_s get NaN filled in by
    linear interpolation from their neighbors: the division by y is
    undefined there even though the solution's own curvature is finite, so
    a serialized trajectory that touches zero cannot recover the exact node
    value from (t, y, v) alone.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    if eq is EquationId.PHALF:
        return np.asarray(rhs_Phalf(t, y), dtype=float)
    if eq is EquationId.PBARHALF:
        return np.asarray(rhs_Pbarhalf(t, y), dtype=float)
    sgn = 1.0 if eq is EquationId.P else -1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (v * v / (2.0 * y) + 1.5 * y**3 + sgn * 4.0 * t * y * y
             + 2.0 * t * t * y)
    bad = ~np.isfinite(a) | (np.abs(y) < eps_s)
    if np.any(bad):
        good = np.flatnonzero(~bad)
        if good.size == 0:
            raise NearZeroDenominator("every node sits at a zero of the solution")
        a[bad] = np.interp(np.flatnonzero(bad), good, a[good])
    return a


def field_for(eq: EquationId, eps_s: float = DEFAULT_EPS_S):
    """Integration-friendly field: returns NaN instead of raising at the guard.

    The integrator treats a NaN acceleration as a rejected step, so a full-
    equation trajectory approaching a zero terminates by step underflow
    rather than crashing.
    """
    if eq is EquationId.PHALF:
        return lambda t, y, v: rhs_Phalf(t, y)
    if eq is EquationId.PBARHALF:
        return lambda t, y, v: rhs_Pbarhalf(t, y)
    tsign = eq.t_sign

    def field(t, y, v):
        if abs(y) < eps_s:
            return math.nan
        return v * v / (2.0 * y) + 1.5 * y**3 + tsign * 4.0 * t * y * y + 2.0 * t * t * y

    return field


# ---------------------------------------------------------------------------
# residual identities


@dataclass(frozen=True)
class QuadraticFactor:
    """The factored quadratic Q = (3s+2t)(s+2t) and its t-derivative along a solution."""

    q: float
    qdot: float

    @staticmethod
    def at(t: float, s: float, sdot: float, t_sign: float = 1.0) -> "QuadraticFactor":
        """Q and Qdot at (t, s) with slope sdot; t_sign=-1 gives the mirror variant."""
        u = t_sign * 2.0 * t
        q = (3.0 * s + u) * (s + u)
        qdot = (3.0 * sdot + t_sign * 2.0) * (s + u) + (3.0 * s + u) * (sdot + t_sign * 2.0)
        return QuadraticFactor(q=q, qdot=qdot)


def residual_P_factored(t, s, sdot, sddot, t_sign: float = 1.0):
    """2 s s'' - s'^2 - s^2 (3s+2t)(s+2t); zero on exact solutions, defined at s=0."""
    u = t_sign * 2.0 * t
    return 2.0 * s * sddot - sdot * sdot - s * s * (3.0 * s + u) * (s + u)


def residual_P_factored_scaled(t, s, sdot, sddot, t_sign: float = 1.0):
    """(raw, scaled) residual; scaled divides by max(1, largest term magnitude)."""
    u = t_sign * 2.0 * t
    terms = (2.0 * s * sddot, sdot * sdot, s * s * (3.0 * s + u) * (s + u))
    raw = terms[0] - terms[1] - terms[2]
    scale = max(1.0, abs(terms[0]), abs(terms[1]), abs(terms[2]))
    return raw, raw / scale


def residual_Phalf(t, sigma, sigmaddot, t_sign: float = 1.0):
    """4 sigma'' - sigma (3 sigma^2 + 2t)(sigma^2 + 2t); zero on exact solutions."""
    sq = sigma * sigma
    u = t_sign * 2.0 * t
    return 4.0 * sigmaddot - sigma * (3.0 * sq + u) * (sq + u)


def residual_Phalf_scaled(t, sigma, sigmaddot, t_sign: float = 1.0):
    sq = sigma * sigma
    u = t_sign * 2.0 * t
    terms = (4.0 * sigmaddot, sigma * (3.0 * sq + u) * (sq + u))
    raw = terms[0] - terms[1]
    scale = max(1.0, abs(terms[0]), abs(terms[1]))
    return raw, raw / scale


def residual_third_derivative(t, s, sdot, sddot, sdddot, t_sign: float = 1.0):
    """2 s''' - 2 s' Q - s Qdot with Q the factored quadratic.

    Differentiating the cleared form makes the mixed s's'' terms cancel, so
    s'' does not appear; the argument is kept for signature symmetry with the
    other residuals.
    """
    del sddot
    qf = QuadraticFactor.at(t, s, sdot, t_sign)
    return 2.0 * sdddot - 2.0 * sdot * qf.q - s * qf.qdot


def residual_third_derivative_scaled(t, s, sdot, sddot, sdddot, t_sign: float = 1.0):
    del sddot
    qf = QuadraticFactor.at(t, s, sdot, t_sign)
    terms = (2.0 * sdddot, 2.0 * sdot * qf.q, s * qf.qdot)
    raw = terms[0] - terms[1] - terms[2]
    scale = max(1.0, abs(terms[0]), abs(terms[1]), abs(terms[2]))
    return raw, raw / scale


def residual_scaled(eq: EquationId, t, y, v, a):
    """Scaled residual of the given equation at one phase point (a = y'')."""
    if eq.is_half:
        return residual_Phalf_scaled(t, y, a, eq.t_sign)[1]
    return residual_P_factored_scaled(t, y, v, a, eq.t_sign)[1]


# ---------------------------------------------------------------------------
# residuals along an integrated trajectory (finite differences on dense output)

# Base step for Richardson-extrapolated central second differences on dense
# output. Chosen to balance the two error sources: truncation ~ h^4 y6/1440
# against subtraction roundoff ~ 7 eps |y| / h^2. The crossing point for
# order-one solution values sits near 4e-3, but steep dives toward the outer
# parabola carry y6 large enough that truncation dominates there; 3e-3 keeps
# both regimes below ~5e-8 while costing under 2x in roundoff. Near-singular
# stretches shrink the step with the node spacing.
FD_STEP = 3e-3


def _fd_steps(traj, ts, base, reach: float):
    """Per-point FD step: the base, shrunk where the solution moves fast.

    Two shrink triggers. Tight node spacing marks fast local dynamics (the
    integrator already resolved them); a stencil wider than ~a node interval
    would difference across solution scales, so the step tracks 0.75x the
    spacing. Independently, a singularity can only sit just beyond an end
    (blow-up or underflow truncates the trajectory there) and solution scales
    collapse linearly approaching it, so the step is also capped by a
    fraction of the distance to the nearer end. `reach` is the stencil
    half-width in units of the step; the end cap keeps every evaluation
    inside coverage.
    """
    ts = np.asarray(ts, dtype=float)
    tn = np.asarray(traj.t)
    if tn[0] > tn[-1]:
        tn = tn[::-1]
    h = np.full(ts.shape, base)
    if len(tn) >= 2:
        idx = np.clip(np.searchsorted(tn, ts, side="right") - 1, 0, len(tn) - 2)
        sp = tn[1:] - tn[:-1]
        # Fast dynamics tighten a whole run of intervals; a solitary fine
        # interval instead marks tolerance-driven refinement (atol takes over
        # near a zero of y) where the dense output is at its best. Clamp on
        # the widest of the three intervals around the point so only the
        # former does.
        sp3 = np.maximum(sp, np.maximum(
            np.concatenate((sp[:1], sp[:-1])), np.concatenate((sp[1:], sp[-1:]))))
        h = np.minimum(h, 0.75 * sp3[idx])
    dist = np.minimum(ts - traj.t_min, traj.t_max - ts)
    h = np.minimum(h, np.minimum(0.25 * dist, dist / (reach + 0.5)))
    return np.maximum(h, 1e-12)


def _fd_second(traj, ts, h=FD_STEP):
    """Richardson-extrapolated central second difference of y on dense output."""
    from .ode import eval_dense  # local import to avoid a cycle

    ts = np.asarray(ts, dtype=float)
    hs = _fd_steps(traj, ts, h, reach=1.0)

    def d2(step):
        yp, _ = eval_dense(traj, ts + step)
        ym, _ = eval_dense(traj, ts - step)
        y0, _ = eval_dense(traj, ts)
        return (yp - 2.0 * y0 + ym) / (step * step)

    return (4.0 * d2(hs / 2.0) - d2(hs)) / 3.0


def _fd_third(traj, ts, h=1e-3):
    """Richardson-extrapolated central third difference of y on dense output."""
    from .ode import eval_dense

    ts = np.asarray(ts, dtype=float)
    hs = _fd_steps(traj, ts, h, reach=2.0)

    def d3(step):
        y2p, _ = eval_dense(traj, ts + 2.0 * step)
        y1p, _ = eval_dense(traj, ts + step)
        y1m, _ = eval_dense(traj, ts - step)
        y2m, _ = eval_dense(traj, ts - 2.0 * step)
        return (y2p - 2.0 * y1p + 2.0 * y1m - y2m) / (2.0 * step**3)

    return (4.0 * d3(hs / 2.0) - d3(hs)) / 3.0


def interior_points(traj, n: int, margin: float) -> np.ndarray:
    """n evaluation points uniformly covering the trajectory minus end margins."""
    lo = float(min(traj.t[0], traj.t[-1])) + margin
    hi = float(max(traj.t[0], traj.t[-1])) - margin
    if hi <= lo:
        raise ValueError("trajectory too short for the requested margin")
    return np.linspace(lo, hi, n)


def trajectory_residual(traj, eq: EquationId | None = None, n: int = 400,
                        fd_step: float = FD_STEP, ts: np.ndarray | None = None):
    """Max |scaled residual| of the equation along the trajectory.

    The second derivative is recovered by finite differences on the dense
    output, independently of the field that produced the samples. Returns
    (max_scaled, ts, scaled_values).
    """
    from .ode import eval_dense

    if eq is None:
        eq = traj.eq
    if eq is None:
        raise ValueError("trajectory carries no equation tag; pass eq explicitly")
    if ts is None:
        # 5x keeps the end-distance cap in _fd_steps from squeezing the
        # stencil below the base step right at the first and last samples
        ts = interior_points(traj, n, margin=5.0 * fd_step)
    ys, vs = eval_dense(traj, ts)
    accs = _fd_second(traj, ts, fd_step)
    if eq.is_half:
        terms0 = 4.0 * accs
        sq = ys * ys
        u = eq.t_sign * 2.0 * ts
        terms1 = ys * (3.0 * sq + u) * (sq + u)
        raw = terms0 - terms1
        scale = np.maximum(1.0, np.maximum(np.abs(terms0), np.abs(terms1)))
    else:
        u = eq.t_sign * 2.0 * ts
        terms0 = 2.0 * ys * accs
        terms1 = vs * vs
        terms2 = ys * ys * (3.0 * ys + u) * (ys + u)
        raw = terms0 - terms1 - terms2
        scale = np.maximum(
            1.0, np.maximum(np.abs(terms0), np.maximum(np.abs(terms1), np.abs(terms2)))
        )
    scaled = raw / scale
    return float(np.max(np.abs(scaled))), ts, scaled


def trajectory_third_derivative_residual(traj, eq: EquationId | None = None,
                                         n: int = 300, fd_step: float = 1e-3,
                                         ts: np.ndarray | None = None):
    """Max |scaled| of the third-derivative identity along a full-equation trajectory."""
    from .ode import eval_dense

    if eq is None:
        eq = traj.eq
    if eq is None or eq.is_half:
        raise ValueError("third-derivative identity applies to the full equations")
    if ts is None:
        ts = interior_points(traj, n, margin=6.0 * fd_step)
    ys, vs = eval_dense(traj, ts)
    d3 = _fd_third(traj, ts, fd_step)
    tsn = eq.t_sign
    u = tsn * 2.0 * ts
    q = (3.0 * ys + u) * (ys + u)
    qdot = (3.0 * vs + tsn * 2.0) * (ys + u) + (3.0 * ys + u) * (vs + tsn * 2.0)
    terms0 = 2.0 * d3
    terms1 = 2.0 * vs * q
    terms2 = ys * qdot
    raw = terms0 - terms1 - terms2
    scale = np.maximum(
        1.0, np.maximum(np.abs(terms0), np.maximum(np.abs(terms1), np.abs(terms2)))
    )
    scaled = raw / scale
    return float(np.max(np.abs(scaled))), ts, scaled
