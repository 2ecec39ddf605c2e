"""Square and square-root maps between solution trajectories.

Squares of square-root-equation solutions solve the full equation; strictly
positive full-equation solutions admit a square root solving the half
equation. Across an isolated zero the square root must switch sign: with
like signs on both sides it fails to satisfy the half equation, with mixed
signs it succeeds, and its slope at the zero is sqrt(s''(a)/2) up to that
sign. The dependent-negation and time-reversal bijections live here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .equations import EquationId
from .exceptions import InvalidInput, NotStrictlyPositive, UnsupportedMultipleZeros
from .ode import Trajectory, ZeroRecord, detect_zeros, eval_dense

__all__ = [
    "SignedSqrtPlan", "square_trajectory", "sqrt_positive",
    "signed_sqrt_at_zero", "sqrt_like_signs_at_zero",
    "negate_dependent", "reverse_time", "second_derivative_at",
]

RICHARDSON_STEP = 1e-4  # base step; paired with half of itself for extrapolation


def second_derivative_at(traj: Trajectory, t: float, h: float = RICHARDSON_STEP) -> float:
    """y''(t) by Richardson-extrapolated central differences on dense output."""

    def d2(step: float) -> float:
        yp, _ = eval_dense(traj, t + step)
        ym, _ = eval_dense(traj, t - step)
        y0, _ = eval_dense(traj, t)
        return (yp - 2.0 * y0 + ym) / (step * step)

    return (4.0 * d2(h / 2.0) - d2(h)) / 3.0


@dataclass(frozen=True)
class SignedSqrtPlan:
    """Sign assignment for a square root across one isolated zero.

    `zero` is either the ZeroRecord from detect_zeros or the bare position.
    """

    zero: "ZeroRecord | float"
    left_sign: int
    right_sign: int

    def __post_init__(self):
        if self.left_sign not in (-1, 1) or self.right_sign not in (-1, 1):
            raise InvalidInput("signs must be +1 or -1")
        if self.left_sign != -self.right_sign:
            raise InvalidInput(
                "like signs on both sides of a zero do not yield a solution; "
                "the signs must be mixed"
            )

    @property
    def position(self) -> float:
        z = self.zero
        return z.a if isinstance(z, ZeroRecord) else float(z)


def _mapped_eq(eq: Optional[EquationId], how: str) -> Optional[EquationId]:
    if eq is None:
        return None
    return getattr(eq, how)()


def square_trajectory(sigma_traj: Trajectory) -> Trajectory:
    """Pointwise square: s = sigma^2, s' = 2 sigma sigma'.

    Node accelerations follow from s'' = 2 sigma sigma'' + 2 sigma'^2; the
    sample grid and termination carry over unchanged.
    """
    sigma = sigma_traj.y
    dsigma = sigma_traj.v
    ddsigma = sigma_traj.a
    return sigma_traj.with_meta(
        y=sigma * sigma,
        v=2.0 * sigma * dsigma,
        a=2.0 * sigma * ddsigma + 2.0 * dsigma * dsigma,
        eq=_mapped_eq(sigma_traj.eq, "squared") if sigma_traj.eq is not None
        and sigma_traj.eq.is_half else None,
    )


def sqrt_positive(s_traj: Trajectory) -> Trajectory:
    """Positive square root of a strictly positive trajectory."""
    if np.min(s_traj.y) <= 0.0:
        raise NotStrictlyPositive(
            f"trajectory attains min {np.min(s_traj.y)!r}; "
            "the positive square root needs s > 0 throughout"
        )
    sigma = np.sqrt(s_traj.y)
    dsigma = s_traj.v / (2.0 * sigma)
    ddsigma = (s_traj.a - 2.0 * dsigma * dsigma) / (2.0 * sigma)
    return s_traj.with_meta(
        y=sigma, v=dsigma, a=ddsigma,
        eq=_mapped_eq(s_traj.eq, "square_root") if s_traj.eq is not None
        and not s_traj.eq.is_half else None,
    )


def _single_zero(s_traj: Trajectory) -> ZeroRecord:
    if np.min(s_traj.y) < 0.0:
        raise InvalidInput(
            "trajectory takes negative values; a square root needs s >= 0 "
            "(a solution cannot change sign at an isolated zero)"
        )
    zeros = detect_zeros(s_traj)
    if len(zeros) > 1:
        raise UnsupportedMultipleZeros(
            f"{len(zeros)} zeros found; split the trajectory and alternate "
            "signs segment by segment"
        )
    if not zeros:
        raise InvalidInput("no zero found; use the positive square root instead")
    return zeros[0]


def _signed_sqrt_nodes(s_traj: Trajectory, a: float, v_at_a: float,
                       left_sign: int, right_sign: int):
    """Transformed node arrays with an exact node inserted at the zero."""
    t = np.asarray(s_traj.t)
    s = np.asarray(s_traj.y)
    ds = np.asarray(s_traj.v)
    dds = np.asarray(s_traj.a)

    # drop nodes too close to the zero: sigma'' = (s'' - 2 sigma'^2)/(2 sigma)
    # cancels catastrophically there when s carries integration error, and a
    # poisoned node curvature would corrupt the interpolant; the inserted
    # node at the zero itself carries the exact limiting values instead
    keep = np.abs(t - a) > 1e-3
    t, s, ds, dds = t[keep], s[keep], ds[keep], dds[keep]

    signs = np.where(t < a, float(left_sign), float(right_sign))
    sigma = signs * np.sqrt(np.maximum(s, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        dsigma = ds / (2.0 * sigma)
        ddsigma = (dds - 2.0 * dsigma * dsigma) / (2.0 * sigma)

    ascending = len(t) < 2 or t[1] > t[0]
    t_asc = t if ascending else t[::-1]
    pos = int(np.searchsorted(t_asc, a))
    if not ascending:
        pos = len(t) - pos
    t = np.insert(t, pos, a)
    sigma = np.insert(sigma, pos, 0.0)
    dsigma = np.insert(dsigma, pos, v_at_a)
    ddsigma = np.insert(ddsigma, pos, 0.0)  # automatic at a zero of the half equation
    return t, sigma, dsigma, ddsigma


def signed_sqrt_at_zero(s_traj: Trajectory, plan: SignedSqrtPlan) -> Trajectory:
    """Square root with mixed signs across one isolated tangential zero.

    The slope at the zero is plan.right_sign * sqrt(s''(a)/2) with s''(a)
    recovered by Richardson-extrapolated finite differences on the dense
    output. The zero itself becomes an exact node (sigma=0, that slope,
    curvature 0).
    """
    zero = _single_zero(s_traj)
    a = plan.position
    if abs(a - zero.a) > 1e-6 * max(1.0, abs(a)):
        raise InvalidInput(
            f"plan places the zero at {a!r} but the trajectory's zero is at {zero.a!r}"
        )
    sddot_a = second_derivative_at(s_traj, a)
    if sddot_a < 0.0:
        raise InvalidInput(f"s''(a) = {sddot_a!r} < 0 at the zero; no real square root")
    v_at_a = plan.right_sign * math.sqrt(sddot_a / 2.0)
    t, sigma, dsigma, ddsigma = _signed_sqrt_nodes(
        s_traj, a, v_at_a, plan.left_sign, plan.right_sign)
    return s_traj.with_meta(
        t=t, y=sigma, v=dsigma, a=ddsigma,
        eq=_mapped_eq(s_traj.eq, "square_root") if s_traj.eq is not None
        and not s_traj.eq.is_half else None,
    )


def sqrt_like_signs_at_zero(s_traj: Trajectory, sign: int = 1) -> Trajectory:
    """Square root with the SAME sign on both sides of the zero.

    This is deliberately not a solution of the half equation: its slope jumps
    at the zero, and the residual check exposes the failure. Provided so the
    failure can be demonstrated, not asserted.
    """
    if sign not in (-1, 1):
        raise InvalidInput("sign must be +1 or -1")
    zero = _single_zero(s_traj)
    sddot_a = second_derivative_at(s_traj, zero.a)
    v_at_a = sign * math.sqrt(max(sddot_a, 0.0) / 2.0)  # the right-limit slope
    t, sigma, dsigma, ddsigma = _signed_sqrt_nodes(
        s_traj, zero.a, v_at_a, sign, sign)
    return s_traj.with_meta(t=t, y=sigma, v=dsigma, a=ddsigma, eq=None)


def negate_dependent(traj: Trajectory,
                     eq: Optional[EquationId] = None) -> tuple[Trajectory, Optional[EquationId]]:
    """y -> -y. Swaps the full equation with its mirror; fixes the half ones."""
    eq = eq if eq is not None else traj.eq
    new_eq = eq.negated_dependent() if eq is not None else None
    out = traj.with_meta(y=-traj.y, v=-traj.v, a=-traj.a, eq=new_eq)
    return out, new_eq


def reverse_time(traj: Trajectory,
                 eq: Optional[EquationId] = None) -> tuple[Trajectory, Optional[EquationId]]:
    """t -> -t. Swaps the full equation with its mirror and the two half ones."""
    from .ode import BlowUp, StepUnderflow

    eq = eq if eq is not None else traj.eq
    new_eq = eq.reversed_time() if eq is not None else None
    termination = traj.termination
    if isinstance(termination, BlowUp):
        termination = BlowUp(t_est=-termination.t_est)
    elif isinstance(termination, StepUnderflow):
        termination = StepUnderflow(t=-termination.t)
    out = traj.with_meta(t=-traj.t, y=traj.y, v=-traj.v, a=traj.a,
                         termination=termination, eq=new_eq)
    return out, new_eq
