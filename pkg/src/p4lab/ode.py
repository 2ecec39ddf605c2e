"""Adaptive Runge-Kutta integration of second-order scalar ODEs.

The integrator is an explicit Dormand-Prince 5(4) embedded pair with FSAL
and proportional-integral step-size control, specialized to systems of the
form y'' = f(t, y, y'). Accepted nodes store (t, y, v, a) where a = f at the
node; dense output is the quintic Hermite interpolant through (y, v, a) of
the bracketing nodes.

Quintic rather than cubic Hermite is used because downstream residual
checks recover second and third derivatives from the dense output by finite
differences; a cubic's O(h^2) second-derivative error at the default step
cap would swamp the tolerances those checks are held to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .exceptions import OutOfRangeError, RejectedInput

__all__ = [
    "State", "Span", "StepControl", "Termination", "ReachedEnd", "BlowUp",
    "StepUnderflow", "MaxSteps", "Trajectory", "ZeroRecord",
    "integrate", "eval_dense", "detect_zeros", "merge_two_sided",
]

Field = Callable[[float, float, float], float]


def _require_finite(name: str, value: float) -> float:
    if not math.isfinite(value):
        raise RejectedInput(f"{name} must be finite, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class State:
    """One phase point: time t, value y, first derivative v."""

    t: float
    y: float
    v: float

    def __post_init__(self):
        _require_finite("t", self.t)
        _require_finite("y", self.y)
        _require_finite("v", self.v)


@dataclass(frozen=True)
class Span:
    """Integration interval from t0 to t1; t1 < t0 means backward integration."""

    t0: float
    t1: float

    def __post_init__(self):
        _require_finite("t0", self.t0)
        _require_finite("t1", self.t1)
        if self.t0 == self.t1:
            raise RejectedInput("span endpoints must differ")

    @property
    def direction(self) -> float:
        return 1.0 if self.t1 > self.t0 else -1.0

    @property
    def length(self) -> float:
        return abs(self.t1 - self.t0)


@dataclass(frozen=True)
class StepControl:
    """Tolerances and step bounds for the adaptive integrator.

    h_max defaults to 0.05 so that finite differences on the dense output
    stay accurate enough for the residual tolerances used in the test suite.
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    h_init: float = 1e-3
    h_min: float = 1e-13
    h_max: float = 0.05
    blowup_bound: float = 1e6
    max_steps: int = 10_000_000

    def __post_init__(self):
        for name in ("rtol", "atol", "h_init", "h_min", "h_max", "blowup_bound"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0.0):
                raise RejectedInput(f"{name} must be a positive finite real, got {value!r}")
        if self.rtol < 1e-14:
            raise RejectedInput(f"rtol must be >= 1e-14, got {self.rtol!r}")
        if not (self.h_min <= self.h_init <= self.h_max):
            raise RejectedInput(
                f"need h_min <= h_init <= h_max, got {self.h_min!r}, "
                f"{self.h_init!r}, {self.h_max!r}"
            )
        if self.max_steps <= 0:
            raise RejectedInput(f"max_steps must be positive, got {self.max_steps!r}")


class Termination:
    """Base tag for how an integration ended."""

    kind: str = "?"

    def as_dict(self) -> dict:
        return {"kind": self.kind}

    def __repr__(self):
        return self.kind

    def __eq__(self, other):
        return isinstance(other, Termination) and self.as_dict() == other.as_dict()

    def __hash__(self):
        return hash(tuple(sorted(self.as_dict().items())))


class ReachedEnd(Termination):
    kind = "ReachedEnd"


@dataclass(frozen=True, repr=False, eq=False)
class BlowUp(Termination):
    """Finite-time divergence; t_est is the time of the last accepted step."""

    t_est: float
    kind = "BlowUp"

    def as_dict(self) -> dict:
        return {"kind": self.kind, "t_est": self.t_est}

    def __repr__(self):
        return f"BlowUp(t_est={self.t_est!r})"


@dataclass(frozen=True, repr=False, eq=False)
class StepUnderflow(Termination):
    """Step size fell below h_min without the blow-up growth signature."""

    t: float
    kind = "StepUnderflow"

    def as_dict(self) -> dict:
        return {"kind": self.kind, "t": self.t}

    def __repr__(self):
        return f"StepUnderflow(t={self.t!r})"


class MaxSteps(Termination):
    kind = "MaxSteps"


def termination_from_dict(d: dict) -> Termination:
    kind = d.get("kind")
    if kind == "ReachedEnd":
        return ReachedEnd()
    if kind == "BlowUp":
        return BlowUp(t_est=float(d["t_est"]))
    if kind == "StepUnderflow":
        return StepUnderflow(t=float(d["t"]))
    if kind == "MaxSteps":
        return MaxSteps()
    raise RejectedInput(f"unknown termination kind {kind!r}")


# quintic Hermite basis on tau in [0, 1]; the six functions weight
# (y0, h*v0, h^2*a0, y1, h*v1, h^2*a1)
def _hermite5_value(tau):
    t2 = tau * tau
    t3 = t2 * tau
    t4 = t3 * tau
    t5 = t4 * tau
    h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5
    h01 = tau - 6.0 * t3 + 8.0 * t4 - 3.0 * t5
    h02 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5)
    h10 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5
    h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5
    h12 = 0.5 * (t3 - 2.0 * t4 + t5)
    return h00, h01, h02, h10, h11, h12


def _hermite5_slope(tau):
    """d/dtau of the value basis (divide by h for d/dt)."""
    t2 = tau * tau
    t3 = t2 * tau
    t4 = t3 * tau
    d00 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4
    d01 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4
    d02 = 0.5 * (2.0 * tau - 9.0 * t2 + 12.0 * t3 - 5.0 * t4)
    d10 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4
    d11 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4
    d12 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4)
    return d00, d01, d02, d10, d11, d12


@dataclass(frozen=True)
class Trajectory:
    """Immutable integration result: node arrays plus termination metadata.

    Nodes are strictly monotone in t in the direction of integration. The
    arrays are read-only; a Trajectory is safe to share between threads.
    """

    t: np.ndarray
    y: np.ndarray
    v: np.ndarray
    a: np.ndarray
    termination: Termination
    eq: Optional["EquationId"] = None  # noqa: F821 - tag set by equation-aware callers
    control: StepControl = dc_field(default_factory=StepControl)

    def __post_init__(self):
        for name in ("t", "y", "v", "a"):
            arr = np.array(np.asarray(getattr(self, name), dtype=float), copy=True)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if not (len(self.t) == len(self.y) == len(self.v) == len(self.a)):
            raise RejectedInput("node arrays must share a length")
        if len(self.t) < 1:
            raise RejectedInput("trajectory needs at least one node")
        if len(self.t) > 1:
            dt = np.diff(self.t)
            if not (np.all(dt > 0) or np.all(dt < 0)):
                raise RejectedInput("node times must be strictly monotone")

    @property
    def n(self) -> int:
        return len(self.t)

    @property
    def t_min(self) -> float:
        return float(min(self.t[0], self.t[-1]))

    @property
    def t_max(self) -> float:
        return float(max(self.t[0], self.t[-1]))

    @property
    def direction(self) -> float:
        if self.n < 2:
            return 1.0
        return 1.0 if self.t[-1] > self.t[0] else -1.0

    def state(self, i: int) -> State:
        return State(t=float(self.t[i]), y=float(self.y[i]), v=float(self.v[i]))

    @property
    def initial(self) -> State:
        return self.state(0)

    @property
    def final(self) -> State:
        return self.state(-1)

    def covers(self, t_lo: float, t_hi: float, slack: float = 1e-9) -> bool:
        return self.t_min - slack <= t_lo and t_hi <= self.t_max + slack

    def with_meta(self, **changes) -> "Trajectory":
        return replace(self, **changes)


@dataclass(frozen=True)
class ZeroRecord:
    """An isolated zero of y at t = a.

    sign_change is False for tangential touches and for zeros sitting on the
    first or last node, where only one side is visible.
    """

    a: float
    v_at_a: float
    sign_change: bool


def _ascending_view(traj: Trajectory):
    if traj.n == 1 or traj.t[1] > traj.t[0]:
        return traj.t, traj.y, traj.v, traj.a
    return traj.t[::-1], traj.y[::-1], traj.v[::-1], traj.a[::-1]


def eval_dense(traj: Trajectory, t):
    """Evaluate (y, v) anywhere inside the trajectory's covered t-range.

    Accepts a scalar or an array; returns matching scalars or arrays. Stored
    nodes are reproduced exactly. Raises OutOfRangeError outside coverage.
    """
    tq = np.asarray(t, dtype=float)
    scalar = tq.ndim == 0
    tq = np.atleast_1d(tq)

    tn, yn, vn, an = _ascending_view(traj)
    lo, hi = tn[0], tn[-1]
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    outside = (tq < lo - slack) | (tq > hi + slack)
    if np.any(outside):
        bad = float(tq[outside][0])
        raise OutOfRangeError(f"t={bad!r} outside trajectory coverage [{lo!r}, {hi!r}]")
    if traj.n == 1:
        y = np.full_like(tq, yn[0])
        v = np.full_like(tq, vn[0])
        return (float(y[0]), float(v[0])) if scalar else (y, v)

    idx = np.clip(np.searchsorted(tn, tq, side="right") - 1, 0, len(tn) - 2)
    t0 = tn[idx]
    h = tn[idx + 1] - t0
    tau = (tq - t0) / h
    h00, h01, h02, h10, h11, h12 = _hermite5_value(tau)
    d00, d01, d02, d10, d11, d12 = _hermite5_slope(tau)
    y0, y1 = yn[idx], yn[idx + 1]
    v0, v1 = vn[idx], vn[idx + 1]
    a0, a1 = an[idx], an[idx + 1]
    hh = h * h
    y = (h00 * y0 + h01 * h * v0 + h02 * hh * a0
         + h10 * y1 + h11 * h * v1 + h12 * hh * a1)
    # Grouped so tau = 0 and tau = 1 return the stored node slope bitwise:
    # the v terms must not pick up a multiply-then-divide by h.
    v = (d00 * y0 / h + d01 * v0 + d02 * h * a0
         + d10 * y1 / h + d11 * v1 + d12 * h * a1)
    if scalar:
        return float(y[0]), float(v[0])
    return y, v


# ---------------------------------------------------------------------------
# the Dormand-Prince 5(4) pair

_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_A71, _A73, _A74, _A75, _A76 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                                -2187.0 / 6784.0, 11.0 / 84.0)
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

_SAFE = 0.9
_BETA = 0.04
_EXPO1 = 0.17  # 1/5 - 0.75*beta, written as a literal so both integration paths agree bitwise
_FAC_SHRINK = 5.0   # max shrink factor per accepted/rejected step
_FAC_GROW = 10.0    # max growth factor per accepted step
_GROWTH_WINDOW = 10  # accepted steps inspected for the blow-up signature


def _growing_tail(ys, window: int = _GROWTH_WINDOW) -> bool:
    """Strictly increasing |y| over the last `window` accepted steps."""
    if len(ys) < 3:
        return False
    tail = ys[-(window + 1):]
    return all(abs(tail[i + 1]) > abs(tail[i]) for i in range(len(tail) - 1))


def integrate(field: Field, ic: State, span: Span, control: StepControl) -> Trajectory:
    """Integrate y'' = field(t, y, v) from ic over span.

    A non-finite field value at the initial state is a rejected input; a
    non-finite value mid-run rejects the step, shrinking it until either the
    region is cleared or the step underflows. Underflow while |y| has grown
    strictly over the recent accepted steps is reported as BlowUp, since the
    step collapse then signals a finite-time singularity; otherwise as
    StepUnderflow. Deterministic for fixed inputs.
    """
    if ic.t != span.t0:
        raise RejectedInput(f"initial state t={ic.t!r} does not match span start {span.t0!r}")
    a0 = field(ic.t, ic.y, ic.v)
    if not (isinstance(a0, (int, float)) and math.isfinite(a0)):
        raise RejectedInput(
            f"field is non-finite at the initial state (t={ic.t!r}, y={ic.y!r}, v={ic.v!r})"
        )

    direction = span.direction
    ts = [ic.t]
    ys = [ic.y]
    vs = [ic.v]
    accs = [float(a0)]

    t, y, v = ic.t, ic.y, ic.v
    ky1, kv1 = v, float(a0)  # FSAL carry
    h = min(control.h_init, control.h_max, span.length)
    facold = 1e-4
    last_rejected = False
    termination: Optional[Termination] = None
    steps = 0

    if abs(y) > control.blowup_bound:
        termination = BlowUp(t_est=t)

    while termination is None:
        if steps >= control.max_steps:
            termination = MaxSteps()
            break
        steps += 1

        remaining = abs(span.t1 - t)
        final_step = h >= remaining
        h_use = remaining if final_step else h
        if not final_step and h_use < control.h_min:
            if _growing_tail(ys):
                termination = BlowUp(t_est=t)
            else:
                termination = StepUnderflow(t=t)
            break
        hd = h_use * direction

        y2 = y + hd * (_A21 * ky1)
        v2 = v + hd * (_A21 * kv1)
        ky2, kv2 = v2, field(t + _C2 * hd, y2, v2)

        y3 = y + hd * (_A31 * ky1 + _A32 * ky2)
        v3 = v + hd * (_A31 * kv1 + _A32 * kv2)
        ky3, kv3 = v3, field(t + _C3 * hd, y3, v3)

        y4 = y + hd * (_A41 * ky1 + _A42 * ky2 + _A43 * ky3)
        v4 = v + hd * (_A41 * kv1 + _A42 * kv2 + _A43 * kv3)
        ky4, kv4 = v4, field(t + _C4 * hd, y4, v4)

        y5 = y + hd * (_A51 * ky1 + _A52 * ky2 + _A53 * ky3 + _A54 * ky4)
        v5 = v + hd * (_A51 * kv1 + _A52 * kv2 + _A53 * kv3 + _A54 * kv4)
        ky5, kv5 = v5, field(t + _C5 * hd, y5, v5)

        y6 = y + hd * (_A61 * ky1 + _A62 * ky2 + _A63 * ky3 + _A64 * ky4 + _A65 * ky5)
        v6 = v + hd * (_A61 * kv1 + _A62 * kv2 + _A63 * kv3 + _A64 * kv4 + _A65 * kv5)
        ky6, kv6 = v6, field(t + hd, y6, v6)

        t_new = span.t1 if final_step else t + hd
        y_new = y + hd * (_A71 * ky1 + _A73 * ky3 + _A74 * ky4 + _A75 * ky5 + _A76 * ky6)
        v_new = v + hd * (_A71 * kv1 + _A73 * kv3 + _A74 * kv4 + _A75 * kv5 + _A76 * kv6)
        ky7, kv7 = v_new, field(t_new, y_new, v_new)

        err_y = hd * (_E1 * ky1 + _E3 * ky3 + _E4 * ky4 + _E5 * ky5 + _E6 * ky6 + _E7 * ky7)
        err_v = hd * (_E1 * kv1 + _E3 * kv3 + _E4 * kv4 + _E5 * kv5 + _E6 * kv6 + _E7 * kv7)
        sc_y = control.atol + control.rtol * max(abs(y), abs(y_new))
        sc_v = control.atol + control.rtol * max(abs(v), abs(v_new))
        finite = (math.isfinite(y_new) and math.isfinite(v_new) and math.isfinite(kv7)
                  and math.isfinite(err_y) and math.isfinite(err_v))
        err = (math.sqrt(0.5 * ((err_y / sc_y) ** 2 + (err_v / sc_v) ** 2))
               if finite else math.inf)

        fac11 = err ** _EXPO1
        if err <= 1.0:
            # accept
            fac = fac11 / (facold ** _BETA)
            fac = max(1.0 / _FAC_GROW, min(_FAC_SHRINK, fac / _SAFE))
            facold = max(err, 1e-4)
            t, y, v = t_new, y_new, v_new
            ky1, kv1 = ky7, kv7
            ts.append(t)
            ys.append(y)
            vs.append(v)
            accs.append(kv7)
            if abs(y) > control.blowup_bound:
                termination = BlowUp(t_est=t)
                break
            if final_step:
                termination = ReachedEnd()
                break
            h_new = h_use / fac
            if last_rejected:
                h_new = min(h_new, h_use)
            last_rejected = False
            h = min(h_new, control.h_max)
        else:
            # reject; an infinite err (non-finite stage) shrinks by the max factor
            h = h_use / min(_FAC_SHRINK, fac11 / _SAFE)
            last_rejected = True

    return Trajectory(
        t=np.asarray(ts), y=np.asarray(ys), v=np.asarray(vs), a=np.asarray(accs),
        termination=termination, control=control,
    )


def merge_two_sided(backward: Trajectory, forward: Trajectory) -> Trajectory:
    """Join a backward and a forward run that share their initial node.

    The result is ascending in t. Termination is the forward run's unless
    only the backward run failed to reach its end, in which case that
    termination is kept (a merged trajectory has two open ends; callers who
    need both should keep the legs).
    """
    if backward.direction >= 0 or forward.direction <= 0:
        raise RejectedInput("expected one backward and one forward trajectory")
    if backward.t[0] != forward.t[0] or backward.y[0] != forward.y[0] \
            or backward.v[0] != forward.v[0]:
        raise RejectedInput("trajectories do not share their initial state")
    termination = forward.termination
    if isinstance(termination, ReachedEnd) and not isinstance(backward.termination, ReachedEnd):
        termination = backward.termination
    return Trajectory(
        t=np.concatenate([backward.t[::-1], forward.t[1:]]),
        y=np.concatenate([backward.y[::-1], forward.y[1:]]),
        v=np.concatenate([backward.v[::-1], forward.v[1:]]),
        a=np.concatenate([backward.a[::-1], forward.a[1:]]),
        termination=termination,
        eq=forward.eq,
        control=forward.control,
    )


def _refine_crossing(traj: Trajectory, t_lo: float, t_hi: float) -> float:
    scale = max(1.0, abs(t_lo), abs(t_hi))
    return float(brentq(lambda tt: eval_dense(traj, tt)[0], t_lo, t_hi,
                        xtol=1e-13 * scale, rtol=4.0 * np.finfo(float).eps))


def _refine_extremum(traj: Trajectory, t_lo: float, t_hi: float) -> float:
    scale = max(1.0, abs(t_lo), abs(t_hi))
    return float(brentq(lambda tt: eval_dense(traj, tt)[1], t_lo, t_hi,
                        xtol=1e-13 * scale, rtol=4.0 * np.finfo(float).eps))


def detect_zeros(traj: Trajectory) -> list[ZeroRecord]:
    """Locate isolated zeros of y: sign changes and tangential touches.

    Sign changes are bracketed between nodes and refined on the dense output.
    A tangential touch is an interior extremum of y whose value is within the
    trajectory's atol of zero without a sign change. Nodes where y is exactly
    zero are reported directly (runs of consecutive exact zeros are not
    isolated zeros and yield no records). Records are ordered along the
    trajectory's direction of integration.
    """
    tn, yn, vn, _ = _ascending_view(traj)
    n = len(tn)
    atol = traj.control.atol
    found: list[ZeroRecord] = []

    if n == 1:
        if yn[0] == 0.0:
            found.append(ZeroRecord(a=float(tn[0]), v_at_a=float(vn[0]), sign_change=False))
        return found

    def record_at(a: float, sign_change: bool):
        ya, va = eval_dense(traj, a)
        if abs(ya) <= max(atol, 1e-12):
            found.append(ZeroRecord(a=float(a), v_at_a=float(va), sign_change=sign_change))

    for i in range(n):
        if yn[i] == 0.0:
            prev_nonzero = yn[i - 1] if i > 0 else 0.0
            next_nonzero = yn[i + 1] if i < n - 1 else 0.0
            if prev_nonzero == 0.0 and next_nonzero == 0.0:
                continue  # inside (or at the edge of) an identically-zero run
            sign_change = bool(prev_nonzero * next_nonzero < 0.0)
            found.append(ZeroRecord(a=float(tn[i]), v_at_a=float(vn[i]),
                                    sign_change=sign_change))

    for i in range(n - 1):
        y0, y1 = yn[i], yn[i + 1]
        if y0 == 0.0 or y1 == 0.0:
            continue  # exact node zeros handled above
        has_extremum = vn[i] * vn[i + 1] < 0.0
        if y0 * y1 < 0.0:
            if has_extremum:
                # the crossing may share the interval with an extremum on the
                # far side; split at the extremum so brentq gets a clean bracket
                t_star = _refine_extremum(traj, float(tn[i]), float(tn[i + 1]))
                y_star, _ = eval_dense(traj, t_star)
                left_changes = y0 * y_star < 0.0
                a = (_refine_crossing(traj, float(tn[i]), t_star) if left_changes
                     else _refine_crossing(traj, t_star, float(tn[i + 1])))
            else:
                a = _refine_crossing(traj, float(tn[i]), float(tn[i + 1]))
            record_at(a, sign_change=True)
        elif has_extremum:
            t_star = _refine_extremum(traj, float(tn[i]), float(tn[i + 1]))
            y_star, v_star = eval_dense(traj, t_star)
            if abs(y_star) <= max(atol, 1e-12):
                # touches zero at the detector's resolution: one tangential
                # zero, even if the interpolant wobbles across by an ulp
                found.append(ZeroRecord(a=float(t_star), v_at_a=float(v_star),
                                        sign_change=False))
            elif y_star * y0 < 0.0:
                # dipped across zero and back inside one step: two crossings
                a1 = _refine_crossing(traj, float(tn[i]), t_star)
                a2 = _refine_crossing(traj, t_star, float(tn[i + 1]))
                record_at(a1, sign_change=True)
                record_at(a2, sign_change=True)

    found.sort(key=lambda r: r.a, reverse=traj.direction < 0)
    # collapse duplicates from a node-exact zero also being seen by refinement
    deduped: list[ZeroRecord] = []
    for rec in found:
        if deduped and abs(rec.a - deduped[-1].a) <= 1e-10 * max(1.0, abs(rec.a)):
            continue
        deduped.append(rec)
    return deduped
