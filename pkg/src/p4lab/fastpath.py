"""Compiled integration loop for the four built-in equations.

Same Dormand-Prince 5(4) scheme as :mod:`.ode`, specialized to the four
fixed right-hand sides and jitted with numba. The kernel runs in resumable
chunks so a wall-clock budget can be enforced between chunks without
touching the inner loop. Arithmetic mirrors :func:`p4lab.ode.integrate`
statement for statement; a parity test holds the two paths together.
"""

from __future__ import annotations

import math
import time
from typing import Optional

import numpy as np
from numba import njit

from . import ode
from .equations import DEFAULT_EPS_S, EquationId, acceleration
from .exceptions import BudgetExceeded, RejectedInput

__all__ = ["integrate_equation", "EQ_CODES", "warm_up"]

EQ_CODES = {
    EquationId.P: 0,
    EquationId.PBAR: 1,
    EquationId.PHALF: 2,
    EquationId.PBARHALF: 3,
}

_CHUNK_NODES = 16384

# status codes returned by the kernel
_RESUME, _REACHED_END, _BLOWUP_MAG, _BLOWUP_UNDERFLOW, _UNDERFLOW = 0, 1, 2, 3, 4


@njit(cache=True)
def _accel(eq: int, t: float, y: float, v: float, eps_s: float) -> float:
    if eq >= 2:
        sq = y * y
        u = 2.0 * t if eq == 2 else -2.0 * t
        return 0.25 * y * (3.0 * sq + u) * (sq + u)
    if abs(y) < eps_s:
        return math.nan
    u = 4.0 * t if eq == 0 else -4.0 * t
    return v * v / (2.0 * y) + 1.5 * y**3 + u * y * y + 2.0 * t * t * y


@njit(cache=True)
def _growing_tail(out_y, n_out, tail):
    buf = np.empty(11)
    m = 0
    i = n_out - 1
    while i >= 0 and m < 11:
        buf[m] = abs(out_y[i])
        m += 1
        i -= 1
    j = tail.shape[0] - 1
    while j >= 0 and m < 11:
        buf[m] = tail[j]
        m += 1
        j -= 1
    if m < 3:
        return False
    for k in range(m - 1):  # buf[0] is newest
        if not buf[k] > buf[k + 1]:
            return False
    return True


@njit(cache=True)
def _dp54_chunk(eq, t, y, v, kv1, t1, direction, rtol, atol, h, h_min, h_max,
                blowup_bound, eps_s, attempts_cap, facold, last_rejected,
                out_t, out_y, out_v, out_a, tail):
    """Advance until termination, the node buffer fills, or attempts run out.

    Returns (status, n_out, t, y, v, kv1, h, facold, last_rejected, attempts).
    """
    cap_nodes = out_t.shape[0]
    n_out = 0
    attempts = 0
    status = _RESUME
    ky1 = v

    while attempts < attempts_cap and n_out < cap_nodes:
        attempts += 1
        remaining = abs(t1 - t)
        final_step = h >= remaining
        h_use = remaining if final_step else h
        if not final_step and h_use < h_min:
            if _growing_tail(out_y, n_out, tail):
                status = _BLOWUP_UNDERFLOW
            else:
                status = _UNDERFLOW
            break
        hd = h_use * direction

        y2 = y + hd * (0.2 * ky1)
        v2 = v + hd * (0.2 * kv1)
        ky2 = v2
        kv2 = _accel(eq, t + 0.2 * hd, y2, v2, eps_s)

        y3 = y + hd * ((3.0 / 40.0) * ky1 + (9.0 / 40.0) * ky2)
        v3 = v + hd * ((3.0 / 40.0) * kv1 + (9.0 / 40.0) * kv2)
        ky3 = v3
        kv3 = _accel(eq, t + 0.3 * hd, y3, v3, eps_s)

        y4 = y + hd * ((44.0 / 45.0) * ky1 + (-56.0 / 15.0) * ky2 + (32.0 / 9.0) * ky3)
        v4 = v + hd * ((44.0 / 45.0) * kv1 + (-56.0 / 15.0) * kv2 + (32.0 / 9.0) * kv3)
        ky4 = v4
        kv4 = _accel(eq, t + 0.8 * hd, y4, v4, eps_s)

        y5 = y + hd * ((19372.0 / 6561.0) * ky1 + (-25360.0 / 2187.0) * ky2
                       + (64448.0 / 6561.0) * ky3 + (-212.0 / 729.0) * ky4)
        v5 = v + hd * ((19372.0 / 6561.0) * kv1 + (-25360.0 / 2187.0) * kv2
                       + (64448.0 / 6561.0) * kv3 + (-212.0 / 729.0) * kv4)
        ky5 = v5
        kv5 = _accel(eq, t + (8.0 / 9.0) * hd, y5, v5, eps_s)

        y6 = y + hd * ((9017.0 / 3168.0) * ky1 + (-355.0 / 33.0) * ky2
                       + (46732.0 / 5247.0) * ky3 + (49.0 / 176.0) * ky4
                       + (-5103.0 / 18656.0) * ky5)
        v6 = v + hd * ((9017.0 / 3168.0) * kv1 + (-355.0 / 33.0) * kv2
                       + (46732.0 / 5247.0) * kv3 + (49.0 / 176.0) * kv4
                       + (-5103.0 / 18656.0) * kv5)
        ky6 = v6
        kv6 = _accel(eq, t + hd, y6, v6, eps_s)

        t_new = t1 if final_step else t + hd
        y_new = y + hd * ((35.0 / 384.0) * ky1 + (500.0 / 1113.0) * ky3
                          + (125.0 / 192.0) * ky4 + (-2187.0 / 6784.0) * ky5
                          + (11.0 / 84.0) * ky6)
        v_new = v + hd * ((35.0 / 384.0) * kv1 + (500.0 / 1113.0) * kv3
                          + (125.0 / 192.0) * kv4 + (-2187.0 / 6784.0) * kv5
                          + (11.0 / 84.0) * kv6)
        ky7 = v_new
        kv7 = _accel(eq, t_new, y_new, v_new, eps_s)

        err_y = hd * ((71.0 / 57600.0) * ky1 + (-71.0 / 16695.0) * ky3
                      + (71.0 / 1920.0) * ky4 + (-17253.0 / 339200.0) * ky5
                      + (22.0 / 525.0) * ky6 + (-1.0 / 40.0) * ky7)
        err_v = hd * ((71.0 / 57600.0) * kv1 + (-71.0 / 16695.0) * kv3
                      + (71.0 / 1920.0) * kv4 + (-17253.0 / 339200.0) * kv5
                      + (22.0 / 525.0) * kv6 + (-1.0 / 40.0) * kv7)
        sc_y = atol + rtol * max(abs(y), abs(y_new))
        sc_v = atol + rtol * max(abs(v), abs(v_new))
        finite = (math.isfinite(y_new) and math.isfinite(v_new) and math.isfinite(kv7)
                  and math.isfinite(err_y) and math.isfinite(err_v))
        err = (math.sqrt(0.5 * ((err_y / sc_y) ** 2 + (err_v / sc_v) ** 2))
               if finite else math.inf)

        fac11 = err ** 0.17
        if err <= 1.0:
            fac = fac11 / (facold ** 0.04)
            fac = max(0.1, min(5.0, fac / 0.9))
            facold = max(err, 1e-4)
            t = t_new
            y = y_new
            v = v_new
            ky1 = ky7
            kv1 = kv7
            out_t[n_out] = t
            out_y[n_out] = y
            out_v[n_out] = v
            out_a[n_out] = kv7
            n_out += 1
            if abs(y) > blowup_bound:
                status = _BLOWUP_MAG
                break
            if final_step:
                status = _REACHED_END
                break
            h_new = h_use / fac
            if last_rejected != 0:
                h_new = min(h_new, h_use)
            last_rejected = 0
            h = min(h_new, h_max)
        else:
            h = h_use / min(5.0, fac11 / 0.9)
            last_rejected = 1

    return status, n_out, t, y, v, kv1, h, facold, last_rejected, attempts


def _recent_abs_y(chunks_y: list[np.ndarray], window: int = 11) -> np.ndarray:
    """|y| of the last `window` accepted nodes, oldest first, across chunks."""
    pieces: list[np.ndarray] = []
    have = 0
    for arr in reversed(chunks_y):
        take = arr[-(window - have):]
        pieces.append(take)
        have += len(take)
        if have >= window:
            break
    return np.abs(np.concatenate(pieces[::-1]))


def integrate_equation(eq: EquationId, ic: ode.State, span: ode.Span,
                       control: ode.StepControl,
                       deadline: Optional[float] = None) -> ode.Trajectory:
    """Integrate one of the four built-in equations over span.

    deadline, if given, is a time.monotonic() instant; crossing it between
    kernel chunks raises BudgetExceeded. Raises NearZeroDenominator for a
    full-equation start within eps of y = 0.
    """
    if ic.t != span.t0:
        raise RejectedInput(f"initial state t={ic.t!r} does not match span start {span.t0!r}")
    a0 = acceleration(eq, ic.t, ic.y, ic.v)  # raises on an ill-posed start
    if not math.isfinite(a0):
        raise RejectedInput("field is non-finite at the initial state")

    code = EQ_CODES[eq]
    direction = span.direction
    chunks_t = [np.array([ic.t])]
    chunks_y = [np.array([ic.y])]
    chunks_v = [np.array([ic.v])]
    chunks_a = [np.array([a0])]

    t, y, v, kv1 = ic.t, ic.y, ic.v, a0
    h = min(control.h_init, control.h_max, span.length)
    facold = 1e-4
    last_rejected = 0
    attempts_total = 0
    termination: Optional[ode.Termination] = None

    if abs(ic.y) > control.blowup_bound:
        termination = ode.BlowUp(t_est=ic.t)

    tail = np.array([abs(ic.y)])
    while termination is None:
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded("integration exceeded its compute budget")
        attempts_left = control.max_steps - attempts_total
        if attempts_left <= 0:
            termination = ode.MaxSteps()
            break
        cap = min(_CHUNK_NODES, attempts_left)
        out_t = np.empty(cap)
        out_y = np.empty(cap)
        out_v = np.empty(cap)
        out_a = np.empty(cap)
        (status, n_out, t, y, v, kv1, h, facold, last_rejected,
         attempts) = _dp54_chunk(
            code, t, y, v, kv1, span.t1, direction,
            control.rtol, control.atol, h, control.h_min, control.h_max,
            control.blowup_bound, DEFAULT_EPS_S, min(4 * cap, attempts_left),
            facold, last_rejected, out_t, out_y, out_v, out_a, tail)
        attempts_total += attempts
        if n_out:
            chunks_t.append(out_t[:n_out].copy())
            chunks_y.append(out_y[:n_out].copy())
            chunks_v.append(out_v[:n_out].copy())
            chunks_a.append(out_a[:n_out].copy())
            tail = _recent_abs_y(chunks_y)
        if status == _REACHED_END:
            termination = ode.ReachedEnd()
        elif status == _BLOWUP_MAG or status == _BLOWUP_UNDERFLOW:
            termination = ode.BlowUp(t_est=t)
        elif status == _UNDERFLOW:
            termination = ode.StepUnderflow(t=t)
        # _RESUME loops again

    return ode.Trajectory(
        t=np.concatenate(chunks_t), y=np.concatenate(chunks_y),
        v=np.concatenate(chunks_v), a=np.concatenate(chunks_a),
        termination=termination, eq=eq, control=control,
    )


def warm_up() -> None:
    """Force jit compilation so later runs pay no compile latency."""
    integrate_equation(
        EquationId.PHALF, ode.State(0.0, 0.0, 0.5), ode.Span(0.0, -1.0),
        ode.StepControl(rtol=1e-8, atol=1e-10),
    )
