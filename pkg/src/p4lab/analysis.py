"""Qualitative structure of square-root-equation solutions.

Three curves organize the (t, sigma) plane for t <= 0: the axis sigma = 0,
the inner parabola sigma^2 = -2t/3 where the right-hand side changes sign,
and the outer parabola sigma^2 = -2t. Solutions oscillate about an inner
half-parabola, linger along the axis or the outer parabola, or blow up in
finite time; this module turns those descriptions into computable labels
with recorded evidence.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from .exceptions import (CoverageError, InsufficientOscillation, InvalidInput,
                         RejectedInput)
from .ode import (BlowUp, Span, Trajectory, ZeroRecord, _ascending_view,
                  _refine_extremum, detect_zeros, eval_dense)

__all__ = [
    "GuideCurves", "RegionId", "concavity_sign",
    "ClassifierParams", "BehaviorTag", "Evidence", "BehaviorClass", "classify",
    "ExtremaEnvelope", "extrema_envelope",
    "ZeroCheckEntry", "ZeroStructureReport", "zero_structure_check",
]


def _branch_values(t, sign: float, coeff: float):
    """sign * sqrt(coeff * (-t)), NaN where t > 0."""
    tq = np.asarray(t, dtype=float)
    scalar = tq.ndim == 0
    tq = np.atleast_1d(tq)
    out = np.full(tq.shape, np.nan)
    ok = tq <= 0.0
    out[ok] = sign * np.sqrt(coeff * -tq[ok])
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class GuideCurves:
    """Evaluators for the five dividing curves.

    The parabola branches are real only for t <= 0 and evaluate to NaN
    beyond; the axis is defined everywhere.
    """

    def axis(self, t):
        tq = np.asarray(t, dtype=float)
        return 0.0 if tq.ndim == 0 else np.zeros_like(tq)

    def inner_upper(self, t):
        return _branch_values(t, +1.0, 2.0 / 3.0)

    def inner_lower(self, t):
        return _branch_values(t, -1.0, 2.0 / 3.0)

    def outer_upper(self, t):
        return _branch_values(t, +1.0, 2.0)

    def outer_lower(self, t):
        return _branch_values(t, -1.0, 2.0)

    def polylines(self, t_lo: float, t_hi: float, n: int = 257):
        """Named sampled curves over [t_lo, t_hi]; NaN marks undefined."""
        if not (np.isfinite(t_lo) and np.isfinite(t_hi)) or not t_lo < t_hi:
            raise InvalidInput(f"need finite t_lo < t_hi, got ({t_lo!r}, {t_hi!r})")
        if n < 2:
            raise InvalidInput("need at least 2 sample points")
        ts = np.linspace(t_lo, t_hi, n)
        names = ("axis", "inner_upper", "inner_lower", "outer_upper", "outer_lower")
        return [{"name": nm, "t": ts.copy(),
                 "sigma": np.asarray(getattr(self, nm)(ts), dtype=float) + 0.0}
                for nm in names]


GUIDES = GuideCurves()


class RegionId(str, Enum):
    """Cells cut out of the (t, sigma) plane by the three curves.

    Six open regions for t < 0, two for t >= 0 (the parabolas are gone),
    plus labels for landing exactly on a curve.
    """

    ABOVE_OUTER = "above_outer"
    BAND_UPPER = "between_parabolas_upper"
    CORE_UPPER = "inside_inner_upper"
    CORE_LOWER = "inside_inner_lower"
    BAND_LOWER = "between_parabolas_lower"
    BELOW_OUTER = "below_outer"
    RIGHT_UPPER = "right_half_upper"
    RIGHT_LOWER = "right_half_lower"
    ON_AXIS = "on_axis"
    ON_INNER_UPPER = "on_inner_upper"
    ON_INNER_LOWER = "on_inner_lower"
    ON_OUTER_UPPER = "on_outer_upper"
    ON_OUTER_LOWER = "on_outer_lower"


def concavity_sign(t: float, sigma: float) -> tuple[int, RegionId]:
    """Sign of the curvature of a solution through (t, sigma), with its region.

    The curvature sign is the sign of sigma (3 sigma^2 + 2t) (sigma^2 + 2t),
    zero exactly on a curve. The region identifies which cell the point lies
    in, or which curve it sits on.
    """
    t = float(t)
    sigma = float(sigma)
    if not (np.isfinite(t) and np.isfinite(sigma)):
        raise InvalidInput(f"need finite (t, sigma), got ({t!r}, {sigma!r})")
    f1 = sigma
    f2 = 3.0 * sigma * sigma + 2.0 * t
    f3 = sigma * sigma + 2.0 * t
    sign = int(np.sign(f1) * np.sign(f2) * np.sign(f3))

    if f1 == 0.0:
        region = RegionId.ON_AXIS
    elif f2 == 0.0:
        region = RegionId.ON_INNER_UPPER if f1 > 0 else RegionId.ON_INNER_LOWER
    elif f3 == 0.0:
        region = RegionId.ON_OUTER_UPPER if f1 > 0 else RegionId.ON_OUTER_LOWER
    elif t >= 0.0:
        region = RegionId.RIGHT_UPPER if f1 > 0 else RegionId.RIGHT_LOWER
    elif f2 < 0.0:
        region = RegionId.CORE_UPPER if f1 > 0 else RegionId.CORE_LOWER
    elif f3 < 0.0:
        region = RegionId.BAND_UPPER if f1 > 0 else RegionId.BAND_LOWER
    else:
        region = RegionId.ABOVE_OUTER if f1 > 0 else RegionId.BELOW_OUTER
    return sign, region


@dataclass(frozen=True)
class ClassifierParams:
    """Quantitative knobs behind the qualitative labels.

    min_crossings: guide-branch crossings needed to call a run oscillatory.
    linger_dist / linger_span: a run lingers along a curve when it stays
    within linger_dist of it for a contiguous t-span of at least linger_span.
    n_samples: uniform evaluation grid over the window.
    """

    min_crossings: int = 3
    linger_dist: float = 0.05
    linger_span: float = 1.0
    n_samples: int = 4000

    def __post_init__(self):
        if self.min_crossings < 1:
            raise RejectedInput("min_crossings must be >= 1")
        if not (self.linger_dist > 0.0 and np.isfinite(self.linger_dist)):
            raise RejectedInput("linger_dist must be positive and finite")
        if not (self.linger_span > 0.0 and np.isfinite(self.linger_span)):
            raise RejectedInput("linger_span must be positive and finite")
        if self.n_samples < 16:
            raise RejectedInput("n_samples must be >= 16")


class BehaviorTag(str, Enum):
    OSC_UPPER = "OscUpper"
    OSC_LOWER = "OscLower"
    BLOW_UP_POS = "BlowUpPos"
    BLOW_UP_NEG = "BlowUpNeg"
    LINGER_ZERO = "LingerZero"
    LINGER_OUTER = "LingerOuterParabola"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class Evidence:
    """Counts and spans the classification rests on."""

    window: tuple[float, float]
    params: ClassifierParams
    n_samples: int = 0
    crossings_upper: int = 0
    crossings_lower: int = 0
    linger_zero_span: float = 0.0
    linger_outer_span: float = 0.0
    linger_outer_branch: int = 0
    blowup_t_est: Optional[float] = None
    blowup_sign: int = 0


@dataclass(frozen=True)
class BehaviorClass:
    tag: BehaviorTag
    evidence: Evidence

    def __post_init__(self):
        e = self.evidence
        p = e.params
        ok = True
        if self.tag is BehaviorTag.OSC_UPPER:
            ok = e.crossings_upper >= p.min_crossings
        elif self.tag is BehaviorTag.OSC_LOWER:
            ok = e.crossings_lower >= p.min_crossings
        elif self.tag in (BehaviorTag.BLOW_UP_POS, BehaviorTag.BLOW_UP_NEG):
            want = 1 if self.tag is BehaviorTag.BLOW_UP_POS else -1
            ok = e.blowup_t_est is not None and e.blowup_sign == want
        elif self.tag is BehaviorTag.LINGER_ZERO:
            ok = e.linger_zero_span >= p.linger_span
        elif self.tag is BehaviorTag.LINGER_OUTER:
            ok = e.linger_outer_span >= p.linger_span and e.linger_outer_branch in (-1, 1)
        if not ok:
            raise InvalidInput(f"tag {self.tag.value} inconsistent with evidence {e!r}")


def _count_sign_changes(d: np.ndarray) -> int:
    d = d[np.isfinite(d)]
    s = np.sign(d)
    s = s[s != 0.0]
    if s.size < 2:
        return 0
    return int(np.count_nonzero(s[:-1] != s[1:]))


def _longest_run_span(t: np.ndarray, mask: np.ndarray) -> float:
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return 0.0
    cuts = np.flatnonzero(np.diff(idx) > 1)
    starts = idx[np.concatenate(([0], cuts + 1))]
    ends = idx[np.concatenate((cuts, [idx.size - 1]))]
    return float(np.max(t[ends] - t[starts]))


def classify(traj: Trajectory, window: Span,
             params: ClassifierParams = ClassifierParams()) -> BehaviorClass:
    """Label a trajectory's behavior over a t-window.

    Priority: blow-up beats oscillation beats lingering beats Undetermined.
    A blow-up must truncate the trajectory inside the window to count; a
    trajectory that neither covers the window nor blew up inside it cannot
    be judged and raises CoverageError. Oscillation means at least
    params.min_crossings crossings of one inner half-parabola; when both
    branches qualify the one crossed more often wins, with the mean sign of
    sigma breaking ties. Lingering along the axis takes precedence over the
    outer parabola when both spans qualify, unless the outer span is longer.
    """
    lo, hi = (window.t0, window.t1) if window.t0 <= window.t1 else (window.t1, window.t0)
    base = Evidence(window=(lo, hi), params=params)

    if not traj.covers(lo, hi):
        term = traj.termination
        slack = 1e-9 * max(1.0, abs(lo), abs(hi))
        if isinstance(term, BlowUp) and lo - slack <= term.t_est <= hi + slack:
            # growth is toward the truncated end, the node nearest the estimate
            t_nodes = np.asarray(traj.t)
            at_start = abs(t_nodes[0] - term.t_est) <= abs(t_nodes[-1] - term.t_est)
            y_end = float(traj.y[0] if at_start else traj.y[-1])
            sign = 1 if y_end > 0 else -1
            ev = replace(base, blowup_t_est=term.t_est, blowup_sign=sign)
            tag = BehaviorTag.BLOW_UP_POS if sign > 0 else BehaviorTag.BLOW_UP_NEG
            return BehaviorClass(tag, ev)
        raise CoverageError(
            f"trajectory covers [{traj.t_min!r}, {traj.t_max!r}] which misses "
            f"window [{lo!r}, {hi!r}] and no blow-up truncated it inside"
        )

    grid = np.linspace(lo, hi, params.n_samples)
    y, _ = eval_dense(traj, grid)

    inner_up = np.asarray(GUIDES.inner_upper(grid))
    inner_dn = np.asarray(GUIDES.inner_lower(grid))
    cu = _count_sign_changes(y - inner_up)
    cl = _count_sign_changes(y - inner_dn)

    span_zero = _longest_run_span(grid, np.abs(y) < params.linger_dist)
    outer_up = np.asarray(GUIDES.outer_upper(grid))
    outer_dn = np.asarray(GUIDES.outer_lower(grid))
    with np.errstate(invalid="ignore"):
        near_up = np.abs(y - outer_up) < params.linger_dist
        near_dn = np.abs(y - outer_dn) < params.linger_dist
    span_out_up = _longest_run_span(grid, np.where(np.isfinite(outer_up), near_up, False))
    span_out_dn = _longest_run_span(grid, np.where(np.isfinite(outer_dn), near_dn, False))
    out_branch = 1 if span_out_up >= span_out_dn else -1
    span_outer = max(span_out_up, span_out_dn)

    ev = replace(base, n_samples=params.n_samples,
                 crossings_upper=cu, crossings_lower=cl,
                 linger_zero_span=span_zero, linger_outer_span=span_outer,
                 linger_outer_branch=out_branch if span_outer > 0.0 else 0)

    if max(cu, cl) >= params.min_crossings:
        if cu != cl:
            tag = BehaviorTag.OSC_UPPER if cu > cl else BehaviorTag.OSC_LOWER
        else:
            neg = y[grid < 0.0]
            mean = float(np.mean(neg)) if neg.size else float(np.mean(y))
            tag = BehaviorTag.OSC_UPPER if mean >= 0.0 else BehaviorTag.OSC_LOWER
        return BehaviorClass(tag, ev)

    zero_ok = span_zero >= params.linger_span
    outer_ok = span_outer >= params.linger_span
    if zero_ok and (not outer_ok or span_zero >= span_outer):
        return BehaviorClass(BehaviorTag.LINGER_ZERO, ev)
    if outer_ok:
        return BehaviorClass(BehaviorTag.LINGER_OUTER, ev)
    return BehaviorClass(BehaviorTag.UNDETERMINED, ev)


@dataclass(frozen=True)
class ExtremaEnvelope:
    """Local extrema of sigma and their signed offsets from one inner branch.

    Times ascend strictly; offset_i = sigma(t_i) - branch(t_i).
    """

    branch: str
    t: np.ndarray
    sigma: np.ndarray
    offset: np.ndarray

    @property
    def amplitude(self) -> np.ndarray:
        return np.abs(self.offset)


def extrema_envelope(traj: Trajectory, branch: str = "lower",
                     window: Optional[Span] = None) -> ExtremaEnvelope:
    """Envelope of oscillation about an inner half-parabola.

    Extrema are bracketed by slope sign changes between stored nodes and
    refined on the dense output. Only t < 0 carries a branch value, so
    extrema at t >= 0 are excluded. Fewer than two usable extrema raise
    InsufficientOscillation.
    """
    if branch not in ("upper", "lower"):
        raise InvalidInput(f"branch must be 'upper' or 'lower', got {branch!r}")
    tn, yn, vn, _ = _ascending_view(traj)
    lo, hi = tn[0], tn[-1]
    if window is not None:
        wlo, whi = sorted((window.t0, window.t1))
        lo, hi = max(lo, wlo), min(hi, whi)
        if not lo < hi:
            raise InvalidInput("window does not intersect trajectory coverage")

    keep = (tn >= lo) & (tn <= hi)
    tk, vk = tn[keep], vn[keep]
    sign = np.sign(vk)
    flips = np.flatnonzero((sign[:-1] != 0) & (sign[1:] != 0) & (sign[:-1] != sign[1:]))
    t_ext = [ _refine_extremum(traj, float(tk[i]), float(tk[i + 1])) for i in flips ]
    t_ext = np.asarray([t for t in t_ext if t < 0.0 and lo <= t <= hi])
    if t_ext.size >= 2:
        t_ext = np.unique(t_ext)
    if t_ext.size < 2:
        raise InsufficientOscillation(
            f"found {t_ext.size} usable extrema in [{lo!r}, {hi!r}]; need at least 2"
        )
    sig, _ = eval_dense(traj, t_ext)
    ref = GUIDES.inner_upper(t_ext) if branch == "upper" else GUIDES.inner_lower(t_ext)
    return ExtremaEnvelope(branch=branch, t=t_ext, sigma=np.asarray(sig),
                           offset=np.asarray(sig) - np.asarray(ref))


@dataclass(frozen=True)
class ZeroCheckEntry:
    a: float
    v_at_a: float
    sign_change: bool
    curvature: Optional[float]
    ok: bool
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class ZeroStructureReport:
    entries: tuple[ZeroCheckEntry, ...]
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def zero_structure_check(traj: Trajectory, eq=None, slope_tol: float = 1e-6,
                         curvature_tol: float = 1e-5) -> ZeroStructureReport:
    """Check the forced local structure at every detected zero.

    Full equation: a zero forces slope zero there, no sign change, and
    strictly positive curvature. Square-root equation: a zero forces
    curvature zero, and a non-trivial solution crosses with a sign change.
    Violations are reported, never raised. Zeros too close to a coverage
    boundary for the finite-difference stencil get their curvature and
    crossing checks skipped with a note.
    """
    from .transforms import RICHARDSON_STEP, second_derivative_at

    eq = eq if eq is not None else traj.eq
    if eq is None:
        raise InvalidInput("trajectory carries no equation tag; pass eq explicitly")

    entries = []
    violations = []
    for z in detect_zeros(traj):
        notes = []
        checks = []
        edge_room = min(z.a - traj.t_min, traj.t_max - z.a)
        at_edge = edge_room < 2.0 * RICHARDSON_STEP
        curv = None
        if at_edge:
            notes.append("zero at coverage boundary; curvature and crossing checks skipped")
        else:
            curv = float(second_derivative_at(traj, z.a))

        if eq.is_half:
            if curv is not None:
                checks.append((abs(curv) < curvature_tol,
                               f"curvature {curv!r} not ~ 0 at zero {z.a!r}"))
                checks.append((z.sign_change,
                               f"no sign change at zero {z.a!r} of a non-trivial solution"))
        else:
            checks.append((abs(z.v_at_a) < slope_tol,
                           f"slope {z.v_at_a!r} not ~ 0 at zero {z.a!r}"))
            checks.append((not z.sign_change,
                           f"sign change at zero {z.a!r}; squares cannot change sign"))
            if curv is not None:
                checks.append((curv > 0.0,
                               f"curvature {curv!r} not strictly positive at zero {z.a!r}"))

        bad = [msg for passed, msg in checks if not passed]
        violations.extend(bad)
        entries.append(ZeroCheckEntry(
            a=z.a, v_at_a=z.v_at_a, sign_change=z.sign_change,
            curvature=curv, ok=not bad, notes=tuple(notes)))
    return ZeroStructureReport(entries=tuple(entries), violations=tuple(violations))
