"""Threshold location and parameter sweeps over initial-slope families.

A family fixes the equation, the initial point (t0, y0), and the
classification window; the initial slope v0 is the swept scalar. Bisection
on v0 between two differently classified endpoints brackets the critical
slope where the qualitative behavior flips.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .analysis import BehaviorClass, BehaviorTag, ClassifierParams, classify
from .equations import EquationId
from .exceptions import InconclusiveEndpoint, NoSignChange, RejectedInput
from .fastpath import integrate_equation
from .ode import Span, State, StepControl, Trajectory, merge_two_sided

__all__ = [
    "Family", "CriticalThreshold", "bisect_on", "bisect_threshold",
    "SweepRow", "sweep",
]


@dataclass(frozen=True)
class Family:
    """One-parameter family of initial value problems, parameterized by slope.

    The window is where behavior is judged; integration always starts at t0
    and runs to whichever window ends lie beyond it, two-sided when the
    window straddles t0.
    """

    eq: EquationId
    t0: float
    y0: float
    window: Span
    control: StepControl = StepControl()

    def __post_init__(self):
        for name in ("t0", "y0"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val)):
                raise RejectedInput(f"{name} must be finite, got {val!r}")

    def run(self, v0: float, deadline: Optional[float] = None) -> Trajectory:
        """Integrate the member with initial slope v0 across the window."""
        lo, hi = sorted((self.window.t0, self.window.t1))
        ic = State(t=self.t0, y=self.y0, v=v0)
        legs = []
        if lo < self.t0:
            legs.append(Span(self.t0, lo))
        if hi > self.t0:
            legs.append(Span(self.t0, hi))
        if not legs:
            # degenerate window at exactly t0
            raise RejectedInput("window collapses to the initial point")
        runs = [integrate_equation(self.eq, ic, leg, self.control, deadline=deadline)
                for leg in legs]
        if len(runs) == 1:
            return runs[0]
        backward = runs[0] if runs[0].t_min < runs[1].t_min else runs[1]
        forward = runs[1] if backward is runs[0] else runs[0]
        return merge_two_sided(backward, forward)

    def classify_at(self, v0: float,
                    params: ClassifierParams = ClassifierParams(),
                    deadline: Optional[float] = None) -> BehaviorClass:
        return classify(self.run(v0, deadline=deadline), self.window, params)


@dataclass(frozen=True)
class CriticalThreshold:
    """Bracket around a slope where the classification flips.

    `width` is tracked by exact halving, so after k iterations it equals
    (v_hi - v_lo) / 2^k to the last bit; bracket[1] is the rounded sum
    bracket[0] + width.
    """

    bracket: tuple[float, float]
    width: float
    class_lo: BehaviorClass
    class_hi: BehaviorClass
    iterations: int

    def __post_init__(self):
        if self.class_lo.tag == self.class_hi.tag:
            raise RejectedInput("bracket endpoints must classify differently")

    @property
    def midpoint(self) -> float:
        return self.bracket[0] + 0.5 * self.width


def bisect_on(classifier: Callable[[float], BehaviorClass],
              v_lo: float, v_hi: float, tol: float,
              max_iter: int = 200) -> CriticalThreshold:
    """Bisection on a scalar keeping differently classified endpoints.

    A midpoint matching the low endpoint's class replaces it; any other
    class, including a third class or Undetermined, replaces the high
    endpoint, since the flip away from the low class then lies in the lower
    half. Endpoint classifications are checked up front: equal tags raise
    NoSignChange and an Undetermined endpoint raises InconclusiveEndpoint.
    """
    if not (math.isfinite(v_lo) and math.isfinite(v_hi) and v_lo < v_hi):
        raise RejectedInput(f"need finite v_lo < v_hi, got ({v_lo!r}, {v_hi!r})")
    if not (tol > 0.0 and math.isfinite(tol)):
        raise RejectedInput(f"tol must be positive and finite, got {tol!r}")

    c_lo = classifier(v_lo)
    c_hi = classifier(v_hi)
    for v, c in ((v_lo, c_lo), (v_hi, c_hi)):
        if c.tag is BehaviorTag.UNDETERMINED:
            raise InconclusiveEndpoint(
                f"endpoint v={v!r} classified Undetermined; widen the window "
                "or adjust classifier params"
            )
    if c_lo.tag == c_hi.tag:
        raise NoSignChange(
            f"both endpoints classify as {c_lo.tag.value}; no transition "
            f"inside [{v_lo!r}, {v_hi!r}]"
        )

    lo = v_lo
    width = v_hi - v_lo
    iterations = 0
    while width > tol and iterations < max_iter:
        width *= 0.5  # exact in binary floating point
        iterations += 1
        mid = lo + width
        c_mid = classifier(mid)
        if c_mid.tag == c_lo.tag:
            lo = mid
            c_lo = c_mid
        else:
            c_hi = c_mid
    return CriticalThreshold(bracket=(lo, lo + width), width=width,
                             class_lo=c_lo, class_hi=c_hi,
                             iterations=iterations)


def bisect_threshold(family: Family, v_lo: float, v_hi: float,
                     tol: float = 1e-10,
                     params: ClassifierParams = ClassifierParams(),
                     deadline: Optional[float] = None) -> CriticalThreshold:
    """Bracket the critical initial slope of a family to width <= tol."""
    return bisect_on(lambda v: family.classify_at(v, params, deadline=deadline),
                     v_lo, v_hi, tol)


@dataclass(frozen=True)
class SweepRow:
    v0: float
    behavior: BehaviorClass
    termination: str
    t_min: float
    t_max: float
    n_nodes: int


def sweep(family: Family, v_values: Sequence[float],
          params: ClassifierParams = ClassifierParams(),
          max_workers: Optional[int] = None,
          deadline: Optional[float] = None) -> list[SweepRow]:
    """Classify every slope in v_values; one row per value, order preserved.

    Rows are mutually independent; max_workers > 1 classifies them on a
    thread pool with results identical to the serial run.
    """
    if len(v_values) == 0:
        raise RejectedInput("v_values must be nonempty")

    def one(v0: float) -> SweepRow:
        traj = family.run(float(v0), deadline=deadline)
        behavior = classify(traj, family.window, params)
        return SweepRow(v0=float(v0), behavior=behavior,
                        termination=traj.termination.kind,
                        t_min=traj.t_min, t_max=traj.t_max, n_nodes=traj.n)

    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(one, v_values))
    return [one(v0) for v0 in v_values]
