"""Bisection and sweep machinery, checked first against a synthetic classifier."""

import numpy as np
import pytest

from p4lab.analysis import BehaviorClass, BehaviorTag, ClassifierParams, Evidence
from p4lab.equations import EquationId
from p4lab.exceptions import (InconclusiveEndpoint, NoSignChange,
                              RejectedInput)
from p4lab.ode import Span, StepControl
from p4lab.search import (CriticalThreshold, Family, bisect_on,
                          bisect_threshold, sweep)

PARAMS = ClassifierParams()


def fake(tag: BehaviorTag) -> BehaviorClass:
    ev = {
        BehaviorTag.BLOW_UP_NEG: dict(blowup_t_est=-1.0, blowup_sign=-1),
        BehaviorTag.BLOW_UP_POS: dict(blowup_t_est=-1.0, blowup_sign=1),
        BehaviorTag.OSC_LOWER: dict(crossings_lower=5),
        BehaviorTag.LINGER_ZERO: dict(linger_zero_span=2.0),
        BehaviorTag.UNDETERMINED: {},
    }[tag]
    return BehaviorClass(tag, Evidence(window=(0.0, -1.0), params=PARAMS, **ev))


def step_classifier(threshold):
    """Oracle family: blows up negative below the threshold, positive above."""

    def classify_v(v0: float) -> BehaviorClass:
        return fake(BehaviorTag.BLOW_UP_NEG if v0 < threshold
                    else BehaviorTag.BLOW_UP_POS)

    return classify_v


def test_bisect_brackets_a_known_threshold():
    th = bisect_on(step_classifier(0.25), 0.0, 1.0, tol=1e-12)
    lo, hi = th.bracket
    assert lo <= 0.25 <= hi
    assert th.width <= 1e-12
    assert th.class_lo.tag is BehaviorTag.BLOW_UP_NEG
    assert th.class_hi.tag is BehaviorTag.BLOW_UP_POS
    assert lo <= th.midpoint <= hi


def test_bisect_width_halves_exactly():
    # widths are dyadic fractions of the initial interval, bit for bit
    th = bisect_on(step_classifier(0.3), 0.0, 1.0, tol=1e-10)
    assert th.width == 1.0 / 2.0 ** th.iterations
    th2 = bisect_on(step_classifier(1.17), 1.0, 1.3, tol=1e-10)
    assert th2.width == (1.3 - 1.0) / 2.0 ** th2.iterations


def test_bisect_requires_differing_endpoint_classes():
    always = step_classifier(-10.0)  # everything classifies BlowUpPos
    with pytest.raises(NoSignChange):
        bisect_on(always, 0.0, 1.0, tol=1e-10)


def test_bisect_rejects_undetermined_endpoint():
    def classify_v(v0):
        if v0 == 0.0:
            return fake(BehaviorTag.UNDETERMINED)
        return fake(BehaviorTag.BLOW_UP_POS)

    with pytest.raises(InconclusiveEndpoint):
        bisect_on(classify_v, 0.0, 1.0, tol=1e-10)


def test_bisect_narrows_onto_lo_class_boundary_past_a_third_class():
    # a thin foreign stripe sits between the two endpoint classes; the
    # bracket must still pin the boundary of the lo class
    def classify_v(v0):
        if v0 < 0.25:
            return fake(BehaviorTag.BLOW_UP_NEG)
        if v0 < 0.26:
            return fake(BehaviorTag.LINGER_ZERO)
        return fake(BehaviorTag.BLOW_UP_POS)

    th = bisect_on(classify_v, 0.0, 1.0, tol=1e-9)
    lo, hi = th.bracket
    assert th.class_lo.tag is BehaviorTag.BLOW_UP_NEG
    assert lo <= 0.25 <= hi + 1e-9
    assert th.width <= 1e-9


def test_critical_threshold_validates():
    same = fake(BehaviorTag.OSC_LOWER)
    with pytest.raises(RejectedInput):
        CriticalThreshold(bracket=(0.0, 1.0), width=1.0,
                          class_lo=same, class_hi=same, iterations=0)


def test_family_runs_both_legs_and_merges():
    fam = Family(eq=EquationId.PHALF, t0=0.0, y0=0.0,
                 window=Span(-4.0, 2.0),
                 control=StepControl(rtol=1e-9, atol=1e-11))
    traj = fam.run(0.1)
    assert traj.t_min <= -4.0 + 1e-9
    assert traj.t_max >= 2.0 - 1e-9 or traj.termination.kind == "BlowUp"
    assert np.all(np.diff(traj.t) > 0)


def test_family_rejects_window_collapsed_to_t0():
    with pytest.raises(RejectedInput):
        Family(eq=EquationId.PHALF, t0=0.0, y0=0.0,
               window=Span(0.0, 0.0))


def test_family_window_entirely_one_side():
    fam = Family(eq=EquationId.PHALF, t0=0.0, y0=0.0, window=Span(0.0, -6.0))
    traj = fam.run(0.5)
    assert traj.t_max == 0.0
    assert traj.t_min <= -6.0 + 1e-9


def test_real_threshold_bracket_on_short_window():
    fam = Family(eq=EquationId.PHALF, t0=0.0, y0=0.0, window=Span(0.0, -20.0))
    th = bisect_threshold(fam, 1.0, 1.3, tol=1e-6, params=PARAMS)
    lo, hi = th.bracket
    assert th.class_lo.tag is BehaviorTag.OSC_LOWER
    assert th.class_hi.tag is BehaviorTag.BLOW_UP_NEG
    assert 1.16 < lo < hi < 1.18
    assert hi - lo <= 1e-6


def test_sweep_parallel_matches_serial():
    fam = Family(eq=EquationId.PHALF, t0=0.0, y0=0.0, window=Span(0.0, -15.0))
    values = [0.2, 0.65, 1.0, 1.25]
    serial = sweep(fam, values, params=PARAMS, max_workers=None)
    parallel = sweep(fam, values, params=PARAMS, max_workers=4)
    assert [r.v0 for r in serial] == values
    for a, b in zip(serial, parallel):
        assert a == b


def test_sweep_records_behavior_and_termination():
    fam = Family(eq=EquationId.PHALF, t0=0.0, y0=0.0, window=Span(0.0, -15.0))
    rows = sweep(fam, [0.65, 1.25], params=PARAMS)
    assert rows[0].behavior.tag is BehaviorTag.OSC_LOWER
    assert rows[0].termination == "ReachedEnd"
    assert rows[1].behavior.tag is BehaviorTag.BLOW_UP_NEG
    assert rows[1].termination == "BlowUp"
    assert rows[0].n_nodes > 2


def test_sweep_rejects_empty_values():
    fam = Family(eq=EquationId.PHALF, t0=0.0, y0=0.0, window=Span(0.0, -15.0))
    with pytest.raises(RejectedInput):
        sweep(fam, [], params=PARAMS)
