"""Guide curves, concavity regions, the behavior classifier, and zero structure."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from p4lab.analysis import (GUIDES, BehaviorClass, BehaviorTag,
                            ClassifierParams, Evidence, RegionId, classify,
                            concavity_sign, extrema_envelope,
                            zero_structure_check)
from p4lab.equations import EquationId, rhs_Phalf
from p4lab.exceptions import (CoverageError, InsufficientOscillation,
                              InvalidInput, RejectedInput)
from p4lab.fastpath import integrate_equation
from p4lab.ode import Span, State, StepControl

from _oracles import inner_branch, outer_branch

CTRL = StepControl(rtol=1e-10, atol=1e-12)


def run_half(v0, t_end, y0=0.0, t0=0.0):
    return integrate_equation(EquationId.PHALF, State(t0, y0, v0),
                              Span(t0, t_end), CTRL)


# --- guide curves ---------------------------------------------------------

def test_guide_branches_match_oracle_formulas():
    t = np.linspace(-9.0, 2.0, 113)
    assert np.allclose(GUIDES.inner_upper(t), inner_branch(t, +1.0),
                       equal_nan=True)
    assert np.allclose(GUIDES.inner_lower(t), inner_branch(t, -1.0),
                       equal_nan=True)
    assert np.allclose(GUIDES.outer_upper(t), outer_branch(t, +1.0),
                       equal_nan=True)
    assert np.allclose(GUIDES.outer_lower(t), outer_branch(t, -1.0),
                       equal_nan=True)
    assert np.all(GUIDES.axis(t) == 0.0)


def test_guide_polylines_structure():
    lines = GUIDES.polylines(-5.0, 1.0, n=31)
    names = {ln["name"] for ln in lines}
    assert len(lines) == 5 and len(names) == 5
    for ln in lines:
        assert len(ln["t"]) == 31 and len(ln["sigma"]) == 31
    with pytest.raises(InvalidInput):
        GUIDES.polylines(1.0, -1.0)
    with pytest.raises(InvalidInput):
        GUIDES.polylines(0.0, 1.0, n=1)


# --- concavity regions ----------------------------------------------------

REGION_POINTS = [
    (-2.0, 3.0, RegionId.ABOVE_OUTER, 1),
    (-2.0, 1.5, RegionId.BAND_UPPER, -1),
    (-2.0, 0.5, RegionId.CORE_UPPER, 1),
    (-2.0, -0.5, RegionId.CORE_LOWER, -1),
    (-2.0, -1.5, RegionId.BAND_LOWER, 1),
    (-2.0, -3.0, RegionId.BELOW_OUTER, -1),
    (1.0, 0.7, RegionId.RIGHT_UPPER, 1),
    (1.0, -0.7, RegionId.RIGHT_LOWER, -1),
]


@pytest.mark.parametrize("t,sigma,region,sign", REGION_POINTS)
def test_concavity_regions_at_hand_picked_points(t, sigma, region, sign):
    got_sign, got_region = concavity_sign(t, sigma)
    assert got_region is region
    assert got_sign == sign
    # the sign must agree with the governing curvature formula
    assert got_sign == np.sign(rhs_Phalf(t, sigma))


def test_concavity_boundary_labels():
    # "on a curve" means the corresponding factor is exactly zero, so the
    # probe points must make it representable: sigma = 1 on the inner branch
    # needs t = -3/2, on the outer branch t = -1/2
    assert concavity_sign(-2.0, 0.0) == (0, RegionId.ON_AXIS)
    assert concavity_sign(3.0, 0.0) == (0, RegionId.ON_AXIS)
    assert concavity_sign(-1.5, 1.0) == (0, RegionId.ON_INNER_UPPER)
    assert concavity_sign(-1.5, -1.0) == (0, RegionId.ON_INNER_LOWER)
    assert concavity_sign(-0.5, 1.0) == (0, RegionId.ON_OUTER_UPPER)
    assert concavity_sign(-0.5, -1.0) == (0, RegionId.ON_OUTER_LOWER)
    # at t = 0 every curve collapses onto the axis
    assert concavity_sign(0.0, 0.0) == (0, RegionId.ON_AXIS)


@given(t=st.floats(min_value=-8.0, max_value=3.0),
       sigma=st.floats(min_value=-5.0, max_value=5.0))
@settings(max_examples=300)
def test_concavity_sign_matches_rhs_sign_off_the_curves(t, sigma):
    dist = abs(sigma)
    if t <= 0.0:
        for branch in (inner_branch(np.array(t)), outer_branch(np.array(t))):
            dist = min(dist, abs(sigma - float(branch)),
                       abs(sigma + float(branch)))
    if dist <= 1e-3:
        return  # too close to a boundary for a sign to be meaningful
    sign, region = concavity_sign(t, sigma)
    assert sign == np.sign(rhs_Phalf(t, sigma))
    assert not region.value.startswith("on_")


# --- classifier -----------------------------------------------------------

def test_classify_oscillation_about_the_lower_branch():
    traj = run_half(0.5, -40.0)
    out = classify(traj, Span(0.0, -40.0), ClassifierParams())
    assert out.tag is BehaviorTag.OSC_LOWER
    assert out.evidence.crossings_lower >= 3


def test_classify_blowup_with_sign():
    traj = run_half(1.2, -8.0)
    out = classify(traj, Span(0.0, -8.0), ClassifierParams())
    assert out.tag is BehaviorTag.BLOW_UP_NEG
    assert out.evidence.blowup_t_est is not None
    assert out.evidence.blowup_t_est == pytest.approx(-2.456, abs=0.01)


def test_classify_identically_zero_run_lingers_at_zero():
    traj = run_half(0.0, -10.0)
    out = classify(traj, Span(0.0, -10.0), ClassifierParams())
    assert out.tag is BehaviorTag.LINGER_ZERO
    assert out.evidence.linger_zero_span >= ClassifierParams().linger_span


def test_classify_near_threshold_lingers_on_outer_parabola():
    traj = run_half(1.16986859, -8.0)
    out = classify(traj, Span(-6.0, -1.0), ClassifierParams())
    assert out.tag is BehaviorTag.LINGER_OUTER
    assert out.evidence.linger_outer_branch == -1
    assert out.evidence.linger_outer_span >= 1.0


def test_classify_coverage_error_when_run_stops_short():
    traj = run_half(0.5, -5.0)
    with pytest.raises(CoverageError):
        classify(traj, Span(0.0, -20.0), ClassifierParams())


def test_classify_blowup_inside_window_is_not_a_coverage_error():
    traj = run_half(1.2, -40.0)  # diverges near t = -2.46, long before -40
    out = classify(traj, Span(0.0, -40.0), ClassifierParams())
    assert out.tag is BehaviorTag.BLOW_UP_NEG


def test_classify_rejects_bad_params():
    with pytest.raises(RejectedInput):
        ClassifierParams(min_crossings=0)
    with pytest.raises(RejectedInput):
        ClassifierParams(n_samples=4)


def test_behavior_class_validates_tag_against_evidence():
    p = ClassifierParams()
    with pytest.raises(InvalidInput):
        BehaviorClass(BehaviorTag.OSC_UPPER,
                      Evidence(window=(0.0, -1.0), params=p, crossings_upper=0))
    with pytest.raises(InvalidInput):
        BehaviorClass(BehaviorTag.BLOW_UP_POS,
                      Evidence(window=(0.0, -1.0), params=p, blowup_sign=-1,
                               blowup_t_est=-0.5))
    # a consistent pair passes
    BehaviorClass(BehaviorTag.LINGER_ZERO,
                  Evidence(window=(0.0, -5.0), params=p, linger_zero_span=2.0))


def _swap_tag(tag: BehaviorTag) -> BehaviorTag:
    return {
        BehaviorTag.OSC_UPPER: BehaviorTag.OSC_LOWER,
        BehaviorTag.OSC_LOWER: BehaviorTag.OSC_UPPER,
        BehaviorTag.BLOW_UP_POS: BehaviorTag.BLOW_UP_NEG,
        BehaviorTag.BLOW_UP_NEG: BehaviorTag.BLOW_UP_POS,
    }.get(tag, tag)


@pytest.mark.parametrize("v0", [0.3, 0.65, 1.0, 1.25])
def test_classify_commutes_with_dependent_negation(v0):
    from p4lab.transforms import negate_dependent
    traj = run_half(v0, -30.0)
    window = Span(0.0, -30.0)
    base = classify(traj, window, ClassifierParams())
    neg, _ = negate_dependent(traj)
    flipped = classify(neg, window, ClassifierParams())
    assert flipped.tag is _swap_tag(base.tag)


@pytest.mark.parametrize("v0,expected", [
    (0.3, BehaviorTag.OSC_LOWER),
    (1.0, BehaviorTag.OSC_LOWER),
    (1.25, BehaviorTag.BLOW_UP_NEG),
])
def test_classify_independent_of_tolerance_away_from_thresholds(v0, expected):
    window = Span(0.0, -30.0)
    tags = []
    for rtol in (1e-9, 1e-10, 1e-11):
        traj = integrate_equation(
            EquationId.PHALF, State(0.0, 0.0, v0), window,
            StepControl(rtol=rtol, atol=rtol * 1e-2))
        tags.append(classify(traj, window, ClassifierParams()).tag)
    assert tags == [expected] * 3


# --- extrema envelope -----------------------------------------------------

def test_envelope_decays_monotonically_in_same_phase():
    traj = run_half(0.65, -40.0)
    env = extrema_envelope(traj, branch="lower", window=Span(-40.0, -5.0))
    assert env.t.size >= 10
    assert np.all(np.diff(env.t) > 0)
    # extrema alternate between maxima and minima; compare like with like;
    # amplitude decays as t decreases, so it grows along ascending t
    off = np.abs(env.offset)
    assert np.all(off[2:] >= off[:-2] - 1e-12)
    assert np.all(env.amplitude > 0.0)


def test_envelope_requires_enough_oscillation():
    traj = run_half(1.2, -8.0)  # blows up after a fraction of one arch
    with pytest.raises(InsufficientOscillation):
        extrema_envelope(traj, branch="lower", window=Span(-8.0, -1.0))


def test_envelope_rejects_unknown_branch():
    traj = run_half(0.65, -20.0)
    with pytest.raises(InvalidInput):
        extrema_envelope(traj, branch="middle")


# --- zero structure -------------------------------------------------------

def test_zero_structure_of_a_crossing_half_run():
    seg = integrate_equation(EquationId.PHALF, State(-4.0, 1.0, 2.0),
                             Span(-4.0, -1.2), CTRL)
    report = zero_structure_check(seg)
    assert report.ok
    interior = [e for e in report.entries if abs(e.a + 2.157) < 0.01]
    assert len(interior) == 1
    assert interior[0].sign_change is True


def test_zero_structure_of_a_squared_run():
    from p4lab.transforms import square_trajectory
    seg = integrate_equation(EquationId.PHALF, State(-4.0, 1.0, 2.0),
                             Span(-4.0, -1.2), CTRL)
    sq = square_trajectory(seg)
    report = zero_structure_check(sq)
    assert report.ok
    interior = [e for e in report.entries if abs(e.a + 2.157) < 0.01]
    assert len(interior) == 1
    entry = interior[0]
    assert abs(entry.v_at_a) < 1e-5
    assert entry.sign_change is False
    assert entry.curvature > 0.0
