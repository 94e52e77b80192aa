import math

import numpy as np
import pytest

from hotcold.tracker import (
    DecisionKind,
    HotColdConfig,
    HotColdState,
    RotationDirection,
    TrackerPhase,
    decide,
    ingest_sample,
    window_average,
)

CFG1 = HotColdConfig(sws=1, halt_threshold_dbm=-51.41)
CFG4 = HotColdConfig(sws=4, halt_threshold_dbm=-51.41)


def feed(state, cfg, samples):
    return [ingest_sample(state, s, cfg) for s in samples]


def test_window_average_examples():
    assert window_average([-50.0, -52.0, -54.0, -56.0]) == -53.0
    assert window_average([-60.0]) == -60.0
    with pytest.raises(ValueError):
        window_average([])


def test_decide_examples():
    assert decide(-50.0, -55.0, CFG4).kind is DecisionKind.ROTATE_THEN_MOVE
    assert decide(-50.0, -55.0, CFG4).rotation_deg == 137.0
    assert decide(-55.0, -50.0, CFG4).kind is DecisionKind.MOVE_FORWARD
    # a tie is not "Cold": keep moving
    assert decide(-50.0, -50.0, CFG4).kind is DecisionKind.MOVE_FORWARD


def test_decide_clockwise_direction():
    cfg = HotColdConfig(sws=1, halt_threshold_dbm=-50.0, rotation_direction=RotationDirection.CW)
    assert decide(-50.0, -55.0, cfg).rotation_deg == -137.0


def test_sws1_increasing_power_moves_forward():
    state = HotColdState()
    decisions = feed(state, CFG1, [-60.0, -58.0])
    assert decisions[0].kind is DecisionKind.MOVE_FORWARD  # first window filling
    assert decisions[1].kind is DecisionKind.MOVE_FORWARD  # comparison: not Cold
    assert state.last_averages == (-60.0, -58.0)


def test_sws1_decreasing_power_rotates():
    state = HotColdState()
    decisions = feed(state, CFG1, [-58.0, -60.0])
    assert decisions[1].kind is DecisionKind.ROTATE_THEN_MOVE
    assert decisions[1].rotation_deg == 137.0


def test_halt_sample_freezes_cycle():
    state = HotColdState()
    decision = ingest_sample(state, -45.0, CFG4)
    assert decision.kind is DecisionKind.HALT
    assert state.is_halt
    # the halting sample still entered the window
    assert state.window_a == [-45.0]


def test_halt_at_period_end_resets_windows_without_decision():
    state = HotColdState()
    decisions = feed(state, CFG1, [-60.0, -45.0])
    assert decisions[1].kind is DecisionKind.HALT
    assert state.window_a == [] and state.window_b == []
    assert state.comparisons == 0


def test_one_comparison_per_double_window():
    rng = np.random.default_rng(21)
    for sws in (1, 2, 4, 7):
        cfg = HotColdConfig(sws=sws, halt_threshold_dbm=-51.41)
        state = HotColdState()
        periods = 9
        samples = list(rng.uniform(-90.0, -60.0, periods * 2 * sws))
        decisions = feed(state, cfg, samples)
        assert state.comparisons == periods
        # every non-halt cycle moves: forward while filling, the comparison
        # outcome on the period's last sample
        assert all(d.kind is not DecisionKind.HALT for d in decisions)
        for i, d in enumerate(decisions):
            if (i + 1) % (2 * sws) != 0:
                assert d.kind is DecisionKind.MOVE_FORWARD


def test_never_rotates_while_halted():
    rng = np.random.default_rng(22)
    cfg = HotColdConfig(sws=3, halt_threshold_dbm=-70.0)
    state = HotColdState()
    for s in rng.uniform(-90.0, -50.0, 600):
        decision = ingest_sample(state, float(s), cfg)
        if state.is_halt:
            assert decision.kind is DecisionKind.HALT


def test_decision_sequence_invariant_to_constant_offset():
    rng = np.random.default_rng(23)
    samples = list(rng.uniform(-90.0, -60.0, 240))
    cfg = HotColdConfig(sws=4, halt_threshold_dbm=-10.0)  # no halts either way
    base = feed(HotColdState(), cfg, samples)
    shifted = feed(HotColdState(), cfg, [s + 7.5 for s in samples])
    assert [d.kind for d in base] == [d.kind for d in shifted]


def test_phase_tracking():
    state = HotColdState()
    assert state.phase(CFG4) is TrackerPhase.FILLING_FIRST
    feed(state, CFG4, [-60.0] * 4)
    assert state.phase(CFG4) is TrackerPhase.FILLING_SECOND
    feed(state, CFG4, [-60.0] * 4)  # period completes, windows reset
    assert state.phase(CFG4) is TrackerPhase.FILLING_FIRST


def test_config_validation():
    with pytest.raises(ValueError):
        HotColdConfig(sws=0)
    with pytest.raises(ValueError):
        HotColdConfig(rotation_angle_deg=0.0)
    with pytest.raises(ValueError):
        HotColdConfig(rotation_angle_deg=360.0)
    with pytest.raises(ValueError):
        HotColdConfig(step_size_m=0.0)
    with pytest.raises(ValueError):
        ingest_sample(HotColdState(), math.nan, CFG4)
    with pytest.raises(ValueError):
        ingest_sample(HotColdState(), -60.0, HotColdConfig(sws=1))  # unresolved threshold
