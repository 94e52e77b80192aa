"""The Hot-Cold follower: move while the signal holds up, turn when it fades.

The tracker consumes raw dBm samples in two consecutive windows of SWS
samples each. When the second window completes, the two window averages are
compared: a drop in average signal power ("Cold") triggers a fixed-angle
rotation before the next step, anything else ("Hot", ties included) keeps
the robot moving straight. A single sample above the halt threshold freezes
the robot for that cycle because it is already close enough.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class RotationDirection(Enum):
    CCW = "ccw"
    CW = "cw"


class DecisionKind(Enum):
    MOVE_FORWARD = "move_forward"
    ROTATE_THEN_MOVE = "rotate_then_move"
    HALT = "halt"


@dataclass(frozen=True)
class TrackerDecision:
    """One cycle's movement command; rotation_deg is signed, CCW positive."""

    kind: DecisionKind
    rotation_deg: float = 0.0


MOVE_FORWARD = TrackerDecision(DecisionKind.MOVE_FORWARD)
HALT = TrackerDecision(DecisionKind.HALT)


def rotate_then_move(angle_deg: float) -> TrackerDecision:
    return TrackerDecision(DecisionKind.ROTATE_THEN_MOVE, angle_deg)


@dataclass(frozen=True)
class HotColdConfig:
    """Tunables of the double-window differential decision rule.

    halt_threshold_dbm and step_size_m may be left as None when the config is
    used inside a world config; the engine fills them in from the halt
    distance and the robot speed.
    """

    sws: int = 4
    rotation_angle_deg: float = 137.0
    rotation_direction: RotationDirection = RotationDirection.CCW
    halt_threshold_dbm: float | None = None
    step_size_m: float | None = None

    def __post_init__(self) -> None:
        if self.sws < 1:
            raise ValueError(f"samples window size must be >= 1, got {self.sws}")
        if not 0.0 < self.rotation_angle_deg < 360.0:
            raise ValueError(f"rotation angle must be in (0, 360), got {self.rotation_angle_deg}")
        if self.step_size_m is not None and self.step_size_m <= 0.0:
            raise ValueError(f"step size must be positive, got {self.step_size_m}")

    @property
    def signed_rotation_deg(self) -> float:
        sign = 1.0 if self.rotation_direction is RotationDirection.CCW else -1.0
        return sign * self.rotation_angle_deg

    def require_halt_threshold(self) -> float:
        if self.halt_threshold_dbm is None:
            raise ValueError("halt threshold not resolved; set halt_threshold_dbm")
        return self.halt_threshold_dbm


class TrackerPhase(Enum):
    FILLING_FIRST = "filling_first"
    FILLING_SECOND = "filling_second"


@dataclass
class HotColdState:
    """Mutable per-run tracker state: the two sample windows and halt flag."""

    window_a: list[float] = field(default_factory=list)
    window_b: list[float] = field(default_factory=list)
    is_halt: bool = False
    last_averages: tuple[float, float] | None = None
    comparisons: int = 0

    def phase(self, cfg: HotColdConfig) -> TrackerPhase:
        if len(self.window_a) < cfg.sws:
            return TrackerPhase.FILLING_FIRST
        return TrackerPhase.FILLING_SECOND

    def reset_windows(self) -> None:
        self.window_a.clear()
        self.window_b.clear()


def window_average(samples: list[float]) -> float:
    """Arithmetic mean of raw dBm samples (indicator-domain averaging)."""
    if not samples:
        raise ValueError("empty samples window")
    return sum(samples) / len(samples)


def decide(avg_first: float, avg_second: float, cfg: HotColdConfig) -> TrackerDecision:
    """Compare the two window averages; only a strict drop ("Cold") rotates."""
    if avg_first > avg_second:
        return rotate_then_move(cfg.signed_rotation_deg)
    return MOVE_FORWARD


def ingest_sample(state: HotColdState, reading_dbm: float, cfg: HotColdConfig) -> TrackerDecision:
    """Feed one in-range sample and return the movement for this cycle.

    Every sample is appended to the active window, halting cycles included.
    A sample above the halt threshold freezes the robot for the cycle. The
    sample that completes the second window triggers the window comparison
    and the windows reset; every other non-halt sample is followed by a
    plain forward step, so the robot moves once per non-halt cycle.
    """
    if not math.isfinite(reading_dbm):
        raise ValueError(f"non-finite RSSI sample {reading_dbm}")
    threshold = cfg.require_halt_threshold()

    if len(state.window_a) < cfg.sws:
        state.window_a.append(reading_dbm)
    else:
        state.window_b.append(reading_dbm)
    state.is_halt = reading_dbm > threshold
    period_complete = len(state.window_b) == cfg.sws

    if state.is_halt:
        if period_complete:
            state.reset_windows()
        return HALT
    if not period_complete:
        return MOVE_FORWARD

    avg_first = window_average(state.window_a)
    avg_second = window_average(state.window_b)
    state.last_averages = (avg_first, avg_second)
    state.comparisons += 1
    state.reset_windows()
    return decide(avg_first, avg_second, cfg)
