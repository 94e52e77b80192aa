"""Cycle-stepped world: target mobility, tracker execution, obstacles, metrics.

Each cycle covers one broadcast interval. The target moves first, then
broadcasts; if the robot is in range its tracker consumes the sample and the
resulting movement executes (out of range, the last decision repeats).
Obstacle sensors, when obstacles exist, can preempt the movement with an
avoidance maneuver. The target is confined to the simulation space; the
robot is free to leave it.

Determinism: a run is fully determined by its config. The seed feeds two
independent streams (channel shadowing, target mobility) so that runs
differing only in tracker behavior see the same world.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from .channel import MIN_DISTANCE_M, ChannelParams, noiseless_rssi, rssi
from .geometry import Pose, Vec2, advance, bearing, distance, rotate
from .tracker import (
    DecisionKind,
    HotColdConfig,
    HotColdState,
    TrackerDecision,
    ingest_sample,
)
from .trilateration import (
    TrilaterationConfig,
    TrilaterationState,
    record_observation,
    trilateration_decide,
    update_estimate,
)

KMH_TO_MS = 1.0 / 3.6

SENSOR_MAX_CM = 255.0
SENSOR_TRIGGER_CM = 25.0
SENSOR_RAY_OFFSET_RAD = math.radians(30.0)


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class StaticControl:
    """Tracker placeholder for the control case: the robot never moves."""


@dataclass(frozen=True)
class RandomWaypoint:
    """Walk at constant speed to uniformly drawn points; zero pause on arrival."""

    start: Vec2 | None = None  # None: drawn uniformly in the space


@dataclass(frozen=True)
class FixedPath:
    """Piecewise-linear timed path; the first waypoint (at t=0) is the start."""

    waypoints: tuple[tuple[float, Vec2], ...]

    def __post_init__(self) -> None:
        if len(self.waypoints) < 1:
            raise ValueError("fixed path needs at least one waypoint")
        if self.waypoints[0][0] != 0.0:
            raise ValueError("fixed path must start at time 0")
        times = [t for t, _ in self.waypoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"fixed path times must strictly increase, got {times}")

    def position_at(self, time_s: float) -> Vec2:
        points = self.waypoints
        if time_s <= points[0][0]:
            return points[0][1]
        for (t0, p0), (t1, p1) in zip(points, points[1:]):
            if time_s <= t1:
                frac = (time_s - t0) / (t1 - t0)
                return Vec2(p0.x + frac * (p1.x - p0.x), p0.y + frac * (p1.y - p0.y))
        return points[-1][1]


@dataclass(frozen=True)
class StaticTarget:
    point: Vec2


Mobility = Union[RandomWaypoint, FixedPath, StaticTarget]
Tracker = Union[HotColdConfig, TrilaterationConfig, StaticControl]


@dataclass(frozen=True)
class Rect:
    """Axis-aligned obstacle."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise ValueError(f"degenerate rectangle {self}")


@dataclass(frozen=True)
class WorldConfig:
    width_m: float = 100.0
    height_m: float = 100.0
    duration_s: float = 1000.0
    cycle_period_s: float = 0.5
    robot_speed_kmh: float = 7.2
    target_speed_kmh: float = 3.6
    halt_distance_m: float = 3.0
    channel: ChannelParams = ChannelParams()
    tracker: Tracker = HotColdConfig()
    mobility: Mobility = RandomWaypoint()
    obstacles: tuple[Rect, ...] = ()
    seed: int = 1
    robot_start: Pose | None = None  # None: space center, heading 0

    def __post_init__(self) -> None:
        if self.width_m <= 0.0 or self.height_m <= 0.0:
            raise ValueError(f"space must have positive extent, got {self.width_m}x{self.height_m}")
        if self.cycle_period_s <= 0.0:
            raise ValueError(f"cycle period must be positive, got {self.cycle_period_s}")
        if self.duration_s < 0.0:
            raise ValueError(f"negative duration {self.duration_s}")
        cycles = self.duration_s / self.cycle_period_s
        if abs(cycles - round(cycles)) > 1e-9:
            raise ValueError(
                f"duration {self.duration_s} is not a multiple of the cycle period {self.cycle_period_s}"
            )
        if self.robot_speed_kmh < 0.0 or self.target_speed_kmh < 0.0:
            raise ValueError("speeds must be non-negative")
        if self.halt_distance_m < MIN_DISTANCE_M:
            raise ValueError(f"halt distance below the {MIN_DISTANCE_M} m channel floor")

    @property
    def total_cycles(self) -> int:
        return round(self.duration_s / self.cycle_period_s)

    @property
    def robot_step_m(self) -> float:
        return self.robot_speed_kmh * KMH_TO_MS * self.cycle_period_s

    @property
    def target_step_m(self) -> float:
        return self.target_speed_kmh * KMH_TO_MS * self.cycle_period_s

    def halt_threshold_dbm(self) -> float:
        """Tracker halt threshold: explicit when given, else the signal level
        at the configured halt distance."""
        if isinstance(self.tracker, (HotColdConfig, TrilaterationConfig)):
            if self.tracker.halt_threshold_dbm is not None:
                return self.tracker.halt_threshold_dbm
        return noiseless_rssi(self.halt_distance_m, self.channel)

    def resolved_tracker(self) -> Tracker:
        """Tracker config with the halt threshold and step size filled in."""
        if isinstance(self.tracker, HotColdConfig):
            return replace(
                self.tracker,
                halt_threshold_dbm=self.halt_threshold_dbm(),
                step_size_m=self.tracker.step_size_m or self.robot_step_m,
            )
        if isinstance(self.tracker, TrilaterationConfig):
            return replace(
                self.tracker,
                halt_threshold_dbm=self.halt_threshold_dbm(),
                step_size_m=self.tracker.step_size_m or self.robot_step_m,
            )
        return self.tracker


# ---------------------------------------------------------------------------
# state and per-cycle records


@dataclass(frozen=True)
class CycleRecord:
    time_s: float
    robot: Pose
    target: Vec2
    rssi_dbm: float
    in_range: bool
    in_halt: bool
    decision: str


@dataclass
class WorldState:
    time_s: float
    robot: Pose
    target: Pose
    target_waypoint: Vec2 | None
    tracker_cfg: Tracker
    tracker_state: HotColdState | TrilaterationState | None
    halt_threshold_dbm: float
    channel_rng: np.random.Generator
    mobility_rng: np.random.Generator
    last_decision: TrackerDecision | None = None
    trace: list[CycleRecord] = field(default_factory=list)


def _clamp_to_space(point: Vec2, config: WorldConfig) -> Vec2:
    x = min(max(point.x, 0.0), config.width_m)
    y = min(max(point.y, 0.0), config.height_m)
    if x == point.x and y == point.y:
        return point
    return Vec2(x, y)


def init_world(config: WorldConfig) -> WorldState:
    channel_ss, mobility_ss = np.random.SeedSequence(config.seed).spawn(2)
    mobility_rng = np.random.default_rng(mobility_ss)

    robot = config.robot_start or Pose(Vec2(config.width_m / 2.0, config.height_m / 2.0), 0.0)

    waypoint: Vec2 | None = None
    if isinstance(config.mobility, RandomWaypoint):
        # draw order is fixed: start point first (when not given), then waypoint
        start = config.mobility.start or Vec2(
            float(mobility_rng.uniform(0.0, config.width_m)),
            float(mobility_rng.uniform(0.0, config.height_m)),
        )
        waypoint = Vec2(
            float(mobility_rng.uniform(0.0, config.width_m)),
            float(mobility_rng.uniform(0.0, config.height_m)),
        )
        target = Pose(_clamp_to_space(start, config), 0.0)
    elif isinstance(config.mobility, FixedPath):
        target = Pose(_clamp_to_space(config.mobility.position_at(0.0), config), 0.0)
    else:
        target = Pose(_clamp_to_space(config.mobility.point, config), 0.0)

    tracker_cfg = config.resolved_tracker()
    tracker_state: HotColdState | TrilaterationState | None
    if isinstance(tracker_cfg, HotColdConfig):
        tracker_state = HotColdState()
    elif isinstance(tracker_cfg, TrilaterationConfig):
        tracker_state = TrilaterationState()
    else:
        tracker_state = None

    return WorldState(
        time_s=0.0,
        robot=robot,
        target=target,
        target_waypoint=waypoint,
        tracker_cfg=tracker_cfg,
        tracker_state=tracker_state,
        halt_threshold_dbm=config.halt_threshold_dbm(),
        channel_rng=np.random.default_rng(channel_ss),
        mobility_rng=mobility_rng,
    )


# ---------------------------------------------------------------------------
# mobility


def random_waypoint_step(
    target: Pose,
    waypoint: Vec2,
    config: WorldConfig,
    rng: np.random.Generator,
) -> tuple[Pose, Vec2]:
    """One cycle of waypoint walking; landing on the waypoint draws a new one."""
    step = config.target_step_m
    if step == 0.0:
        return target, waypoint
    gap = distance(target.position, waypoint)
    if gap <= step:
        new_waypoint = Vec2(
            float(rng.uniform(0.0, config.width_m)),
            float(rng.uniform(0.0, config.height_m)),
        )
        heading = bearing(target.position, waypoint) if gap > 0.0 else target.heading_rad
        return Pose(waypoint, heading), new_waypoint
    heading = bearing(target.position, waypoint)
    return advance(Pose(target.position, heading), step), waypoint


def _move_target(state: WorldState, config: WorldConfig, t_end: float) -> None:
    if isinstance(config.mobility, RandomWaypoint):
        assert state.target_waypoint is not None
        state.target, state.target_waypoint = random_waypoint_step(
            state.target, state.target_waypoint, config, state.mobility_rng
        )
    elif isinstance(config.mobility, FixedPath):
        new_pos = _clamp_to_space(config.mobility.position_at(t_end), config)
        moved = distance(state.target.position, new_pos) > 0.0
        heading = bearing(state.target.position, new_pos) if moved else state.target.heading_rad
        state.target = Pose(new_pos, heading)
    # StaticTarget: nothing moves


# ---------------------------------------------------------------------------
# obstacle sensing and avoidance


@dataclass(frozen=True)
class AvoidanceManeuver:
    back_up_m: float
    turn_deg: float


def obstacle_avoidance(left_cm: float, right_cm: float) -> AvoidanceManeuver | None:
    """Corner-sensor rules: back off 10 cm and turn away from the blocked side."""
    for reading in (left_cm, right_cm):
        if not 0.0 <= reading <= SENSOR_MAX_CM:
            raise ValueError(f"sensor reading {reading} outside [0, {SENSOR_MAX_CM}] cm")
    if left_cm < SENSOR_TRIGGER_CM and right_cm < SENSOR_TRIGGER_CM:
        return AvoidanceManeuver(0.10, 45.0)
    if right_cm < SENSOR_TRIGGER_CM:
        return AvoidanceManeuver(0.10, 10.0)
    if left_cm < SENSOR_TRIGGER_CM:
        return AvoidanceManeuver(0.10, -10.0)
    return None


def _ray_rect_distance(origin: Vec2, direction_rad: float, rect: Rect) -> float:
    """Distance along a ray to an axis-aligned rectangle (slab method)."""
    dx = math.cos(direction_rad)
    dy = math.sin(direction_rad)
    t_min, t_max = 0.0, math.inf
    for o, d, lo, hi in ((origin.x, dx, rect.x_min, rect.x_max), (origin.y, dy, rect.y_min, rect.y_max)):
        if abs(d) < 1e-15:
            if o < lo or o > hi:
                return math.inf
            continue
        t1 = (lo - o) / d
        t2 = (hi - o) / d
        if t1 > t2:
            t1, t2 = t2, t1
        t_min = max(t_min, t1)
        t_max = min(t_max, t2)
        if t_min > t_max:
            return math.inf
    return t_min


def sensor_reading_cm(pose: Pose, obstacles: tuple[Rect, ...], side: int) -> float:
    """Ultrasonic reading for the left (+1) or right (-1) front sensor, in cm."""
    direction = pose.heading_rad + side * SENSOR_RAY_OFFSET_RAD
    nearest = min(
        (_ray_rect_distance(pose.position, direction, rect) for rect in obstacles),
        default=math.inf,
    )
    return min(nearest * 100.0, SENSOR_MAX_CM)


# ---------------------------------------------------------------------------
# stepping


def _decision_label(decision: TrackerDecision | None) -> str:
    if decision is None:
        return "none"
    if decision.kind is DecisionKind.ROTATE_THEN_MOVE:
        return f"rotate_then_move({decision.rotation_deg:+.4f})"
    return decision.kind.value


def _execute_decision(robot: Pose, decision: TrackerDecision | None, step_m: float) -> Pose:
    if decision is None or decision.kind is DecisionKind.HALT:
        return robot
    if decision.kind is DecisionKind.ROTATE_THEN_MOVE:
        robot = rotate(robot, math.radians(decision.rotation_deg))
    return advance(robot, step_m)


def step_world(state: WorldState, config: WorldConfig) -> WorldState:
    """Advance the world by one broadcast cycle."""
    if state.time_s >= config.duration_s:
        raise ValueError("simulation already ran for its full duration")
    t_end = state.time_s + config.cycle_period_s

    _move_target(state, config, t_end)

    reading = rssi(state.target.position, state.robot.position, config.channel, state.channel_rng)

    if reading.in_range:
        cfg = state.tracker_cfg
        if isinstance(cfg, HotColdConfig):
            assert isinstance(state.tracker_state, HotColdState)
            decision = ingest_sample(state.tracker_state, reading.value_dbm, cfg)
            state.last_decision = decision
        elif isinstance(cfg, TrilaterationConfig):
            assert isinstance(state.tracker_state, TrilaterationState)
            record_observation(
                state.tracker_state, state.robot.position, reading.value_dbm, config.channel, cfg
            )
            update_estimate(state.tracker_state, cfg)
            decision = trilateration_decide(state.tracker_state, state.robot, reading.value_dbm, cfg)
            state.last_decision = decision
        else:
            decision = None
    else:
        decision = state.last_decision  # out of range: repeat the last decision

    maneuver = None
    if config.obstacles:
        left = sensor_reading_cm(state.robot, config.obstacles, +1)
        right = sensor_reading_cm(state.robot, config.obstacles, -1)
        maneuver = obstacle_avoidance(left, right)

    if maneuver is not None:
        back = Vec2(
            state.robot.position.x - maneuver.back_up_m * math.cos(state.robot.heading_rad),
            state.robot.position.y - maneuver.back_up_m * math.sin(state.robot.heading_rad),
        )
        state.robot = rotate(Pose(back, state.robot.heading_rad), math.radians(maneuver.turn_deg))
        label = f"avoid({maneuver.turn_deg:+.4f})"
    else:
        state.robot = _execute_decision(state.robot, decision, config.robot_step_m)
        label = _decision_label(decision)

    state.trace.append(
        CycleRecord(
            time_s=t_end,
            robot=state.robot,
            target=state.target.position,
            rssi_dbm=reading.value_dbm,
            in_range=reading.in_range,
            in_halt=reading.value_dbm > state.halt_threshold_dbm,
            decision=label,
        )
    )
    state.time_s = t_end
    return state


# ---------------------------------------------------------------------------
# metrics


@dataclass(frozen=True)
class MetricsReport:
    average_distance_m: float  # NaN for an empty run
    cycles_in_range: int
    cycles_in_halt: int
    total_cycles: int

    @property
    def cycles_in_range_pct(self) -> float:
        return 100.0 * self.cycles_in_range / self.total_cycles if self.total_cycles else math.nan

    @property
    def cycles_in_halt_pct(self) -> float:
        return 100.0 * self.cycles_in_halt / self.total_cycles if self.total_cycles else math.nan

    def to_dict(self) -> dict:
        return {
            "average_distance_m": self.average_distance_m,
            "cycles_in_range": self.cycles_in_range,
            "cycles_in_range_pct": self.cycles_in_range_pct,
            "cycles_in_halt": self.cycles_in_halt,
            "cycles_in_halt_pct": self.cycles_in_halt_pct,
            "total_cycles": self.total_cycles,
        }


def compute_metrics(trace: list[CycleRecord]) -> MetricsReport:
    """Per-run KPIs from the cycle trace."""
    if not trace:
        return MetricsReport(math.nan, 0, 0, 0)
    total = len(trace)
    avg = sum(distance(rec.robot.position, rec.target) for rec in trace) / total
    return MetricsReport(
        average_distance_m=avg,
        cycles_in_range=sum(rec.in_range for rec in trace),
        cycles_in_halt=sum(rec.in_halt for rec in trace),
        total_cycles=total,
    )


def run_simulation(config: WorldConfig) -> tuple[MetricsReport, list[CycleRecord]]:
    """Run the configured world for its whole duration."""
    state = init_world(config)
    for _ in range(config.total_cycles):
        step_world(state, config)
    return compute_metrics(state.trace), state.trace


# ---------------------------------------------------------------------------
# trace / metrics serialization

TRACE_COLUMNS = (
    "time_s",
    "robot_x",
    "robot_y",
    "robot_heading_deg",
    "target_x",
    "target_y",
    "rssi_dbm",
    "in_range",
    "in_halt",
    "decision",
)


def trace_csv_lines(trace: list[CycleRecord]) -> list[str]:
    lines = [",".join(TRACE_COLUMNS)]
    for rec in trace:
        lines.append(
            ",".join(
                (
                    f"{rec.time_s:.6f}",
                    f"{rec.robot.position.x:.6f}",
                    f"{rec.robot.position.y:.6f}",
                    f"{math.degrees(rec.robot.heading_rad):.6f}",
                    f"{rec.target.x:.6f}",
                    f"{rec.target.y:.6f}",
                    f"{rec.rssi_dbm:.6f}",
                    str(int(rec.in_range)),
                    str(int(rec.in_halt)),
                    rec.decision,
                )
            )
        )
    return lines


def write_trace_csv(trace: list[CycleRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(trace_csv_lines(trace)) + "\n")


def write_metrics_json(report: MetricsReport, path) -> None:
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
