"""Planar vectors, poses, and the motion primitives shared by the whole toolkit.

Angles are stored in radians internally; degrees are accepted and produced
only at configuration and output boundaries. Positive rotations are
counter-clockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


def normalize_heading(angle_rad: float) -> float:
    """Wrap an angle to [0, 2*pi)."""
    wrapped = angle_rad % TWO_PI
    if wrapped >= TWO_PI:
        # float modulo of a tiny negative can round up to exactly 2*pi
        wrapped -= TWO_PI
    return wrapped


@dataclass(frozen=True)
class Vec2:
    """A point or displacement in the plane, in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite vector components ({self.x}, {self.y})")

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Pose:
    """Position plus heading; the heading is always normalized to [0, 2*pi)."""

    position: Vec2
    heading_rad: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.heading_rad):
            raise ValueError(f"non-finite heading {self.heading_rad}")
        object.__setattr__(self, "heading_rad", normalize_heading(self.heading_rad))


def rotate(pose: Pose, angle_rad: float) -> Pose:
    """Turn in place by a signed angle (counter-clockwise positive)."""
    return Pose(pose.position, pose.heading_rad + angle_rad)


def advance(pose: Pose, step_m: float) -> Pose:
    """Move forward along the current heading; the heading is unchanged."""
    if step_m < 0.0:
        raise ValueError(f"negative step {step_m}")
    position = Vec2(
        pose.position.x + step_m * math.cos(pose.heading_rad),
        pose.position.y + step_m * math.sin(pose.heading_rad),
    )
    return Pose(position, pose.heading_rad)


def distance(a: Vec2, b: Vec2) -> float:
    """Euclidean distance in meters."""
    return math.hypot(a.x - b.x, a.y - b.y)


def bearing(origin: Vec2, to: Vec2) -> float:
    """Direction from one point toward another, in [0, 2*pi)."""
    return normalize_heading(math.atan2(to.y - origin.y, to.x - origin.x))


def signed_turn(from_rad: float, to_rad: float) -> float:
    """Shortest signed rotation taking one heading onto another, in (-pi, pi]."""
    delta = (to_rad - from_rad) % TWO_PI
    if delta > math.pi:
        delta -= TWO_PI
    return delta
