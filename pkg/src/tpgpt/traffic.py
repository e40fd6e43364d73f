"""Domain model of the loop-detector network and the core analytic formulas.

The performance score of a road stretch at one instant is the volume- and
length-weighted ratio of observed speed to free-flow speed, expressed as a
percentage: 0 is a standstill, 100 is free flow.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Sequence, Tuple


class Direction(str, enum.Enum):
    N = "N"
    S = "S"
    E = "E"
    W = "W"


class LaneClass(str, enum.Enum):
    GENERAL_PURPOSE = "GP"
    HOV = "HOV"


class EmptyInputError(ValueError):
    """Raised when a score is requested for an empty observation list."""


class ZeroWeightError(ValueError):
    """Raised when every volume-length weight is zero (score undefined)."""


@dataclass(frozen=True)
class Detector:
    """One inductive loop cabinet on a route."""

    detector_id: str
    unit_name: str
    latitude: float
    longitude: float
    route: str
    milepost: float
    direction: Direction
    segment_id: str = ""

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude out of range: {self.latitude}")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude out of range: {self.longitude}")
        if self.milepost < 0:
            raise ValueError(f"milepost must be non-negative: {self.milepost}")


@dataclass(frozen=True)
class LoopObservation:
    """One minute of speed/volume/occupancy from one detector.

    ``timestamp`` is stored in UTC; local-time semantics (peak hours,
    weekday/weekend) are applied through the configured network timezone.
    """

    detector_id: str
    timestamp: datetime
    speed: float
    volume: float
    occupancy: float

    def __post_init__(self) -> None:
        if self.speed < 0:
            raise ValueError(f"speed must be non-negative: {self.speed}")
        if self.volume < 0:
            raise ValueError(f"volume must be non-negative: {self.volume}")
        if not 0.0 <= self.occupancy <= 1.0:
            raise ValueError(f"occupancy outside [0, 1]: {self.occupancy}")
        if self.timestamp.tzinfo is None:
            raise ValueError("timestamp must be timezone-aware (UTC)")


@dataclass(frozen=True)
class Segment:
    """A directed stretch of route covered by an ordered set of detectors."""

    segment_id: str
    route: str
    direction: Direction
    length_miles: float
    member_detectors: Tuple[str, ...]
    start_milepost: float = 0.0

    def __post_init__(self) -> None:
        if self.length_miles <= 0:
            raise ValueError(f"length_miles must be positive: {self.length_miles}")
        if not self.member_detectors:
            raise ValueError("a segment needs at least one member detector")


@dataclass(frozen=True)
class TrafficIndexRecord:
    """Per-minute aggregate for one segment and one lane class."""

    segment_id: str
    timestamp: datetime
    lane_class: LaneClass
    avg_speed: float
    total_volume: float
    tps: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.tps <= 100.0:
            raise ValueError(f"tps outside [0, 100]: {self.tps}")


@dataclass(frozen=True)
class NetworkConfig:
    """Network-wide constants; all configurable, defaults documented.

    free_flow_speed defaults to 60 mph and emission_factor to 400 g CO2e
    per vehicle-mile; both are estimates, not measured constants.
    """

    free_flow_speed: float = 60.0
    emission_factor: float = 400.0
    local_timezone: str = "America/Los_Angeles"

    def __post_init__(self) -> None:
        if self.free_flow_speed <= 0:
            raise ValueError("free_flow_speed must be positive")
        if self.emission_factor <= 0:
            raise ValueError("emission_factor must be positive")


def compute_tps(
    entries: Sequence[Tuple[float, float, float]], free_flow_speed: float
) -> float:
    """Score a set of (speed, volume, covered_length) readings on [0, 100].

    Returns ``100 * sum(V*Q*L) / sum(Vf*Q*L)``.  The result is clamped to
    100 when readings exceed free-flow speed; with all speeds at or below
    free flow the raw ratio already lies in [0, 100].
    """
    if free_flow_speed <= 0:
        raise ValueError("free_flow_speed must be positive")
    if not entries:
        raise EmptyInputError("no observations to score")
    weighted_speed = 0.0
    weight = 0.0
    for speed, volume, length in entries:
        if speed < 0 or volume < 0 or length < 0:
            raise ValueError("speed, volume and length must be non-negative")
        weighted_speed += speed * volume * length
        weight += volume * length
    if weight == 0.0:
        raise ZeroWeightError("all volume-length weights are zero")
    raw = 100.0 * weighted_speed / (free_flow_speed * weight)
    return min(100.0, max(0.0, raw))


def compute_vmt(
    rows: Iterable[Tuple[LoopObservation, float]],
    window: Tuple[datetime, datetime],
) -> float:
    """Total vehicle-miles over a half-open time window [start, end).

    Each row pairs an observation with the roadway length covered by its
    detector (for a segment of length L with n members, L / n).  VMT is
    the sum of volume * covered_length over in-window observations, so it
    is additive over disjoint windows.
    """
    start, end = window
    if start >= end:
        raise ValueError("window must be non-empty (start < end)")
    total = 0.0
    for obs, covered_length in rows:
        if start <= obs.timestamp < end:
            total += obs.volume * covered_length
    return total


def estimate_emissions(vmt: float, factor: float) -> float:
    """Grams of CO2e for a vehicle-miles total at a per-mile emission factor."""
    if vmt < 0:
        raise ValueError("vmt must be non-negative")
    if factor <= 0:
        raise ValueError("factor must be positive")
    return vmt * factor
