"""Seeded synthetic traffic network: detectors, segments, minute data, indices.

The generator stands in for a live warehouse.  Speeds follow a diurnal
pattern with congestion dips centered on 08:00 and 17:00 local time
(damped on weekends), so peak-hour and weekday/weekend questions have
non-trivial, analytically predictable answers for any fixed seed.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta, timezone
from pathlib import Path
from typing import Dict, List, Sequence, Tuple
from zoneinfo import ZoneInfo

from .traffic import (
    Detector,
    Direction,
    LaneClass,
    LoopObservation,
    NetworkConfig,
    Segment,
    TrafficIndexRecord,
    compute_tps,
)

AM_PEAK_HOUR = 8.0
PM_PEAK_HOUR = 17.0
DIP_HALF_WIDTH_HOURS = 3.0
WEEKEND_DAMPING = 0.3

AM_PEAK_WINDOW = (6, 9)   # local hours, half-open
PM_PEAK_WINDOW = (15, 18)

_COUNTIES = ("King", "Snohomish", "Pierce", "Kitsap")
_CITIES = ("Seattle", "Bellevue", "Everett", "Tacoma", "Renton", "Kirkland")


class InvalidConfigError(ValueError):
    """Raised for non-positive counts or a step that does not divide a day."""


@dataclass(frozen=True)
class CabinetInfo:
    """District/placement record for one detector cabinet."""

    detector_id: str
    district: str
    county: str
    city: str
    state: str
    region: str


@dataclass(frozen=True)
class DailySegmentStats:
    """One day of general-purpose-lane statistics for one segment."""

    segment_id: str
    day: date
    mean_tps: float
    min_tps: float
    max_tps: float
    am_peak_tps: float
    pm_peak_tps: float
    mean_speed: float
    total_volume: float


@dataclass
class SyntheticDataset:
    """Everything the generator produces for one seed."""

    seed: int
    config: NetworkConfig
    start: date
    days: int
    minutes_step: int
    detectors: List[Detector] = field(default_factory=list)
    cabinet_info: List[CabinetInfo] = field(default_factory=list)
    segments: List[Segment] = field(default_factory=list)
    observations: List[LoopObservation] = field(default_factory=list)
    index_records: List[TrafficIndexRecord] = field(default_factory=list)
    daily_stats: List[DailySegmentStats] = field(default_factory=list)

    @property
    def routes(self) -> List[str]:
        seen: List[str] = []
        for det in self.detectors:
            if det.route not in seen:
                seen.append(det.route)
        return seen

    def local_zone(self) -> ZoneInfo:
        return ZoneInfo(self.config.local_timezone)

    def local_dates(self) -> List[date]:
        return [self.start + timedelta(days=i) for i in range(self.days)]

    def to_csv_dir(self, path: str | Path) -> None:
        """Write one UTF-8 CSV per table; identical seeds yield identical bytes."""
        out = Path(path)
        out.mkdir(parents=True, exist_ok=True)
        for table, (columns, rows) in dataset_rows(self).items():
            with open(out / f"{table}.csv", "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(columns)
                writer.writerows(rows)


def _utc_iso(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat()


def _local_iso(ts: datetime, zone: ZoneInfo) -> str:
    return ts.astimezone(zone).replace(tzinfo=None).isoformat()


def dataset_rows(dataset: SyntheticDataset) -> Dict[str, Tuple[List[str], List[tuple]]]:
    """Row-ize a dataset per table, in the warehouse column order.

    Shared by the CSV exporter and the store loader so both surfaces stay
    in lockstep with the schema catalog.
    """
    zone = dataset.local_zone()
    tables: Dict[str, Tuple[List[str], List[tuple]]] = {}

    tables["dbo.cabinets"] = (
        ["detector_id", "unit_name", "latitude", "longitude", "route", "milepost",
         "direction", "segment_id"],
        [(d.detector_id, d.unit_name, d.latitude, d.longitude, d.route, d.milepost,
          d.direction.value, d.segment_id) for d in dataset.detectors],
    )
    tables["dbo.cabinfo"] = (
        ["detector_id", "district", "county", "city", "state", "region"],
        [(c.detector_id, c.district, c.county, c.city, c.state, c.region)
         for c in dataset.cabinet_info],
    )
    tables["dbo.MinuteDataNW"] = (
        ["detector_id", "timestamp", "local_timestamp", "speed", "volume", "occupancy"],
        [(o.detector_id, _utc_iso(o.timestamp), _local_iso(o.timestamp, zone),
          o.speed, o.volume, o.occupancy) for o in dataset.observations],
    )
    tables["dbo.Segments"] = (
        ["segment_id", "route", "direction", "length_miles", "detector_count",
         "start_milepost"],
        [(s.segment_id, s.route, s.direction.value, s.length_miles,
          len(s.member_detectors), s.start_milepost) for s in dataset.segments],
    )
    tables["dbo.SegmentTrafficIndex"] = (
        ["segment_id", "timestamp", "local_timestamp", "lane_class", "avg_speed",
         "total_volume", "tps"],
        [(r.segment_id, _utc_iso(r.timestamp), _local_iso(r.timestamp, zone),
          r.lane_class.value, r.avg_speed, r.total_volume, r.tps)
         for r in dataset.index_records],
    )
    tables["dbo.TrafficIndex"] = (
        ["segment_id", "date", "mean_tps", "min_tps", "max_tps", "am_peak_tps",
         "pm_peak_tps", "mean_speed", "total_volume"],
        [(s.segment_id, s.day.isoformat(), s.mean_tps, s.min_tps, s.max_tps,
          s.am_peak_tps, s.pm_peak_tps, s.mean_speed, s.total_volume)
         for s in dataset.daily_stats],
    )
    return tables


def _dip(hours_from_peak: float) -> float:
    """Sinusoidal congestion bump: 1 at the peak, 0 beyond +-3 hours."""
    if abs(hours_from_peak) >= DIP_HALF_WIDTH_HOURS:
        return 0.0
    return math.cos(math.pi * hours_from_peak / (2.0 * DIP_HALF_WIDTH_HOURS)) ** 2


def _congestion(local_hour: float, am_depth: float, pm_depth: float,
                weekend: bool) -> float:
    depth = am_depth * _dip(local_hour - AM_PEAK_HOUR)
    depth += pm_depth * _dip(local_hour - PM_PEAK_HOUR)
    if weekend:
        depth *= WEEKEND_DAMPING
    return min(depth, 0.95)


def generate_synthetic_network(
    seed: int,
    routes: Sequence[str],
    detectors_per_route: int,
    days: int,
    minutes_step: int = 1,
    start: date = date(2024, 3, 11),
    config: NetworkConfig | None = None,
) -> SyntheticDataset:
    """Build a deterministic network-wide dataset for ``seed``.

    Detectors alternate N/S along each route; consecutive same-direction
    detectors are paired into segments.  Every (detector, minute) pair on
    the UTC minute grid is present, and every per-segment index row is
    derived through compute_tps from the stored minute data.
    """
    if not routes:
        raise InvalidConfigError("at least one route is required")
    if detectors_per_route < 1 or days < 1 or minutes_step < 1:
        raise InvalidConfigError("counts must be >= 1")
    if 1440 % minutes_step != 0:
        raise InvalidConfigError("minutes_step must divide 1440")
    if len(set(routes)) != len(routes):
        raise InvalidConfigError("route labels must be unique")

    config = config or NetworkConfig()
    zone = ZoneInfo(config.local_timezone)
    dataset = SyntheticDataset(seed=seed, config=config, start=start, days=days,
                               minutes_step=minutes_step)

    # Topology: detectors and paired segments, both deterministic in input order.
    per_direction: Dict[Tuple[str, Direction], List[Detector]] = {}
    for route_idx, route in enumerate(routes):
        for j in range(detectors_per_route):
            direction = Direction.N if j % 2 == 0 else Direction.S
            ordinal = j // 2
            milepost = round(1.0 + ordinal * 1.0, 1)
            detector_id = f"{route}_{direction.value}{ordinal + 1:02d}"
            det = Detector(
                detector_id=detector_id,
                unit_name=f"{route} MP{milepost:.1f} {direction.value}B",
                latitude=round(47.3 + 0.02 * ordinal + 0.05 * route_idx, 4),
                longitude=round(-122.5 + 0.03 * route_idx, 4),
                route=route,
                milepost=milepost,
                direction=direction,
            )
            per_direction.setdefault((route, direction), []).append(det)
            dataset.cabinet_info.append(CabinetInfo(
                detector_id=detector_id,
                district=f"D{route_idx + 1}",
                county=_COUNTIES[route_idx % len(_COUNTIES)],
                city=_CITIES[(route_idx + ordinal) % len(_CITIES)],
                state="WA",
                region="Northwest",
            ))

    segment_of: Dict[str, Segment] = {}
    for (route, direction), dets in per_direction.items():
        dets.sort(key=lambda d: d.milepost)
        for chunk_idx in range(0, len(dets), 2):
            members = dets[chunk_idx:chunk_idx + 2]
            segment_id = f"{route}_{direction.value}_S{chunk_idx // 2 + 1}"
            rng_seg = random.Random(f"{seed}:seg:{segment_id}")
            length = round(len(members) * rng_seg.uniform(0.8, 1.6), 2)
            segment = Segment(
                segment_id=segment_id,
                route=route,
                direction=direction,
                length_miles=length,
                member_detectors=tuple(d.detector_id for d in members),
                start_milepost=members[0].milepost,
            )
            dataset.segments.append(segment)
            for det in members:
                segment_of[det.detector_id] = segment

    # Detectors listed in original route order, now with their segment id.
    for route in routes:
        for det in sorted(
            (d for key, ds in per_direction.items() if key[0] == route for d in ds),
            key=lambda d: d.detector_id,
        ):
            dataset.detectors.append(
                Detector(**{**det.__dict__, "segment_id": segment_of[det.detector_id].segment_id})
            )

    # Minute grid in UTC, starting at local midnight of the start date.
    t0 = datetime.combine(start, time(0, 0), tzinfo=zone).astimezone(timezone.utc)
    minutes_per_day = 1440 // minutes_step
    total_minutes = days * minutes_per_day
    step = timedelta(minutes=minutes_step)
    vf = config.free_flow_speed

    obs_by_detector: Dict[str, List[LoopObservation]] = {}
    for det in dataset.detectors:
        rng_param = random.Random(f"{seed}:det:{det.detector_id}")
        am_depth = rng_param.uniform(0.30, 0.55)
        pm_depth = rng_param.uniform(0.35, 0.65)
        base_volume = rng_param.uniform(8.0, 14.0)
        speed_sigma = rng_param.uniform(1.0, 2.0)
        rng_obs = random.Random(f"{seed}:obs:{det.detector_id}")
        series: List[LoopObservation] = []
        for m in range(total_minutes):
            ts = t0 + m * step
            local = ts.astimezone(zone)
            local_hour = local.hour + local.minute / 60.0
            weekend = local.weekday() >= 5
            depth = _congestion(local_hour, am_depth, pm_depth, weekend)
            speed = vf * (1.0 - depth) + rng_obs.gauss(0.0, speed_sigma)
            speed = round(min(max(speed, 2.0), vf + 5.0), 2)
            night = local_hour < 5.0 or local_hour >= 22.0
            vol = base_volume * (1.0 + 1.5 * depth)
            vol *= 0.7 if weekend else 1.0
            vol *= 0.4 if night else 1.0
            volume = max(1, round(vol + rng_obs.gauss(0.0, 1.0)))
            occupancy = round(
                min(max(0.5 * volume / max(speed, 2.0) + rng_obs.gauss(0.0, 0.01), 0.0), 1.0),
                4,
            )
            series.append(LoopObservation(
                detector_id=det.detector_id,
                timestamp=ts,
                speed=speed,
                volume=float(volume),
                occupancy=occupancy,
            ))
        obs_by_detector[det.detector_id] = series
        dataset.observations.extend(series)

    # Per-segment per-minute index rows (GP aggregated from members, HOV synthesized).
    for segment in dataset.segments:
        share = segment.length_miles / len(segment.member_detectors)
        rng_hov = random.Random(f"{seed}:hov:{segment.segment_id}")
        member_series = [obs_by_detector[d] for d in segment.member_detectors]
        gp_minutes: List[TrafficIndexRecord] = []
        for m in range(total_minutes):
            group = [series[m] for series in member_series]
            ts = group[0].timestamp
            entries = [(o.speed, o.volume, share) for o in group]
            gp_tps = compute_tps(entries, vf)
            total_volume = sum(o.volume for o in group)
            gp_speed = sum(o.speed * o.volume for o in group) / total_volume
            gp_record = TrafficIndexRecord(
                segment_id=segment.segment_id,
                timestamp=ts,
                lane_class=LaneClass.GENERAL_PURPOSE,
                avg_speed=round(gp_speed, 2),
                total_volume=total_volume,
                tps=gp_tps,
            )
            hov_speed = vf - 0.35 * (vf - gp_speed) + rng_hov.gauss(0.0, 1.0)
            hov_speed = round(min(max(hov_speed, 2.0), vf + 5.0), 2)
            hov_volume = max(1, round(0.25 * total_volume * rng_hov.uniform(0.85, 1.15)))
            hov_record = TrafficIndexRecord(
                segment_id=segment.segment_id,
                timestamp=ts,
                lane_class=LaneClass.HOV,
                avg_speed=hov_speed,
                total_volume=float(hov_volume),
                tps=compute_tps([(hov_speed, float(hov_volume), segment.length_miles)], vf),
            )
            gp_minutes.append(gp_record)
            dataset.index_records.append(gp_record)
            dataset.index_records.append(hov_record)

        # Daily GP statistics grouped by local calendar date.
        by_day: Dict[date, List[TrafficIndexRecord]] = {}
        for rec in gp_minutes:
            by_day.setdefault(rec.timestamp.astimezone(zone).date(), []).append(rec)
        for day in sorted(by_day):
            recs = by_day[day]
            tps_values = [r.tps for r in recs]
            am = [r.tps for r in recs
                  if AM_PEAK_WINDOW[0] <= r.timestamp.astimezone(zone).hour < AM_PEAK_WINDOW[1]]
            pm = [r.tps for r in recs
                  if PM_PEAK_WINDOW[0] <= r.timestamp.astimezone(zone).hour < PM_PEAK_WINDOW[1]]
            dataset.daily_stats.append(DailySegmentStats(
                segment_id=segment.segment_id,
                day=day,
                mean_tps=round(sum(tps_values) / len(tps_values), 4),
                min_tps=round(min(tps_values), 4),
                max_tps=round(max(tps_values), 4),
                am_peak_tps=round(sum(am) / len(am), 4) if am else 0.0,
                pm_peak_tps=round(sum(pm) / len(pm), 4) if pm else 0.0,
                mean_speed=round(sum(r.avg_speed for r in recs) / len(recs), 4),
                total_volume=sum(r.total_volume for r in recs),
            ))

    return dataset
