"""Schema catalog for the six warehouse tables.

The catalog is the single source of truth for table and column names: the
SQL validator resolves references against it, the store creates tables
from it, and the prompt layer renders it for the agents.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple


class SemanticType(str, enum.Enum):
    TEXT = "text"
    INTEGER = "integer"
    REAL = "real"
    TIMESTAMP = "timestamp"


Column = Tuple[str, SemanticType]


@dataclass(frozen=True)
class SchemaCatalog:
    """Ordered table/column map plus the set of minute-grained tables.

    Minute-grained tables are the ones an unbounded SELECT can pull
    millions of rows from; the validator flags such scans as a row-limit
    risk unless the query aggregates or limits.
    """

    tables: Dict[str, Tuple[Column, ...]]
    minute_tables: frozenset = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        lowered = [name.lower() for name in self.tables]
        if len(set(lowered)) != len(lowered):
            raise ValueError("table names must be unique (case-insensitive)")
        for name, columns in self.tables.items():
            col_names = [c[0].lower() for c in columns]
            if len(set(col_names)) != len(col_names):
                raise ValueError(f"duplicate column in {name}")

    def canonical_table(self, name: str) -> Optional[str]:
        """Resolve a table reference case-insensitively; None if unknown."""
        wanted = name.lower()
        for table in self.tables:
            if table.lower() == wanted:
                return table
        return None

    def columns(self, table: str) -> Tuple[Column, ...]:
        canonical = self.canonical_table(table)
        if canonical is None:
            raise KeyError(table)
        return self.tables[canonical]

    def column_names(self, table: str) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.columns(table))

    def is_minute_table(self, table: str) -> bool:
        canonical = self.canonical_table(table)
        return canonical is not None and canonical in self.minute_tables

    def to_json(self) -> str:
        doc = {
            "tables": {
                name: [{"name": col, "type": sem.value} for col, sem in columns]
                for name, columns in self.tables.items()
            },
            "minute_tables": sorted(self.minute_tables),
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SchemaCatalog":
        doc = json.loads(text)
        tables = {
            name: tuple((col["name"], SemanticType(col["type"])) for col in columns)
            for name, columns in doc["tables"].items()
        }
        return cls(tables=tables, minute_tables=frozenset(doc.get("minute_tables", [])))


def default_catalog() -> SchemaCatalog:
    """The network-wide warehouse layout loaded by the embedded store."""
    t = SemanticType.TEXT
    i = SemanticType.INTEGER
    r = SemanticType.REAL
    ts = SemanticType.TIMESTAMP
    tables: Dict[str, Tuple[Column, ...]] = {
        "dbo.cabinets": (
            ("detector_id", t), ("unit_name", t), ("latitude", r), ("longitude", r),
            ("route", t), ("milepost", r), ("direction", t), ("segment_id", t),
        ),
        "dbo.cabinfo": (
            ("detector_id", t), ("district", t), ("county", t), ("city", t),
            ("state", t), ("region", t),
        ),
        "dbo.MinuteDataNW": (
            ("detector_id", t), ("timestamp", ts), ("local_timestamp", ts),
            ("speed", r), ("volume", r), ("occupancy", r),
        ),
        "dbo.Segments": (
            ("segment_id", t), ("route", t), ("direction", t), ("length_miles", r),
            ("detector_count", i), ("start_milepost", r),
        ),
        "dbo.SegmentTrafficIndex": (
            ("segment_id", t), ("timestamp", ts), ("local_timestamp", ts),
            ("lane_class", t), ("avg_speed", r), ("total_volume", r), ("tps", r),
        ),
        "dbo.TrafficIndex": (
            ("segment_id", t), ("date", ts), ("mean_tps", r), ("min_tps", r),
            ("max_tps", r), ("am_peak_tps", r), ("pm_peak_tps", r),
            ("mean_speed", r), ("total_volume", r),
        ),
    }
    minute = frozenset({"dbo.MinuteDataNW", "dbo.SegmentTrafficIndex"})
    return SchemaCatalog(tables=tables, minute_tables=minute)
