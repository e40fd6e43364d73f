"""Catalog tests: the six tables, resolution, JSON export."""

from __future__ import annotations

import json

import pytest

from tpgpt.schema import SchemaCatalog, SemanticType, default_catalog

EXPECTED_TABLES = {
    "dbo.cabinets", "dbo.cabinfo", "dbo.MinuteDataNW", "dbo.Segments",
    "dbo.SegmentTrafficIndex", "dbo.TrafficIndex",
}


def test_default_catalog_has_six_tables():
    catalog = default_catalog()
    assert set(catalog.tables) == EXPECTED_TABLES


def test_case_insensitive_lookup():
    catalog = default_catalog()
    assert catalog.canonical_table("DBO.MINUTEDATANW") == "dbo.MinuteDataNW"
    assert catalog.canonical_table("dbo.missing") is None
    assert "speed" in catalog.column_names("dbo.minutedatanw")


def test_minute_tables_flagged():
    catalog = default_catalog()
    assert catalog.is_minute_table("dbo.MinuteDataNW")
    assert catalog.is_minute_table("dbo.SegmentTrafficIndex")
    assert not catalog.is_minute_table("dbo.cabinets")


def test_json_round_trip():
    catalog = default_catalog()
    doc = catalog.to_json()
    restored = SchemaCatalog.from_json(doc)
    assert restored == catalog
    parsed = json.loads(doc)
    assert set(parsed["tables"]) == EXPECTED_TABLES
    assert "dbo.MinuteDataNW" in parsed["minute_tables"]


def test_duplicate_names_rejected():
    with pytest.raises(ValueError):
        SchemaCatalog(tables={
            "dbo.a": (("x", SemanticType.TEXT),),
            "DBO.A": (("x", SemanticType.TEXT),),
        })
    with pytest.raises(ValueError):
        SchemaCatalog(tables={
            "dbo.a": (("x", SemanticType.TEXT), ("X", SemanticType.REAL)),
        })
