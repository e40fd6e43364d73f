"""Embedded read-only store over the six warehouse tables.

Backed by in-process sqlite with the traffic tables living in an attached
schema literally named ``dbo``, so queries written against the documented
``dbo.``-prefixed names run unmodified.  Execution is fenced three ways:
an authorizer that denies everything but reads, a row cap with honest
truncation, and a wall-clock interrupt for runaway queries.
"""

from __future__ import annotations

import csv
import sqlite3
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .schema import SchemaCatalog, SemanticType, default_catalog
from .sqlguard import rewrite_for_engine
from .synth import SyntheticDataset, dataset_rows

_SQL_TYPE = {
    SemanticType.TEXT: "TEXT",
    SemanticType.INTEGER: "INTEGER",
    SemanticType.REAL: "REAL",
    SemanticType.TIMESTAMP: "TEXT",
}

_PROGRESS_OPCODE_INTERVAL = 5000


class SchemaMismatchError(Exception):
    """A dataset or CSV directory does not line up with the catalog."""

    def __init__(self, message: str, offending: Sequence[str] = ()):
        super().__init__(message)
        self.offending = list(offending)


class ExecutionError(Exception):
    """Engine-level failure; carries the execution log verbatim."""

    def __init__(self, message: str, log: str):
        super().__init__(message)
        self.log = log


class ExecutionTimeout(ExecutionError):
    """Query exceeded the configured time budget and was interrupted."""


@dataclass(frozen=True)
class QueryResult:
    columns: Tuple[str, ...]
    rows: Tuple[tuple, ...]
    row_count: int
    truncated: bool
    execution_log: str

    def __post_init__(self) -> None:
        if self.row_count != len(self.rows):
            raise ValueError("row_count must equal len(rows)")

    def to_dict(self) -> dict:
        return {
            "columns": list(self.columns),
            "rows": [list(r) for r in self.rows],
            "row_count": self.row_count,
            "truncated": self.truncated,
            "execution_log": self.execution_log,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "QueryResult":
        return cls(
            columns=tuple(doc["columns"]),
            rows=tuple(tuple(r) for r in doc["rows"]),
            row_count=doc["row_count"],
            truncated=doc["truncated"],
            execution_log=doc["execution_log"],
        )


def _readonly_authorizer(action: int, *_args) -> int:
    if action in (sqlite3.SQLITE_SELECT, sqlite3.SQLITE_READ, sqlite3.SQLITE_FUNCTION):
        return sqlite3.SQLITE_OK
    return sqlite3.SQLITE_DENY


def _permissive_authorizer(*_args) -> int:
    return sqlite3.SQLITE_OK


class TrafficStore:
    """Six-table store with catalog-checked loading and fenced execution."""

    def __init__(self, catalog: Optional[SchemaCatalog] = None):
        self.catalog = catalog or default_catalog()
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(":memory:", check_same_thread=False)
        self._conn.execute("ATTACH ':memory:' AS dbo")
        self._create_tables()

    # -- schema ---------------------------------------------------------------
    def _split(self, table: str) -> Tuple[str, str]:
        if "." in table:
            schema, base = table.split(".", 1)
            return schema, base
        return "main", table

    def _create_tables(self) -> None:
        with self._lock:
            for table, columns in self.catalog.tables.items():
                schema, base = self._split(table)
                cols = ", ".join(f'"{name}" {_SQL_TYPE[sem]}' for name, sem in columns)
                self._conn.execute(f'CREATE TABLE IF NOT EXISTS {schema}."{base}" ({cols})')
            self._conn.commit()

    # -- loading ----------------------------------------------------------------
    def load_dataset(self, source: "SyntheticDataset | str | Path") -> None:
        """(Re)load the store from a generated dataset or a CSV directory.

        Reloading replaces prior contents; requires exclusive access.
        """
        if isinstance(source, (str, Path)):
            tables = self._read_csv_dir(Path(source))
        else:
            tables = {
                table: rows for table, (_cols, rows) in dataset_rows(source).items()
            }
            for table in tables:
                if self.catalog.canonical_table(table) is None:
                    raise SchemaMismatchError(
                        f"dataset table {table!r} not in catalog", [table])
        with self._lock:
            self._conn.set_authorizer(_permissive_authorizer)
            try:
                for table in self.catalog.tables:
                    schema, base = self._split(table)
                    self._conn.execute(f'DELETE FROM {schema}."{base}"')
                for table, rows in tables.items():
                    canonical = self.catalog.canonical_table(table)
                    schema, base = self._split(canonical)
                    width = len(self.catalog.columns(canonical))
                    placeholders = ", ".join("?" * width)
                    self._conn.executemany(
                        f'INSERT INTO {schema}."{base}" VALUES ({placeholders})', rows)
                self._conn.commit()
            finally:
                self._conn.set_authorizer(_permissive_authorizer)

    def _read_csv_dir(self, path: Path) -> Dict[str, List[tuple]]:
        if not path.is_dir():
            raise SchemaMismatchError(f"{path} is not a directory")
        tables: Dict[str, List[tuple]] = {}
        for table in self.catalog.tables:
            file = path / f"{table}.csv"
            if not file.exists():
                raise SchemaMismatchError(f"missing CSV for table {table}", [table])
            expected = list(self.catalog.column_names(table))
            with open(file, newline="", encoding="utf-8") as fh:
                reader = csv.reader(fh)
                header = next(reader, None)
                if header != expected:
                    extra = [c for c in (header or []) if c not in expected]
                    missing = [c for c in expected if c not in (header or [])]
                    offending = extra + missing
                    raise SchemaMismatchError(
                        f"header mismatch in {file.name}: unexpected "
                        f"{extra or 'none'}, missing {missing or 'none'}",
                        offending)
                converters = [
                    self._converter(sem) for _name, sem in self.catalog.columns(table)
                ]
                rows = []
                for record in reader:
                    rows.append(tuple(
                        conv(value) for conv, value in zip(converters, record)))
                tables[table] = rows
        return tables

    @staticmethod
    def _converter(sem: SemanticType):
        if sem is SemanticType.INTEGER:
            return lambda v: None if v == "" else int(v)
        if sem is SemanticType.REAL:
            return lambda v: None if v == "" else float(v)
        return lambda v: None if v == "" else v

    # -- querying ---------------------------------------------------------------
    def execute(self, query: str, max_rows: int = 1000,
                timeout_s: float = 10.0) -> QueryResult:
        """Run one SELECT; truncate past max_rows; interrupt past timeout_s.

        The caller is expected to have validated the query; anything the
        engine rejects surfaces as ExecutionError carrying the engine's
        message verbatim in the log.
        """
        if max_rows < 1:
            raise ValueError("max_rows must be >= 1")
        rewritten = rewrite_for_engine(query)
        with self._lock:
            deadline = time.monotonic() + timeout_s
            timed_out = False

            def _tick() -> int:
                nonlocal timed_out
                if time.monotonic() > deadline:
                    timed_out = True
                    return 1
                return 0

            self._conn.set_authorizer(_readonly_authorizer)
            self._conn.set_progress_handler(_tick, _PROGRESS_OPCODE_INTERVAL)
            try:
                cursor = self._conn.execute(rewritten)
                fetched = cursor.fetchmany(max_rows + 1)
                truncated = len(fetched) > max_rows
                rows = tuple(tuple(r) for r in fetched[:max_rows])
                columns = tuple(
                    d[0] for d in (cursor.description or ()))
                log = (f"statement executed; rows fetched={len(rows)}; "
                       f"truncated={'true' if truncated else 'false'}")
                return QueryResult(
                    columns=columns, rows=rows, row_count=len(rows),
                    truncated=truncated, execution_log=log)
            except sqlite3.Error as exc:
                if timed_out:
                    log = (f"query exceeded the {timeout_s:g}s time limit and "
                           "was interrupted")
                    raise ExecutionTimeout("query timed out", log) from exc
                log = f"engine error: {exc}"
                raise ExecutionError(str(exc), log) from exc
            finally:
                self._conn.set_progress_handler(None, 0)
                self._conn.set_authorizer(_permissive_authorizer)

    def table_counts(self) -> Dict[str, int]:
        with self._lock:
            counts = {}
            for table in self.catalog.tables:
                schema, base = self._split(table)
                cur = self._conn.execute(f'SELECT COUNT(*) FROM {schema}."{base}"')
                counts[table] = cur.fetchone()[0]
            return counts
