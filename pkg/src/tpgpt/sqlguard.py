"""Validator for the read-only SELECT dialect accepted by the gateway.

Supports single SELECT statements with JOIN / WHERE / GROUP BY / HAVING /
ORDER BY / LIMIT-OFFSET, subqueries in FROM and in predicates, CASE, CAST,
a whitelisted function set, and the MSSQL-style ``TOP n`` prefix (rewritten
to LIMIT before execution).  Everything else is rejected with a verdict,
never an exception: write statements are forbidden, unparseable input is a
syntax error, and unresolvable names are reported against the catalog.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Set, Tuple

from .schema import SchemaCatalog

Span = Tuple[int, int]

KEYWORDS = {
    "select", "from", "where", "group", "by", "having", "order", "asc", "desc",
    "limit", "offset", "join", "inner", "left", "right", "full", "outer", "cross",
    "on", "as", "and", "or", "not", "in", "is", "null", "like", "between",
    "distinct", "all", "top", "case", "when", "then", "else", "end", "cast",
    "exists", "escape", "union", "intersect", "except", "with",
}

# Statements that can never be valid here; anything else non-SELECT is a
# syntax error rather than a forbidden statement.
FORBIDDEN_LEADERS = {
    "insert", "update", "delete", "drop", "create", "alter", "truncate", "merge",
    "replace", "attach", "detach", "pragma", "vacuum", "begin", "commit",
    "rollback", "grant", "revoke", "exec", "execute", "call", "set", "use",
    "copy", "reindex", "analyze",
}

AGGREGATE_FUNCTIONS = {"count", "sum", "avg", "min", "max", "total", "group_concat"}

ALLOWED_FUNCTIONS = AGGREGATE_FUNCTIONS | {
    "abs", "round", "lower", "upper", "length", "substr", "coalesce", "ifnull",
    "nullif", "trim", "ltrim", "rtrim", "replace", "instr", "typeof", "printf",
    "date", "time", "datetime", "julianday", "strftime",
}

CAST_TYPES = {"text", "integer", "int", "real", "numeric"}


class Verdict(str, enum.Enum):
    OK = "Ok"
    SYNTAX_ERROR = "SyntaxError"
    FORBIDDEN_STATEMENT = "ForbiddenStatement"
    UNKNOWN_TABLE = "UnknownTable"
    UNKNOWN_COLUMN = "UnknownColumn"
    ROW_LIMIT_RISK = "RowLimitRisk"


_SEVERITY = {
    Verdict.FORBIDDEN_STATEMENT: 5,
    Verdict.SYNTAX_ERROR: 4,
    Verdict.UNKNOWN_TABLE: 3,
    Verdict.UNKNOWN_COLUMN: 2,
    Verdict.ROW_LIMIT_RISK: 1,
}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: Span
    verdict: Verdict


@dataclass(frozen=True)
class ValidationReport:
    verdict: Verdict
    diagnostics: Tuple[Diagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return self.verdict is Verdict.OK

    @property
    def executable(self) -> bool:
        """Ok and the advisory row-limit warning both clear execution."""
        return self.verdict in (Verdict.OK, Verdict.ROW_LIMIT_RISK)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "diagnostics": [
                {"code": d.code, "message": d.message, "span": list(d.span)}
                for d in self.diagnostics
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ValidationReport":
        verdict = Verdict(doc["verdict"])
        diags = tuple(
            Diagnostic(d["code"], d["message"], tuple(d["span"]), verdict)
            for d in doc["diagnostics"]
        )
        return cls(verdict=verdict, diagnostics=diags)


# ---------------------------------------------------------------------------
# Tokenizer


@dataclass(frozen=True)
class Token:
    kind: str  # kw | ident | qident | num | str | op | punct | eof
    text: str
    start: int
    end: int

    @property
    def span(self) -> Span:
        return (self.start, self.end)

    def is_kw(self, *words: str) -> bool:
        return self.kind == "kw" and self.text in words


class _GuardError(Exception):
    def __init__(self, code: str, message: str, span: Span, verdict: Verdict):
        super().__init__(message)
        self.diagnostic = Diagnostic(code, message, span, verdict)


_OPERATORS = ("<>", "!=", "<=", ">=", "||", "=", "<", ">", "+", "-", "*", "/", "%")


def tokenize(sql: str) -> List[Token]:
    tokens: List[Token] = []
    i, n = 0, len(sql)
    while i < n:
        ch = sql[i]
        if ch.isspace():
            i += 1
            continue
        if sql.startswith("--", i):
            nl = sql.find("\n", i)
            i = n if nl == -1 else nl + 1
            continue
        if sql.startswith("/*", i):
            close = sql.find("*/", i + 2)
            if close == -1:
                raise _GuardError("unterminated-comment", "unterminated block comment",
                                  (i, n), Verdict.SYNTAX_ERROR)
            i = close + 2
            continue
        if ch == "'":
            j = i + 1
            while j < n:
                if sql[j] == "'":
                    if j + 1 < n and sql[j + 1] == "'":
                        j += 2
                        continue
                    break
                j += 1
            else:
                raise _GuardError("unterminated-string", "unterminated string literal",
                                  (i, n), Verdict.SYNTAX_ERROR)
            if j >= n:
                raise _GuardError("unterminated-string", "unterminated string literal",
                                  (i, n), Verdict.SYNTAX_ERROR)
            tokens.append(Token("str", sql[i:j + 1], i, j + 1))
            i = j + 1
            continue
        if ch == '"':
            j = sql.find('"', i + 1)
            if j == -1:
                raise _GuardError("unterminated-ident", "unterminated quoted identifier",
                                  (i, n), Verdict.SYNTAX_ERROR)
            tokens.append(Token("qident", sql[i + 1:j], i, j + 1))
            i = j + 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and sql[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (sql[j].isdigit() or (sql[j] == "." and not seen_dot)):
                if sql[j] == ".":
                    seen_dot = True
                j += 1
            if j < n and sql[j] in "eE":
                k = j + 1
                if k < n and sql[k] in "+-":
                    k += 1
                if k < n and sql[k].isdigit():
                    while k < n and sql[k].isdigit():
                        k += 1
                    j = k
            tokens.append(Token("num", sql[i:j], i, j))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (sql[j].isalnum() or sql[j] == "_"):
                j += 1
            word = sql[i:j]
            lowered = word.lower()
            kind = "kw" if lowered in KEYWORDS else "ident"
            tokens.append(Token(kind, lowered if kind == "kw" else word, i, j))
            i = j
            continue
        matched = False
        for op in _OPERATORS:
            if sql.startswith(op, i):
                tokens.append(Token("op", op, i, i + len(op)))
                i += len(op)
                matched = True
                break
        if matched:
            continue
        if ch in "(),.;":
            tokens.append(Token("punct", ch, i, i + 1))
            i += 1
            continue
        raise _GuardError("bad-character", f"unexpected character {ch!r}",
                          (i, i + 1), Verdict.SYNTAX_ERROR)
    tokens.append(Token("eof", "", n, n))
    return tokens


# ---------------------------------------------------------------------------
# Parse tree (only what name resolution and the risk heuristic need)


@dataclass
class ColumnRef:
    parts: Tuple[str, ...]
    span: Span
    clause: str  # select | from | where | group | having | order
    is_star: bool = False


@dataclass
class FuncUse:
    name: str
    span: Span
    clause: str


@dataclass
class TableRef:
    name: str
    alias: Optional[str]
    span: Span


@dataclass
class DerivedTable:
    select: "Select"
    alias: str
    span: Span


@dataclass
class Select:
    sources: List[object] = field(default_factory=list)  # TableRef | DerivedTable
    column_refs: List[ColumnRef] = field(default_factory=list)
    func_uses: List[FuncUse] = field(default_factory=list)
    subqueries: List["Select"] = field(default_factory=list)  # non-FROM subselects
    select_aliases: List[str] = field(default_factory=list)
    select_star: bool = False
    distinct: bool = False
    has_group_by: bool = False
    top_count: Optional[int] = None
    limit: Optional[int] = None


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- low-level helpers ---------------------------------------------------
    def peek(self, ahead: int = 0) -> Token:
        idx = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[idx]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def accept_kw(self, *words: str) -> Optional[Token]:
        if self.peek().is_kw(*words):
            return self.next()
        return None

    def accept_punct(self, text: str) -> Optional[Token]:
        if self.peek().kind == "punct" and self.peek().text == text:
            return self.next()
        return None

    def expect_kw(self, word: str) -> Token:
        tok = self.peek()
        if not tok.is_kw(word):
            self.fail(f"expected {word.upper()}", tok)
        return self.next()

    def expect_punct(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.text != text:
            self.fail(f"expected {text!r}", tok)
        return self.next()

    def fail(self, message: str, tok: Token) -> None:
        shown = tok.text or "end of input"
        raise _GuardError("parse-error", f"{message}, found {shown!r}", tok.span,
                          Verdict.SYNTAX_ERROR)

    # -- grammar ---------------------------------------------------------------
    def parse_statement(self) -> Select:
        select = self.parse_select()
        if self.accept_punct(";"):
            if self.peek().kind != "eof":
                raise _GuardError(
                    "multiple-statements",
                    "only a single SELECT statement is allowed",
                    self.peek().span, Verdict.FORBIDDEN_STATEMENT)
        tok = self.peek()
        if tok.kind != "eof":
            if tok.is_kw("union", "intersect", "except"):
                self.fail("set operations are not part of the supported dialect", tok)
            self.fail("unexpected trailing input", tok)
        return select

    def parse_select(self) -> Select:
        select = Select()
        self.expect_kw("select")
        if self.accept_kw("distinct"):
            select.distinct = True
        else:
            self.accept_kw("all")
        if self.peek().is_kw("top"):
            self.next()
            wrapped = self.accept_punct("(") is not None
            count_tok = self.peek()
            if count_tok.kind != "num" or "." in count_tok.text:
                self.fail("TOP expects an integer count", count_tok)
            self.next()
            if wrapped:
                self.expect_punct(")")
            select.top_count = int(count_tok.text)
        self.parse_select_list(select)
        self.expect_kw("from")
        self.parse_table_source(select)
        while True:
            if self.accept_punct(","):
                self.parse_table_source(select)
                continue
            join_kw = self.peek()
            if join_kw.is_kw("join"):
                self.next()
            elif join_kw.is_kw("inner", "cross"):
                self.next()
                self.expect_kw("join")
            elif join_kw.is_kw("left", "right", "full"):
                self.next()
                self.accept_kw("outer")
                self.expect_kw("join")
            else:
                break
            self.parse_table_source(select)
            if self.accept_kw("on"):
                self.parse_expr(select, "from")
        if self.accept_kw("where"):
            self.parse_expr(select, "where")
        if self.accept_kw("group"):
            self.expect_kw("by")
            select.has_group_by = True
            self.parse_expr(select, "group")
            while self.accept_punct(","):
                self.parse_expr(select, "group")
        if self.accept_kw("having"):
            self.parse_expr(select, "having")
        if self.accept_kw("order"):
            self.expect_kw("by")
            while True:
                self.parse_expr(select, "order")
                if not self.accept_kw("asc"):
                    self.accept_kw("desc")
                if not self.accept_punct(","):
                    break
        if self.accept_kw("limit"):
            limit_tok = self.peek()
            if limit_tok.kind != "num" or "." in limit_tok.text:
                self.fail("LIMIT expects an integer count", limit_tok)
            self.next()
            select.limit = int(limit_tok.text)
            if self.accept_kw("offset"):
                off_tok = self.peek()
                if off_tok.kind != "num" or "." in off_tok.text:
                    self.fail("OFFSET expects an integer count", off_tok)
                self.next()
        return select

    def parse_select_list(self, select: Select) -> None:
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == "*":
                self.next()
                select.select_star = True
            else:
                start = self.pos
                self.parse_expr(select, "select")
                alias = self.parse_optional_alias()
                if alias:
                    select.select_aliases.append(alias.lower())
                elif self.pos - start == 1:
                    only = self.tokens[start]
                    if only.kind in ("ident", "qident"):
                        # A bare column doubles as its own output name.
                        select.select_aliases.append(only.text.lower())
            if not self.accept_punct(","):
                break

    def parse_optional_alias(self) -> Optional[str]:
        if self.accept_kw("as"):
            tok = self.peek()
            if tok.kind not in ("ident", "qident"):
                self.fail("expected alias name after AS", tok)
            self.next()
            return tok.text
        tok = self.peek()
        if tok.kind in ("ident", "qident"):
            self.next()
            return tok.text
        return None

    def parse_table_source(self, select: Select) -> None:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == "(":
            open_tok = self.next()
            sub = self.parse_select()
            self.expect_punct(")")
            alias = self.parse_optional_alias()
            if alias is None:
                self.fail("a derived table requires an alias", self.peek())
            select.sources.append(DerivedTable(sub, alias, open_tok.span))
            return
        if tok.kind not in ("ident", "qident"):
            self.fail("expected a table name", tok)
        start = tok.start
        parts = [self.next().text]
        while self.peek().kind == "punct" and self.peek().text == ".":
            self.next()
            part_tok = self.peek()
            if part_tok.kind not in ("ident", "qident"):
                self.fail("expected identifier after '.'", part_tok)
            parts.append(self.next().text)
        end = self.tokens[self.pos - 1].end
        alias = self.parse_optional_alias()
        select.sources.append(TableRef(".".join(parts), alias, (start, end)))

    # Expressions: precedence OR < AND < NOT < predicate < comparison <
    # additive (+ - ||) < multiplicative (* / %) < unary < primary.
    def parse_expr(self, select: Select, clause: str) -> None:
        self.parse_and(select, clause)
        while self.accept_kw("or"):
            self.parse_and(select, clause)

    def parse_and(self, select: Select, clause: str) -> None:
        self.parse_not(select, clause)
        while self.accept_kw("and"):
            self.parse_not(select, clause)

    def parse_not(self, select: Select, clause: str) -> None:
        while self.accept_kw("not"):
            pass
        self.parse_predicate(select, clause)

    def parse_predicate(self, select: Select, clause: str) -> None:
        self.parse_comparison(select, clause)
        while True:
            tok = self.peek()
            if tok.is_kw("is"):
                self.next()
                self.accept_kw("not")
                self.expect_kw("null")
                continue
            negated = False
            if tok.is_kw("not") and self.peek(1).is_kw("in", "like", "between"):
                self.next()
                tok = self.peek()
                negated = True
            if tok.is_kw("in"):
                self.next()
                self.expect_punct("(")
                if self.peek().is_kw("select"):
                    sub = self.parse_select()
                    select.subqueries.append(sub)
                else:
                    self.parse_expr(select, clause)
                    while self.accept_punct(","):
                        self.parse_expr(select, clause)
                self.expect_punct(")")
                continue
            if tok.is_kw("like"):
                self.next()
                self.parse_comparison(select, clause)
                if self.accept_kw("escape"):
                    self.parse_comparison(select, clause)
                continue
            if tok.is_kw("between"):
                self.next()
                self.parse_comparison(select, clause)
                self.expect_kw("and")
                self.parse_comparison(select, clause)
                continue
            if negated:
                self.fail("expected IN, LIKE or BETWEEN after NOT", tok)
            break

    def parse_comparison(self, select: Select, clause: str) -> None:
        self.parse_additive(select, clause)
        while self.peek().kind == "op" and self.peek().text in (
                "=", "<>", "!=", "<", "<=", ">", ">="):
            self.next()
            self.parse_additive(select, clause)

    def parse_additive(self, select: Select, clause: str) -> None:
        self.parse_multiplicative(select, clause)
        while self.peek().kind == "op" and self.peek().text in ("+", "-", "||"):
            self.next()
            self.parse_multiplicative(select, clause)

    def parse_multiplicative(self, select: Select, clause: str) -> None:
        self.parse_unary(select, clause)
        while self.peek().kind == "op" and self.peek().text in ("*", "/", "%"):
            self.next()
            self.parse_unary(select, clause)

    def parse_unary(self, select: Select, clause: str) -> None:
        while self.peek().kind == "op" and self.peek().text in ("+", "-"):
            self.next()
        self.parse_primary(select, clause)

    def parse_primary(self, select: Select, clause: str) -> None:
        tok = self.peek()
        if tok.kind in ("num", "str"):
            self.next()
            return
        if tok.is_kw("null"):
            self.next()
            return
        if tok.is_kw("case"):
            self.parse_case(select, clause)
            return
        if tok.is_kw("cast"):
            self.next()
            self.expect_punct("(")
            self.parse_expr(select, clause)
            self.expect_kw("as")
            type_tok = self.peek()
            if type_tok.kind != "ident" or type_tok.text.lower() not in CAST_TYPES:
                self.fail("expected a type name in CAST", type_tok)
            self.next()
            self.expect_punct(")")
            return
        if tok.is_kw("exists"):
            self.next()
            self.expect_punct("(")
            sub = self.parse_select()
            select.subqueries.append(sub)
            self.expect_punct(")")
            return
        if tok.kind == "punct" and tok.text == "(":
            self.next()
            if self.peek().is_kw("select"):
                sub = self.parse_select()
                select.subqueries.append(sub)
            else:
                self.parse_expr(select, clause)
            self.expect_punct(")")
            return
        if tok.kind in ("ident", "qident"):
            nxt = self.peek(1)
            if tok.kind == "ident" and nxt.kind == "punct" and nxt.text == "(":
                name_tok = self.next()
                self.next()  # (
                select.func_uses.append(FuncUse(name_tok.text.lower(), name_tok.span, clause))
                if self.peek().kind == "op" and self.peek().text == "*":
                    self.next()
                elif not (self.peek().kind == "punct" and self.peek().text == ")"):
                    self.accept_kw("distinct")
                    self.parse_expr(select, clause)
                    while self.accept_punct(","):
                        self.parse_expr(select, clause)
                self.expect_punct(")")
                return
            self.parse_column_ref(select, clause)
            return
        self.fail("expected an expression", tok)

    def parse_case(self, select: Select, clause: str) -> None:
        self.expect_kw("case")
        if not self.peek().is_kw("when"):
            self.parse_expr(select, clause)  # CASE <expr> WHEN ... form
        saw_when = False
        while self.accept_kw("when"):
            saw_when = True
            self.parse_expr(select, clause)
            self.expect_kw("then")
            self.parse_expr(select, clause)
        if not saw_when:
            self.fail("CASE requires at least one WHEN", self.peek())
        if self.accept_kw("else"):
            self.parse_expr(select, clause)
        self.expect_kw("end")

    def parse_column_ref(self, select: Select, clause: str) -> None:
        start_tok = self.peek()
        parts = [self.next().text]
        is_star = False
        while self.peek().kind == "punct" and self.peek().text == ".":
            self.next()
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "*":
                self.next()
                is_star = True
                break
            if nxt.kind not in ("ident", "qident"):
                self.fail("expected identifier after '.'", nxt)
            parts.append(self.next().text)
        end = self.tokens[self.pos - 1].end
        select.column_refs.append(ColumnRef(
            parts=tuple(parts), span=(start_tok.start, end), clause=clause,
            is_star=is_star))
        if is_star:
            select.select_star = select.select_star or clause == "select"


# ---------------------------------------------------------------------------
# Name resolution


@dataclass
class _Binding:
    names: Set[str]           # lowered names this source answers to
    columns: Set[str]         # lowered column names


def _output_columns(select: Select, catalog: SchemaCatalog) -> Set[str]:
    """Best-effort output column set of a subselect, for derived tables."""
    columns: Set[str] = set(select.select_aliases)
    if select.select_star:
        for source in select.sources:
            if isinstance(source, TableRef):
                canonical = catalog.canonical_table(source.name)
                if canonical:
                    columns.update(c.lower() for c in catalog.column_names(canonical))
            elif isinstance(source, DerivedTable):
                columns.update(_output_columns(source.select, catalog))
    return columns


def _resolve(select: Select, catalog: SchemaCatalog,
             outer: Sequence[_Binding], diags: List[Diagnostic]) -> None:
    bindings: List[_Binding] = []
    for source in select.sources:
        if isinstance(source, TableRef):
            canonical = catalog.canonical_table(source.name)
            if canonical is None:
                diags.append(Diagnostic(
                    "unknown-table", f"unknown table {source.name!r}", source.span,
                    Verdict.UNKNOWN_TABLE))
                continue
            names = {canonical.lower()}
            if "." in canonical:
                names.add(canonical.split(".")[-1].lower())
            if source.alias:
                names = {source.alias.lower()}
            bindings.append(_Binding(
                names=names,
                columns={c.lower() for c in catalog.column_names(canonical)}))
        else:
            _resolve(source.select, catalog, list(outer) + bindings, diags)
            bindings.append(_Binding(
                names={source.alias.lower()},
                columns=_output_columns(source.select, catalog)))

    scope_chain = [bindings] + [list(outer)]
    aliases = set(select.select_aliases)

    def lookup_qualified(qualifier: str, column: str, ref: ColumnRef) -> None:
        for scope in scope_chain:
            for binding in scope:
                if qualifier in binding.names:
                    if ref.is_star or column in binding.columns:
                        return
                    diags.append(Diagnostic(
                        "unknown-column",
                        f"table {qualifier!r} has no column {column!r}", ref.span,
                        Verdict.UNKNOWN_COLUMN))
                    return
        diags.append(Diagnostic(
            "unknown-qualifier", f"unknown table or alias {qualifier!r}", ref.span,
            Verdict.UNKNOWN_COLUMN))

    def lookup_bare(name: str, ref: ColumnRef) -> None:
        for scope in scope_chain:
            hits = [b for b in scope if name in b.columns]
            if len(hits) == 1:
                return
            if len(hits) > 1:
                diags.append(Diagnostic(
                    "ambiguous-column",
                    f"column {name!r} is ambiguous across joined tables", ref.span,
                    Verdict.UNKNOWN_COLUMN))
                return
        if ref.clause in ("group", "having", "order") and name in aliases:
            return
        diags.append(Diagnostic(
            "unknown-column", f"unknown column {name!r}", ref.span,
            Verdict.UNKNOWN_COLUMN))

    for ref in select.column_refs:
        if ref.is_star:
            lookup_qualified(".".join(ref.parts).lower(), "*", ref)
        elif len(ref.parts) == 1:
            lookup_bare(ref.parts[0].lower(), ref)
        else:
            lookup_qualified(".".join(ref.parts[:-1]).lower(),
                             ref.parts[-1].lower(), ref)

    for func in select.func_uses:
        if func.name not in ALLOWED_FUNCTIONS:
            diags.append(Diagnostic(
                "unknown-function",
                f"function {func.name!r} is not in the supported dialect", func.span,
                Verdict.SYNTAX_ERROR))

    for sub in select.subqueries:
        _resolve(sub, catalog, list(outer) + bindings, diags)


# ---------------------------------------------------------------------------
# Row-limit heuristic


def _has_aggregation(select: Select) -> bool:
    if select.has_group_by or select.distinct:
        return True
    return any(f.clause == "select" and f.name in AGGREGATE_FUNCTIONS
               for f in select.func_uses)


def _minute_table_in_from(select: Select, catalog: SchemaCatalog) -> Optional[TableRef]:
    for source in select.sources:
        if isinstance(source, TableRef):
            if catalog.is_minute_table(source.name):
                return source
        elif isinstance(source, DerivedTable):
            if not _has_aggregation(source.select):
                hit = _minute_table_in_from(source.select, catalog)
                if hit is not None:
                    return hit
    return None


# ---------------------------------------------------------------------------
# Entry points


def validate_sql(query: str, catalog: SchemaCatalog) -> ValidationReport:
    """Classify a query against the dialect and catalog; never raises."""
    stripped = query.strip()
    if not stripped:
        return ValidationReport(Verdict.SYNTAX_ERROR, (
            Diagnostic("empty-query", "query is empty", (0, 0), Verdict.SYNTAX_ERROR),))
    try:
        tokens = tokenize(query)
    except _GuardError as err:
        return ValidationReport(err.diagnostic.verdict, (err.diagnostic,))

    head = tokens[0]
    if head.kind == "ident" and head.text.lower() in FORBIDDEN_LEADERS:
        diag = Diagnostic(
            "forbidden-statement",
            f"{head.text.upper()} statements are not allowed on a read-only store",
            head.span, Verdict.FORBIDDEN_STATEMENT)
        return ValidationReport(Verdict.FORBIDDEN_STATEMENT, (diag,))
    if not head.is_kw("select"):
        diag = Diagnostic(
            "parse-error", "expected a SELECT statement", head.span,
            Verdict.SYNTAX_ERROR)
        return ValidationReport(Verdict.SYNTAX_ERROR, (diag,))

    parser = _Parser(tokens)
    try:
        select = parser.parse_statement()
    except _GuardError as err:
        return ValidationReport(err.diagnostic.verdict, (err.diagnostic,))

    diags: List[Diagnostic] = []
    _resolve(select, catalog, [], diags)

    if not diags:
        risky = _minute_table_in_from(select, catalog)
        bounded = _has_aggregation(select) or select.limit is not None \
            or select.top_count is not None
        if risky is not None and not bounded:
            diags.append(Diagnostic(
                "row-limit-risk",
                f"unbounded scan of minute-grained table {risky.name!r}: add an "
                "aggregate or a LIMIT", risky.span, Verdict.ROW_LIMIT_RISK))

    if not diags:
        return ValidationReport(Verdict.OK, ())
    verdict = max((d.verdict for d in diags), key=lambda v: _SEVERITY[v])
    return ValidationReport(verdict, tuple(diags))


def rewrite_for_engine(query: str) -> str:
    """Rewrite the MSSQL-style TOP prefix into a trailing LIMIT.

    Total function: anything that fails to tokenize or carries no TOP is
    returned unchanged (the engine will produce its own error).
    """
    try:
        tokens = tokenize(query)
    except _GuardError:
        return query
    has_limit = any(t.is_kw("limit") for t in tokens)
    for idx, tok in enumerate(tokens):
        if idx != 0 or not tok.is_kw("select"):
            continue  # rewrite only an outermost TOP; inner ones stay as-is
        j = idx + 1
        if tokens[j].is_kw("distinct", "all"):
            j += 1
        if not tokens[j].is_kw("top"):
            continue
        k = j + 1
        wrapped = tokens[k].kind == "punct" and tokens[k].text == "("
        if wrapped:
            k += 1
        if tokens[k].kind != "num":
            return query
        count = tokens[k].text
        k += 1
        if wrapped:
            if not (tokens[k].kind == "punct" and tokens[k].text == ")"):
                return query
            k += 1
        rewritten = query[:tokens[j].start] + query[tokens[k].start:]
        rewritten = rewritten.rstrip().rstrip(";")
        if not has_limit:
            rewritten = f"{rewritten} LIMIT {count}"
        return rewritten
    return query
