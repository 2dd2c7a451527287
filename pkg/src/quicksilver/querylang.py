"""Fielded boolean query language.

Syntax::

    query  := clause (("AND" | "OR") clause)*
    clause := [field ":"] (term | "(" term+ ")")

Bare terms search the fulltext field. Adjacent clauses with no operator
are an implicit AND, and AND binds tighter than OR. A parenthesized list
after ``field:`` is a value set, matching any of the listed values.
Operator keywords are case-sensitive uppercase; anything else is a term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

KNOWN_FIELDS = (
    "fulltext",
    "title",
    "abstract",
    "keyword",
    "datasource",
    "project",
    "parameter",
    "sensor",
    "topic",
)

DEFAULT_FIELD = "fulltext"

FACET_FIELDS = ("datasource", "project", "parameter", "sensor", "topic")
TEXT_FIELDS = ("fulltext", "title", "abstract", "keyword")


class QueryError(ValueError):
    """Base for query problems; carries the character offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.message = message
        self.offset = offset


class QuerySyntaxError(QueryError):
    pass


class UnknownFieldError(QueryError):
    def __init__(self, field: str, offset: int):
        super().__init__(f"unknown field '{field}'", offset)
        self.field = field


@dataclass(frozen=True)
class Term:
    field: str
    token: str


@dataclass(frozen=True)
class FieldSet:
    field: str
    values: tuple[str, ...]


@dataclass(frozen=True)
class And:
    children: tuple["QueryNode", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["QueryNode", ...]


QueryNode = Union[Term, FieldSet, And, Or]


@dataclass(frozen=True)
class _Tok:
    kind: str  # "word" | "lparen" | "rparen"
    text: str
    pos: int


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "(":
            toks.append(_Tok("lparen", "(", i))
            i += 1
            continue
        if c == ")":
            toks.append(_Tok("rparen", ")", i))
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in "()":
            j += 1
        toks.append(_Tok("word", text[i:j], i))
        i = j
    return toks


def _normalize_field(name: str, pos: int) -> str:
    lowered = name.lower()
    if lowered not in KNOWN_FIELDS:
        raise UnknownFieldError(name, pos)
    return lowered


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _lex(text)
        self.i = 0

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> _Tok | None:
        tok = self.peek()
        if tok is not None:
            self.i += 1
        return tok

    def eof_pos(self) -> int:
        return len(self.text)

    def parse(self) -> QueryNode:
        node = self.parse_or()
        tok = self.peek()
        if tok is not None:
            raise QuerySyntaxError(f"unexpected '{tok.text}'", tok.pos)
        return node

    def parse_or(self) -> QueryNode:
        branches = [self.parse_and()]
        while True:
            tok = self.peek()
            if tok is not None and tok.kind == "word" and tok.text == "OR":
                self.next()
                branches.append(self.parse_and())
            else:
                break
        if len(branches) == 1:
            return branches[0]
        return Or(tuple(branches))

    def parse_and(self) -> QueryNode:
        clauses = [self.parse_clause()]
        while True:
            tok = self.peek()
            if tok is None or tok.kind == "rparen":
                break
            if tok.kind == "word" and tok.text == "OR":
                break
            if tok.kind == "word" and tok.text == "AND":
                self.next()
                clauses.append(self.parse_clause())
            else:
                # implicit AND between adjacent clauses
                clauses.append(self.parse_clause())
        if len(clauses) == 1:
            return clauses[0]
        return And(tuple(clauses))

    def parse_clause(self) -> QueryNode:
        tok = self.next()
        if tok is None:
            raise QuerySyntaxError("expected a clause", self.eof_pos())
        if tok.kind == "rparen":
            raise QuerySyntaxError("unbalanced ')'", tok.pos)
        if tok.kind == "lparen":
            return self.parse_value_list(DEFAULT_FIELD, tok.pos)
        if tok.text in ("AND", "OR"):
            raise QuerySyntaxError(f"dangling operator '{tok.text}'", tok.pos)
        if ":" in tok.text:
            name, _, rest = tok.text.partition(":")
            if not name:
                raise QuerySyntaxError("missing field name before ':'", tok.pos)
            fld = _normalize_field(name, tok.pos)
            if rest:
                return Term(fld, rest.lower())
            nxt = self.next()
            if nxt is None or nxt.kind != "lparen":
                pos = nxt.pos if nxt else self.eof_pos()
                raise QuerySyntaxError(f"expected a term or '(' after '{name}:'", pos)
            return self.parse_value_list(fld, nxt.pos)
        return Term(DEFAULT_FIELD, tok.text.lower())

    def parse_value_list(self, fld: str, open_pos: int) -> QueryNode:
        values: list[str] = []
        while True:
            tok = self.next()
            if tok is None:
                raise QuerySyntaxError("unbalanced '('", open_pos)
            if tok.kind == "rparen":
                break
            if tok.kind == "lparen":
                raise QuerySyntaxError("nested '(' not allowed", tok.pos)
            if tok.text in ("AND", "OR"):
                raise QuerySyntaxError(f"operator '{tok.text}' not allowed inside a value list", tok.pos)
            values.append(tok.text.lower())
        if not values:
            raise QuerySyntaxError("empty value list", open_pos)
        return FieldSet(fld, tuple(values))


def parse_query(text: str) -> QueryNode:
    """Parse query text into an AST; raises QueryError on bad input."""
    if not text or not text.strip():
        raise QuerySyntaxError("empty query", 0)
    return _Parser(text).parse()


def normalize_ast(node: QueryNode) -> QueryNode:
    """Flatten nested same-operator nodes, drop duplicate siblings, and
    collapse single-child groups. Preserves match semantics; idempotent."""
    if isinstance(node, Term):
        return Term(node.field, node.token.lower())
    if isinstance(node, FieldSet):
        seen: list[str] = []
        for v in node.values:
            lv = v.lower()
            if lv not in seen:
                seen.append(lv)
        if len(seen) == 1:
            return Term(node.field, seen[0])
        return FieldSet(node.field, tuple(seen))
    op = type(node)
    flat: list[QueryNode] = []
    for child in node.children:
        child = normalize_ast(child)
        if isinstance(child, op):
            flat.extend(child.children)
        else:
            flat.append(child)
    unique: list[QueryNode] = []
    for child in flat:
        if child not in unique:
            unique.append(child)
    if len(unique) == 1:
        return unique[0]
    return op(tuple(unique))


def render_query(node: QueryNode) -> str:
    """Canonical text form: lowercase explicit fields, single spaces,
    value-set values space-separated inside parens. parse(render(ast)) has
    identical match semantics to ast."""
    if isinstance(node, Term):
        return f"{node.field}:{node.token}"
    if isinstance(node, FieldSet):
        return f"{node.field}:({' '.join(node.values)})"
    if isinstance(node, And):
        parts = []
        for child in node.children:
            if isinstance(child, (And, Or)):
                raise ValueError("nested boolean groups are not expressible in this syntax")
            parts.append(render_query(child))
        return " AND ".join(parts)
    if isinstance(node, Or):
        return " OR ".join(
            render_query(child) if not isinstance(child, Or) else _raise_nested()
            for child in node.children
        )
    raise TypeError(f"not a query node: {node!r}")


def _raise_nested():
    raise ValueError("nested boolean groups are not expressible in this syntax")


def collect_terms(node: QueryNode) -> list[tuple[str, str]]:
    """Distinct (field, token) pairs in AST order; the scoring terms."""
    out: list[tuple[str, str]] = []

    def walk(n: QueryNode) -> None:
        if isinstance(n, Term):
            pair = (n.field, n.token)
            if pair not in out:
                out.append(pair)
        elif isinstance(n, FieldSet):
            for v in n.values:
                pair = (n.field, v)
                if pair not in out:
                    out.append(pair)
        else:
            for child in n.children:
                walk(child)

    walk(node)
    return out
