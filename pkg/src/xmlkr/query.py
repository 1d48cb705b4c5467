"""A five-form query language over a knowledge base.

::

    attr OBJECT.attr[.attr...]          inherited attribute lookup
    ancestors OBJECT                    ISA/AKO closure
    instances CLASS [transitive]        instance enumeration
    find attr[.attr...] = VALUE         objects whose resolved attribute equals VALUE
    related OBJECT [kind=LABEL]         outgoing relation targets

Names containing whitespace, dots, ``=`` or quotes must be double-quoted;
inside quotes a backslash escapes the next character.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple, Union

from . import inference
from .errors import InvalidName, QuerySyntaxError, UnknownObject
from .model import XML_WHITESPACE, AttributeTree, KnowledgeBase, RelationKind

KEYWORDS = ("attr", "ancestors", "instances", "find", "related")
_WORD = re.compile(r"[A-Za-z]+")
_NAME_STOP = set(".=\"'")


@dataclass(frozen=True)
class Attr:
    object: str
    path: Tuple[str, ...]
    offset: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Ancestors:
    object: str
    offset: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Instances:
    cls: str
    transitive: bool = False
    offset: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Find:
    path: Tuple[str, ...]
    expected: str


@dataclass(frozen=True)
class Related:
    object: str
    kind: Optional[RelationKind] = None
    offset: int = field(default=0, compare=False, repr=False)


QueryExpr = Union[Attr, Ancestors, Instances, Find, Related]


class Row(NamedTuple):
    object: str
    value: Optional[str] = None
    provider: Optional[str] = None
    distance: Optional[int] = None


def _field(value) -> str:
    if value is None:
        return "-"
    text = str(value)
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


@dataclass
class QueryResult:
    rows: List[Row] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def render(self) -> str:
        return "".join("\t".join(_field(v) for v in row) + "\n" for row in self.rows)


# -- parsing ---------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, expected=(), pos: Optional[int] = None) -> QuerySyntaxError:
        return QuerySyntaxError(message, self.pos if pos is None else pos, self.text, expected)

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def skip_ws(self) -> bool:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.pos > start

    def require_ws(self, expected: str) -> None:
        if not self.skip_ws():
            if self.at_end():
                raise self.error("unexpected end of query", (expected,))
            raise self.error("expected whitespace", ("whitespace",))

    def word(self) -> Optional[str]:
        m = _WORD.match(self.text, self.pos)
        return m.group() if m else None

    def quoted(self) -> str:
        start = self.pos
        quote = self.text[start]
        self.pos += 1
        out = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "\\":
                if self.pos + 1 >= len(self.text):
                    break
                out.append(self.text[self.pos + 1])
                self.pos += 2
                continue
            self.pos += 1
            if ch == quote:
                return "".join(out)
            out.append(ch)
        raise self.error("unterminated quoted string", (f"closing {quote}",), start)

    def name(self, what: str = "name") -> Tuple[str, int]:
        start = self.pos
        if self.at_end():
            raise self.error("unexpected end of query", (what,))
        if self.text[self.pos] in "\"'":
            value = self.quoted()
            if not value:
                raise self.error(f"empty {what}", (what,), start)
            return value, start
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch.isspace() or ch in _NAME_STOP:
                break
            self.pos += 1
        if self.pos == start:
            raise self.error(f"expected {what}", (what,))
        return self.text[start:self.pos], start

    def dotted(self, minimum: int, what: str) -> Tuple[List[str], int]:
        first, start = self.name(what)
        parts = [first]
        while self.text.startswith(".", self.pos):
            self.pos += 1
            parts.append(self.name("attribute name")[0])
        if len(parts) < minimum:
            raise self.error("missing attribute path after object name", ("'.'",))
        return parts, start

    def value(self) -> str:
        if self.at_end():
            raise self.error("unexpected end of query", ("value",))
        if self.text[self.pos] in "\"'":
            return self.quoted()
        start = self.pos
        while self.pos < len(self.text) and not self.text[self.pos].isspace():
            self.pos += 1
        if self.pos == start:
            raise self.error("expected value", ("value",))
        return self.text[start:self.pos]

    def equals(self) -> None:
        self.skip_ws()
        if not self.text.startswith("=", self.pos):
            raise self.error("expected '='", ("'='",))
        self.pos += 1
        self.skip_ws()

    def finish(self, *expected: str) -> None:
        self.skip_ws()
        if not self.at_end():
            raise self.error("unexpected text", (*expected, "end of query"))

    def parse(self) -> QueryExpr:
        self.skip_ws()
        start = self.pos
        kw = self.word()
        if kw not in KEYWORDS:
            raise self.error("unknown query form", [f"'{k}'" for k in KEYWORDS], start)
        self.pos += len(kw)
        self.require_ws("name")
        if kw == "attr":
            parts, at = self.dotted(2, "object name")
            self.finish("'.'")
            return Attr(parts[0], tuple(parts[1:]), at)
        if kw == "ancestors":
            name, at = self.name("object name")
            self.finish()
            return Ancestors(name, at)
        if kw == "instances":
            name, at = self.name("class name")
            self.skip_ws()
            transitive = False
            if self.word() == "transitive":
                self.pos += len("transitive")
                transitive = True
                self.finish()
            else:
                self.finish("'transitive'")
            return Instances(name, transitive, at)
        if kw == "find":
            parts, _ = self.dotted(1, "attribute name")
            self.equals()
            expected = self.value()
            self.finish()
            return Find(tuple(parts), expected)
        # related
        name, at = self.name("object name")
        self.skip_ws()
        kind = None
        if self.word() == "kind":
            self.pos += len("kind")
            self.equals()
            label_at = self.pos
            label = self.value()
            try:
                kind = RelationKind(label)
            except InvalidName:
                raise self.error(f"invalid relation label {label!r}", ("label",), label_at) from None
            self.finish()
        else:
            self.finish("'kind'")
        return Related(name, kind, at)


def parse_query(text: Union[str, bytes]) -> QueryExpr:
    """Parse query text; raises :class:`QuerySyntaxError` with position and expected tokens."""
    if not isinstance(text, str):
        data = bytes(text)
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            prefix = data[:exc.start].decode("utf-8")
            raise QuerySyntaxError(
                f"invalid UTF-8 byte 0x{data[exc.start]:02x}", len(prefix), prefix) from None
    return _Parser(text).parse()


def _render_name(name: str) -> str:
    if name and not name[0] in "\"'" and not any(c.isspace() or c in _NAME_STOP for c in name):
        return name
    return _quote(name)


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _render_value(text: str) -> str:
    if text and text[0] not in "\"'" and not any(c.isspace() for c in text):
        return text
    return _quote(text)


def to_text(expr: QueryExpr) -> str:
    """Render an expression so that ``parse_query(to_text(e)) == e``."""
    if isinstance(expr, Attr):
        return "attr " + ".".join(_render_name(p) for p in (expr.object, *expr.path))
    if isinstance(expr, Ancestors):
        return "ancestors " + _render_name(expr.object)
    if isinstance(expr, Instances):
        return "instances " + _render_name(expr.cls) + (" transitive" if expr.transitive else "")
    if isinstance(expr, Find):
        return "find " + ".".join(_render_name(p) for p in expr.path) + "=" + _render_value(expr.expected)
    if isinstance(expr, Related):
        text = "related " + _render_name(expr.object)
        return text + (f" kind={expr.kind.label}" if expr.kind is not None else "")
    raise TypeError(f"not a query expression: {expr!r}")


# -- execution -------------------------------------------------------------

def render_value(tree: AttributeTree) -> str:
    """Scalar text, with sub-attributes appended as ``{name=value; ...}``."""
    if not tree.children:
        return tree.value or ""
    inner = "; ".join(f"{c.name}={render_value(c)}" for c in tree.children)
    return f"{tree.value or ''}{{{inner}}}"


def _require(kb: KnowledgeBase, name: str, offset: int, text: Optional[str]) -> None:
    if name not in kb.objects:
        err = UnknownObject(f"unknown object {name!r}")
        if text is not None:
            pos = QuerySyntaxError("", offset, text)
            err.at(pos.line, pos.column)
        raise err


def execute(kb: KnowledgeBase, expr: QueryExpr, text: Optional[str] = None) -> QueryResult:
    """Run a parsed query. ``text`` (the query source) lets errors carry a position."""
    rows: List[Row] = []
    if isinstance(expr, Attr):
        _require(kb, expr.object, expr.offset, text)
        hit = inference.resolve_attr(kb, expr.object, expr.path)
        if hit is not None:
            rows.append(Row(expr.object, render_value(hit.value), hit.provider, hit.distance))
    elif isinstance(expr, Ancestors):
        _require(kb, expr.object, expr.offset, text)
        rows = [Row(name, None, None, dist) for name, dist in inference.ancestors(kb, expr.object)]
    elif isinstance(expr, Instances):
        _require(kb, expr.cls, expr.offset, text)
        rows = [Row(name) for name in inference.instances_of(kb, expr.cls, expr.transitive)]
    elif isinstance(expr, Find):
        wanted = expr.expected.strip(XML_WHITESPACE)
        for node in kb:
            if node.stub:
                continue
            hit = inference.resolve_attr(kb, node.name, expr.path)
            if hit is not None and hit.scalar is not None and hit.scalar.strip(XML_WHITESPACE) == wanted:
                rows.append(Row(node.name, hit.scalar, hit.provider, hit.distance))
    elif isinstance(expr, Related):
        _require(kb, expr.object, expr.offset, text)
        for edge in kb.objects[expr.object].edges:
            if expr.kind is None or edge.kind == expr.kind:
                rows.append(Row(edge.target, edge.kind.label))
    else:
        raise TypeError(f"not a query expression: {expr!r}")
    return QueryResult(rows)


def run_query(kb: KnowledgeBase, text: str) -> QueryResult:
    return execute(kb, parse_query(text), text)
