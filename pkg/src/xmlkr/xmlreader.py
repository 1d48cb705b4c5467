"""A small, strict reader for the XML subset XMLKR documents use.

Supported: an optional XML declaration, elements, attributes, character data,
comments and the five predefined entities. Rejected with a positioned
:class:`MalformedXml`: DTDs, CDATA sections, processing instructions,
character references and any other entity.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from typing import Dict, List, Tuple, Union

from .errors import MalformedXml

ENTITIES = {"lt": "<", "gt": ">", "amp": "&", "quot": '"', "apos": "'"}

_NAME = re.compile(r"[^\W\d][\w.:-]*")
_WS = re.compile(r"[ \t\n]*")
_ENTITY = re.compile(r"&(?:([A-Za-z]+);)?")
_INVALID_CHAR = re.compile(
    "[^\t\n\r\u0020-\ud7ff\ue000-\ufffd\U00010000-\U0010ffff]")
_XMLDECL = re.compile(
    r"<\?xml[ \t\n]+version[ \t\n]*=[ \t\n]*(['\"])1\.[0-9]+\1"
    r"(?:[ \t\n]+encoding[ \t\n]*=[ \t\n]*(['\"])([A-Za-z][A-Za-z0-9._-]*)\2)?"
    r"(?:[ \t\n]+standalone[ \t\n]*=[ \t\n]*(['\"])(?:yes|no)\4)?"
    r"[ \t\n]*\?>")


@dataclass
class Text:
    text: str
    line: int
    column: int


@dataclass
class Element:
    tag: str
    attrs: Dict[str, str] = field(default_factory=dict)
    children: List[Union["Element", Text]] = field(default_factory=list)
    line: int = 1
    column: int = 1

    @property
    def elements(self) -> List["Element"]:
        return [c for c in self.children if isinstance(c, Element)]

    @property
    def text(self) -> str:
        return "".join(c.text for c in self.children if isinstance(c, Text))


def decode(data: Union[bytes, bytearray, str]) -> str:
    """UTF-8 decode, reporting the position of the first undecodable byte."""
    if isinstance(data, str):
        return data
    data = bytes(data)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        good = data[: exc.start].decode("utf-8")
        line = good.count("\n") + 1
        column = len(good) - (good.rfind("\n") + 1) + 1
        raise MalformedXml(f"invalid UTF-8 byte 0x{data[exc.start]:02x}", line, column) from None
    return text


class _Reader:
    def __init__(self, text: str):
        if text.startswith("\ufeff"):
            text = text[1:]
        self.text = text.replace("\r\n", "\n").replace("\r", "\n")
        self.pos = 0
        self._line_starts = [0] + [m.end() for m in re.finditer("\n", self.text)]

    def where(self, pos: int) -> Tuple[int, int]:
        line = bisect.bisect_right(self._line_starts, pos)
        return line, pos - self._line_starts[line - 1] + 1

    def fail(self, message: str, pos: int | None = None) -> MalformedXml:
        line, column = self.where(self.pos if pos is None else pos)
        return MalformedXml(message, line, column)

    def skip_ws(self) -> None:
        self.pos = _WS.match(self.text, self.pos).end()

    def name(self, what: str) -> str:
        m = _NAME.match(self.text, self.pos)
        if not m:
            raise self.fail(f"expected {what}")
        self.pos = m.end()
        return m.group()

    def unescape(self, raw: str, start: int) -> str:
        if "&" not in raw:
            return raw
        out = []
        last = 0
        for m in _ENTITY.finditer(raw):
            name = m.group(1)
            if name is None or name not in ENTITIES:
                raise self.fail("unsupported or malformed entity reference", start + m.start())
            out.append(raw[last:m.start()])
            out.append(ENTITIES[name])
            last = m.end()
        out.append(raw[last:])
        return "".join(out)

    def comment(self) -> None:
        start = self.pos
        end = self.text.find("--", start + 4)
        if end < 0:
            raise self.fail("unterminated comment", start)
        if not self.text.startswith("-->", end):
            raise self.fail("'--' is not allowed inside a comment", end)
        self.pos = end + 3

    def misc(self) -> None:
        """Whitespace and comments outside the root element."""
        while True:
            self.skip_ws()
            if self.text.startswith("<!--", self.pos):
                self.comment()
            else:
                return

    def start_tag(self) -> Tuple[Element, bool]:
        start = self.pos
        self.pos += 1
        tag = self.name("element name")
        line, column = self.where(start)
        el = Element(tag, line=line, column=column)
        while True:
            before = self.pos
            self.skip_ws()
            if self.text.startswith("/>", self.pos):
                self.pos += 2
                return el, True
            if self.text.startswith(">", self.pos):
                self.pos += 1
                return el, False
            if self.pos >= len(self.text):
                raise self.fail(f"unterminated start tag <{tag}>")
            if self.pos == before:
                raise self.fail("expected whitespace, '>' or '/>'")
            attr_pos = self.pos
            key = self.name("attribute name")
            self.skip_ws()
            if not self.text.startswith("=", self.pos):
                raise self.fail(f"expected '=' after attribute {key}")
            self.pos += 1
            self.skip_ws()
            quote = self.text[self.pos:self.pos + 1]
            if quote not in ('"', "'"):
                raise self.fail("expected quoted attribute value")
            end = self.text.find(quote, self.pos + 1)
            if end < 0:
                raise self.fail("unterminated attribute value")
            raw = self.text[self.pos + 1:end]
            lt = raw.find("<")
            if lt >= 0:
                raise self.fail("'<' is not allowed in attribute values", self.pos + 1 + lt)
            value = self.unescape(raw, self.pos + 1)
            value = value.replace("\t", " ").replace("\n", " ")
            if key in el.attrs:
                raise self.fail(f"duplicate attribute {key}", attr_pos)
            el.attrs[key] = value
            self.pos = end + 1

    def read(self) -> Element:
        bad = _INVALID_CHAR.search(self.text)
        if bad:
            raise self.fail(f"character U+{ord(bad.group()):04X} is not allowed in XML", bad.start())
        if self.text.startswith("<?xml", self.pos):
            m = _XMLDECL.match(self.text, self.pos)
            if not m:
                raise self.fail("malformed XML declaration")
            if m.group(3) and m.group(3).lower() not in ("utf-8", "utf8"):
                raise self.fail(f"unsupported encoding {m.group(3)}", m.start(3))
            self.pos = m.end()
        self.misc()
        if self.pos >= len(self.text):
            raise self.fail("no root element")
        if not self.text.startswith("<", self.pos):
            raise self.fail("content is not allowed before the root element")

        root = None
        stack: List[Element] = []
        text = self.text
        while True:
            if not stack and root is not None:
                self.misc()
                if self.pos < len(text):
                    raise self.fail("content is not allowed after the root element")
                return root
            if self.pos >= len(text):
                top = stack[-1]
                raise self.fail(
                    f"unclosed element <{top.tag}> opened at line {top.line}, column {top.column}")
            if text.startswith("<", self.pos):
                if text.startswith("<!--", self.pos):
                    self.comment()
                elif text.startswith("</", self.pos):
                    start = self.pos
                    self.pos += 2
                    tag = self.name("element name")
                    self.skip_ws()
                    if not text.startswith(">", self.pos):
                        raise self.fail("expected '>'")
                    self.pos += 1
                    if not stack:
                        raise self.fail(f"unexpected end tag </{tag}>", start)
                    if stack[-1].tag != tag:
                        raise self.fail(
                            f"end tag </{tag}> does not match <{stack[-1].tag}>", start)
                    stack.pop()
                elif text.startswith("<?", self.pos):
                    raise self.fail("processing instructions are not supported")
                elif text.startswith("<!", self.pos):
                    raise self.fail("DTD declarations and CDATA sections are not supported")
                else:
                    el, empty = self.start_tag()
                    if stack:
                        stack[-1].children.append(el)
                    else:
                        root = el
                    if not empty:
                        stack.append(el)
            else:
                start = self.pos
                end = text.find("<", start)
                if end < 0:
                    end = len(text)
                raw = text[start:end]
                cdata_end = raw.find("]]>")
                if cdata_end >= 0:
                    raise self.fail("']]>' is not allowed in character data", start + cdata_end)
                line, column = self.where(start)
                stack[-1].children.append(Text(self.unescape(raw, start), line, column))
                self.pos = end


def read_xml(data: Union[bytes, bytearray, str]) -> Element:
    return _Reader(decode(data)).read()


def escape_text(value: str) -> str:
    return (value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;").replace("'", "&apos;"))


escape_attr = escape_text
