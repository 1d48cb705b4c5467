"""Reading and writing canonical XMLKR documents.

Element grammar::

    <xmlkr version="1.0"> object* </xmlkr>
    <object name="N"> attr* relation* </object>
    <attr name="N"> text? attr* </attr>
    <isa ref="N"/>   <ako ref="N"/>   <rel kind="label" ref="N"/>
    <isa> object|ref </isa>   <ako> object|ref </ako>   <rel kind="label"> object|ref </rel>
    <ref name="N"/>

A bare ``<object>`` or ``<ref>`` directly inside an object is a ``contains``
relation. ``<ref>`` marks a target already open on the nesting path; it never
introduces a definition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from .errors import (
    DuplicateAttribute,
    DuplicateObject,
    InvalidStructure,
    KnowledgeBaseError,
    UnknownObject,
    UnknownRootVersion,
)
from .model import (
    AKO,
    CONTAINS,
    ISA,
    XML_WHITESPACE,
    AttributeTree,
    Finding,
    KnowledgeBase,
    RelationEdge,
    RelationKind,
    validate,
)
from .xmlreader import Element, Text, escape_attr, escape_text, read_xml

VERSION = "1.0"
INDENT = "  "


@dataclass(frozen=True)
class Flat:
    pass


@dataclass(frozen=True)
class Nested:
    root: str


SerializationMode = Union[Flat, Nested]


# -- parsing ---------------------------------------------------------------

def _structure(el, message: str) -> InvalidStructure:
    return InvalidStructure(message, el.line, el.column)


def _attrs(el: Element, required: Tuple[str, ...], optional: Tuple[str, ...] = ()) -> Dict[str, str]:
    for key in el.attrs:
        if key not in required and key not in optional:
            raise _structure(el, f"unexpected attribute {key!r} on <{el.tag}>")
    for key in required:
        if key not in el.attrs:
            raise _structure(el, f"<{el.tag}> requires a {key!r} attribute")
    return el.attrs


def _name_attr(el: Element, key: str) -> str:
    value = el.attrs[key].strip(XML_WHITESPACE)
    if not value:
        raise _structure(el, f"{key!r} attribute of <{el.tag}> must not be empty")
    return value


def _no_text(el: Element) -> None:
    for child in el.children:
        if isinstance(child, Text) and child.text.strip(XML_WHITESPACE):
            raise InvalidStructure(f"unexpected text inside <{el.tag}>", child.line, child.column)


def _read_attr(el: Element) -> AttributeTree:
    # iterative post-order so deep attribute nesting cannot exhaust the stack
    _attrs(el, ("name",))
    built: Dict[int, AttributeTree] = {}
    work = [(el, False)]
    while work:
        node, done = work.pop()
        if not done:
            _attrs(node, ("name",))
            work.append((node, True))
            for child in reversed(node.elements):
                if child.tag != "attr":
                    raise _structure(child, f"<{child.tag}> is not allowed inside <attr>")
                work.append((child, False))
            continue
        try:
            tree = AttributeTree(
                _name_attr(node, "name"),
                node.text or None,
                tuple(built.pop(id(c)) for c in node.elements),
            )
        except KnowledgeBaseError as exc:
            raise exc.at(node.line, node.column)
        built[id(node)] = tree
    return built[id(el)]


def _relation_kind(el: Element) -> RelationKind:
    if el.tag == "isa":
        return ISA
    if el.tag == "ako":
        return AKO
    try:
        return RelationKind(el.attrs["kind"].strip(XML_WHITESPACE))
    except KnowledgeBaseError as exc:
        raise _structure(el, exc.message)


class _Builder:
    def __init__(self):
        self.kb = KnowledgeBase()

    def run(self, root: Element) -> KnowledgeBase:
        if root.tag != "xmlkr":
            raise _structure(root, f"root element must be <xmlkr>, found <{root.tag}>")
        _attrs(root, (), ("version",))
        version = root.attrs.get("version")
        if version != VERSION:
            raise UnknownRootVersion(
                f"unsupported XMLKR version {version!r}; expected {VERSION!r}", root.line, root.column)
        _no_text(root)
        for child in root.elements:
            if child.tag != "object":
                raise _structure(child, f"<{child.tag}> is not allowed at the top level")
            self.define(child)
        return self.kb

    def define(self, top: Element) -> None:
        """Define an object and, depth-first, every object nested inside it.

        Frames on the work stack are ``(name, pending relation entries)``;
        the open-name list is the current nesting path.
        """
        open_names: List[str] = []
        work: List[Tuple[str, List]] = []

        def enter(el: Element) -> None:
            _attrs(el, ("name",))
            _no_text(el)
            name = _name_attr(el, "name")
            attributes = []
            relations = []
            seen_attrs = set()
            for child in el.elements:
                if child.tag == "attr":
                    tree = _read_attr(child)
                    if tree.name in seen_attrs:
                        raise DuplicateAttribute(
                            f"duplicate attribute {tree.name!r} in object {name!r}", child.line, child.column)
                    seen_attrs.add(tree.name)
                    attributes.append(tree)
                elif child.tag in ("isa", "ako", "rel", "object", "ref"):
                    relations.append(self.relation_entry(child))
                else:
                    raise _structure(child, f"<{child.tag}> is not allowed inside <object>")
            try:
                self.kb.add_object(name, attributes)
            except KnowledgeBaseError as exc:
                raise exc.at(el.line, el.column)
            open_names.append(name)
            work.append((name, relations))

        enter(top)
        while work:
            name, pending = work[-1]
            if not pending:
                work.pop()
                open_names.pop()
                continue
            el, kind, target, inline = pending[0]
            if inline is not None and target not in open_names:
                # define the inline target first; come back for the edge
                pending[0] = (el, kind, target, None)
                enter(inline)
                continue
            if inline is not None and (inline.elements or inline.text.strip(XML_WHITESPACE)):
                raise DuplicateObject(
                    f"object {target!r} is already open on the nesting path", inline.line, inline.column)
            pending.pop(0)
            try:
                self.kb.add_relation(name, kind, target)
            except KnowledgeBaseError as exc:
                raise exc.at(el.line, el.column)

    def relation_entry(self, el: Element):
        """Returns (element, kind, target name, inline object element or None)."""
        if el.tag == "object":
            _attrs(el, ("name",))
            return el, RelationKind(CONTAINS), _name_attr(el, "name"), el
        if el.tag == "ref":
            _attrs(el, ("name",))
            if el.children:
                raise _structure(el, "<ref> must be empty")
            return el, RelationKind(CONTAINS), _name_attr(el, "name"), None
        if el.tag == "rel":
            _attrs(el, ("kind",), ("ref",))
        else:
            _attrs(el, (), ("ref",))
        kind = _relation_kind(el)
        if "ref" in el.attrs:
            if el.children:
                raise _structure(el, f"<{el.tag} ref=...> must be empty")
            return el, kind, _name_attr(el, "ref"), None
        _no_text(el)
        inner = el.elements
        if len(inner) != 1:
            raise _structure(el, f"<{el.tag}> needs a 'ref' attribute or exactly one <object>/<ref> child")
        target = inner[0]
        if target.tag == "object":
            _attrs(target, ("name",))
            return el, kind, _name_attr(target, "name"), target
        if target.tag == "ref":
            _attrs(target, ("name",))
            if target.children:
                raise _structure(target, "<ref> must be empty")
            return el, kind, _name_attr(target, "name"), None
        raise _structure(target, f"<{target.tag}> is not allowed inside <{el.tag}>")


def parse_document(data: Union[bytes, str]) -> Tuple[KnowledgeBase, List[Finding]]:
    """Parse an XMLKR document into a knowledge base plus validation findings.

    Every exception raised here is an :class:`~xmlkr.errors.XmlkrError` with
    a line and column.
    """
    root = read_xml(data)
    kb = _Builder().run(root)
    return kb, validate(kb).findings


def load(path) -> Tuple[KnowledgeBase, List[Finding]]:
    with open(path, "rb") as fh:
        return parse_document(fh.read())


# -- serialisation ---------------------------------------------------------

def _q(value: str) -> str:
    return '"' + escape_attr(value) + '"'


def _write_attr(out: List[str], tree: AttributeTree, depth: int) -> None:
    pad = INDENT * depth
    head = f"{pad}<attr name={_q(tree.name)}>"
    value = escape_text(tree.value) if tree.value is not None else ""
    if not tree.children:
        out.append(f"{head}{value}</attr>")
        return
    out.append(head + value)
    for child in tree.children:
        _write_attr(out, child, depth + 1)
    out.append(f"{pad}</attr>")


def _reference(edge: RelationEdge) -> str:
    if edge.kind == ISA or edge.kind == AKO:
        return f"<{edge.kind.label} ref={_q(edge.target)}/>"
    return f"<rel kind={_q(edge.kind.label)} ref={_q(edge.target)}/>"


def _wrapper(kind: RelationKind) -> Tuple[Optional[str], Optional[str]]:
    if kind == ISA or kind == AKO:
        return f"<{kind.label}>", f"</{kind.label}>"
    if kind.label == CONTAINS:
        return None, None
    return f"<rel kind={_q(kind.label)}>", "</rel>"


def _write_flat_object(out: List[str], kb: KnowledgeBase, name: str, depth: int) -> None:
    node = kb.objects[name]
    pad = INDENT * depth
    if not node.attributes and not node.edges:
        out.append(f"{pad}<object name={_q(name)}/>")
        return
    out.append(f"{pad}<object name={_q(name)}>")
    for a in node.attributes:
        _write_attr(out, a, depth + 1)
    for e in node.edges:
        out.append(INDENT * (depth + 1) + _reference(e))
    out.append(f"{pad}</object>")


def _document(body: List[str]) -> str:
    if not body:
        return f'<xmlkr version="{VERSION}"/>\n'
    return "\n".join([f'<xmlkr version="{VERSION}">', *body, "</xmlkr>"]) + "\n"


def canonical_order(kb: KnowledgeBase) -> List[str]:
    """Object names sorted by code point.

    Declaration order cannot serve here: a promoted stub keeps the slot of
    its first reference, and a nested document declares objects in expansion
    order, so neither survives a round trip. Sorting makes the flat form a
    function of the content alone. Edge and attribute order, which do carry
    meaning, are untouched.
    """
    return sorted(kb.objects)


def serialize_flat(kb: KnowledgeBase) -> str:
    """One top-level definition per defined object, relations as references.

    Stubs have no element of their own: the references that created them
    recreate them on parsing.
    """
    body: List[str] = []
    for name in canonical_order(kb):
        if not kb.objects[name].stub:
            _write_flat_object(body, kb, name, 1)
    return _document(body)


def serialize_nested(kb: KnowledgeBase, root: str) -> str:
    """Expand ``root`` inline, following relation targets depth-first.

    A target already on the current expansion path becomes a ``<ref>``. A
    target that was expanded earlier elsewhere, or is a stub, is written as a
    plain reference, so each object is defined exactly once. Objects not
    reached from ``root`` follow as flat definitions, in canonical order.
    """
    node = kb.get(root)
    body: List[str] = []
    expanded = set()
    if not node.stub:
        _expand(body, kb, root, expanded)
    for name in canonical_order(kb):
        if not kb.objects[name].stub and name not in expanded:
            _write_flat_object(body, kb, name, 1)
    return _document(body)


def _expand(out: List[str], kb: KnowledgeBase, root: str, expanded: set) -> None:
    # Frames: (name, edge iterator, depth, closing tag of the wrapper it sits in)
    path: List[str] = []

    def open_object(name: str, depth: int, closer: Optional[str]):
        node = kb.objects[name]
        expanded.add(name)
        path.append(name)
        pad = INDENT * depth
        if not node.attributes and not node.edges:
            out.append(f"{pad}<object name={_q(name)}/>")
            path.pop()
            if closer:
                out.append(INDENT * (depth - 1) + closer)
            return None
        out.append(f"{pad}<object name={_q(name)}>")
        for a in node.attributes:
            _write_attr(out, a, depth + 1)
        return (name, iter(node.edges), depth, closer)

    stack = []
    frame = open_object(root, 1, None)
    if frame:
        stack.append(frame)
    while stack:
        name, edges, depth, closer = stack[-1]
        edge = next(edges, None)
        if edge is None:
            stack.pop()
            path.pop()
            out.append(INDENT * depth + "</object>")
            if closer:
                out.append(INDENT * (depth - 1) + closer)
            continue
        inner = INDENT * (depth + 1)
        target = edge.target
        if target in path:
            opener, close = _wrapper(edge.kind)
            if opener:
                out.append(inner + opener)
                out.append(inner + INDENT + f"<ref name={_q(target)}/>")
                out.append(inner + close)
            else:
                out.append(inner + f"<ref name={_q(target)}/>")
        elif target in expanded or kb.objects[target].stub:
            out.append(inner + _reference(edge))
        else:
            opener, close = _wrapper(edge.kind)
            if opener:
                out.append(inner + opener)
                frame = open_object(target, depth + 2, close)
            else:
                frame = open_object(target, depth + 1, None)
            if frame:
                stack.append(frame)


def serialize(kb: KnowledgeBase, mode: SerializationMode = Flat()) -> str:
    if isinstance(mode, Nested):
        return serialize_nested(kb, mode.root)
    return serialize_flat(kb)


def canonical_equal(a: KnowledgeBase, b: KnowledgeBase) -> bool:
    """Same names, stub flags, attribute trees and edge lists (both order-sensitive)."""
    if set(a.objects) != set(b.objects):
        return False
    for name, x in a.objects.items():
        y = b.objects[name]
        if x.stub != y.stub or x.attributes != y.attributes or x.edges != y.edges:
            return False
    return True


__all__ = [
    "Flat",
    "Nested",
    "SerializationMode",
    "canonical_equal",
    "canonical_order",
    "load",
    "parse_document",
    "serialize",
    "serialize_flat",
    "serialize_nested",
    "UnknownObject",
]
